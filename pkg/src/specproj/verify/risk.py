"""Predicted eigenvector risk in the spiked model."""

from __future__ import annotations

import numpy as np

from ..sampling import CovarianceModel


def spiked_risk_prediction(model: CovarianceModel, j: int, n: int) -> float:
    """First-order prediction of ``E 2(1 - |<theta_hat_j, theta_j>|)`` for unit noise.

    ``(p - m)(1 + s_j^2) / (n s_j^4) + (1/n) sum_{k != j} (1 + s_j^2)(1 + s_k^2) / (s_j^2 - s_k^2)^2``
    """
    if model.kind != "spiked":
        raise ValueError(f"risk prediction needs a spiked model, got {model.kind!r}")
    if model.spec["sigma"] != 1.0:
        raise ValueError(f"risk prediction is stated for unit noise, got sigma={model.spec['sigma']}")
    s2 = np.asarray(model.spec["s"], dtype=np.float64) ** 2
    m = s2.size
    p = int(model.spec["p"])
    if not 1 <= j <= m:
        raise ValueError(f"spike index j={j} out of range 1..{m}")
    if n < 1:
        raise ValueError("n must be >= 1")
    sj = s2[j - 1]
    others = np.delete(s2, j - 1)
    noise = (p - m) * (1.0 + sj) / (n * sj**2)
    spikes = np.sum((1.0 + sj) * (1.0 + others) / (sj - others) ** 2) / n
    return float(noise + spikes)
