"""One-sample Kolmogorov-Smirnov distance."""

from __future__ import annotations

from collections.abc import Callable

import numpy as np


def ks_statistic(samples, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """``sup_x |F_n(x) - F(x)|`` for the empirical CDF ``F_n`` of ``samples``.

    ``cdf`` is called once on the sorted sample array.  Ties are handled by
    the usual one-sided maxima ``i/n - F(x_(i))`` and ``F(x_(i)) - (i-1)/n``.
    """
    x = np.sort(np.asarray(samples, dtype=np.float64).reshape(-1))
    n = x.size
    if n == 0:
        raise ValueError("KS statistic needs at least one sample")
    if not np.all(np.isfinite(x)):
        raise ValueError("samples contain non-finite values")
    f = np.asarray(cdf(x), dtype=np.float64)
    if f.shape != x.shape:
        f = np.array([float(cdf(xi)) for xi in x])
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - f)
    d_minus = np.max(f - (i - 1) / n)
    return float(min(1.0, max(d_plus, d_minus, 0.0)))
