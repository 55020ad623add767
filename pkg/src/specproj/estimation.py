"""Eigenvector estimators: sign alignment, split-sample bias correction,
hard-thresholding support recovery and sparse PCA."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import as_vector, effective_rank, operator_norm
from .sampling import SampleSet, sample_covariance
from .spectral import MatchedCluster, SpectralDecomposition, decompose, match_cluster

DEBIAS_FLOOR = 1e-3
UNIT_TOL = 1e-12


def align_sign(v, reference=None) -> np.ndarray:
    """Return ``v`` or ``-v`` so that ``<result, reference> >= 0``.

    Without a reference, or when the inner product is exactly zero, the
    first coordinate of largest absolute value is made positive.
    """
    v = as_vector(v)
    if not np.any(v):
        raise ValueError("cannot align the zero vector")
    if reference is not None:
        ip = float(v @ as_vector(reference, v.size))
        if ip != 0.0:
            return v if ip > 0 else -v
    j = int(np.argmax(np.abs(v)))
    return v if v[j] > 0 else -v


@dataclass(frozen=True)
class EigenvectorEstimate:
    vector: np.ndarray = field(repr=False)
    index: int
    reference: np.ndarray | None = field(default=None, repr=False)
    separated: bool = True


def extract_eigenvector(cluster: MatchedCluster | SpectralDecomposition, r: int | None = None, reference=None) -> EigenvectorEstimate:
    """Unit vector spanning a rank-one empirical cluster, sign-aligned to ``reference``."""
    if isinstance(cluster, SpectralDecomposition):
        if r is None:
            raise ValueError("cluster index r is required for a decomposition")
        c = cluster.cluster(r)
        vecs, index, separated = c.vectors, r, True
    else:
        vecs, index, separated = cluster.vectors, cluster.index, cluster.separated
    if vecs.shape[1] != 1:
        raise ValueError(f"cluster {index} has multiplicity {vecs.shape[1]}, expected 1")
    v = vecs[:, 0] / np.linalg.norm(vecs[:, 0])
    ref = None if reference is None else as_vector(reference, v.size)
    return EigenvectorEstimate(align_sign(v, ref), index, ref, separated)


def linear_form_representation(P_hat, P, theta, u) -> float:
    """``<theta_hat - theta, u>`` from the bilinear forms of ``P_hat - P`` alone.

    With ``q = <(P_hat - P) theta, theta>`` and ``theta_hat`` aligned to ``theta``::

        <theta_hat - theta, u> = (<(P_hat - P) theta, u> - (sqrt(1 + q) - 1) <theta, u>) / sqrt(1 + q)
    """
    P_hat = np.asarray(P_hat, dtype=np.float64)
    P = np.asarray(P, dtype=np.float64)
    theta = as_vector(theta)
    u = as_vector(u, theta.size)
    d_theta = (P_hat - P) @ theta
    q = float(d_theta @ theta)
    if 1.0 + q <= 0.0:
        raise ValueError("empirical eigenvector is orthogonal to the target (<P_hat theta, theta> <= 0)")
    root = np.sqrt(1.0 + q)
    return float((d_theta @ u - (root - 1.0) * (theta @ u)) / root)


@dataclass(frozen=True)
class BiasEstimate:
    """Split-sample estimate ``b_hat = <theta_hat, theta_hat'> - 1``."""

    b_hat: float
    theta: np.ndarray = field(repr=False)
    theta_prime: np.ndarray = field(repr=False)
    inner: float
    separated: tuple[bool, bool]

    @property
    def all_separated(self) -> bool:
        return all(self.separated)


def _half_eigenvector(x: np.ndarray, r: int, reference_dec: SpectralDecomposition | None):
    sigma_hat = sample_covariance(x)
    if reference_dec is None:
        dec = decompose(sigma_hat)
        c = dec.cluster(r)
        if c.multiplicity != 1:
            raise ValueError(f"empirical cluster {r} has multiplicity {c.multiplicity}")
        return c.vectors[:, 0], plugin_separated(dec, r, x.shape[0])
    mc = match_cluster(reference_dec, sigma_hat, r)
    if len(mc.members) != 1:
        raise ValueError(f"cluster {r} has multiplicity {len(mc.members)}, expected 1")
    return mc.vectors[:, 0], mc.separated


def plugin_noise_level(sigma_hat, n: int) -> float:
    """Typical size of ``||sigma_hat - sigma||``: ``||S|| max(sqrt(r/n), r/n)`` with ``r = r(S)``."""
    norm = operator_norm(sigma_hat)
    if norm == 0.0:
        return 0.0
    r_eff = effective_rank(sigma_hat)
    return float(norm * max(np.sqrt(r_eff / n), r_eff / n))


def plugin_separated(dec: SpectralDecomposition, r: int, n: int) -> bool:
    """Data-mode separation check: plug-in noise level below half the empirical gap."""
    if len(dec) < 2:
        return False
    return plugin_noise_level(dec.operator, n) < dec.gap(r) / 2


def estimate_bias_split(
    samples: SampleSet | np.ndarray,
    r: int,
    reference_dec: SpectralDecomposition | None = None,
) -> BiasEstimate:
    """Estimate ``b_r`` from the two halves of an even-sized sample.

    With ``reference_dec`` the half-sample clusters are matched to its
    positions, separation flags come from the true gap, and ``theta_hat``
    is aligned to the true eigenvector.  ``theta_hat'`` is always aligned to
    ``theta_hat``.  Separation failures are reported in ``separated``.
    """
    x = samples.vectors if isinstance(samples, SampleSet) else np.asarray(samples, dtype=np.float64)
    n2 = x.shape[0]
    if n2 % 2:
        raise ValueError(f"sample count {n2} is odd; split-sample estimation needs an even count")
    if n2 < 2:
        raise ValueError("need at least two samples")
    h = n2 // 2
    v1, sep1 = _half_eigenvector(x[:h], r, reference_dec)
    v2, sep2 = _half_eigenvector(x[h:], r, reference_dec)
    ref = reference_dec.eigenvector(r) if reference_dec is not None else None
    theta = align_sign(v1, ref)
    theta_prime = align_sign(v2, theta)
    inner = float(min(1.0, theta @ theta_prime))
    return BiasEstimate(inner - 1.0, theta, theta_prime, inner, (bool(sep1), bool(sep2)))


def debiased_eigenvector(theta_hat, b_hat: float, floor: float = DEBIAS_FLOOR) -> np.ndarray:
    """``theta_hat / sqrt(1 + b_hat)``; refuses when ``1 + b_hat <= floor``."""
    theta_hat = as_vector(theta_hat)
    if not 1.0 + b_hat > floor:
        raise ValueError(f"1 + b_hat = {1.0 + b_hat:.3g} is below the debias floor {floor}")
    return theta_hat / np.sqrt(1.0 + b_hat)


def threshold_level(norm_sigma: float, gap: float, t: float, p: int, n: int, c_gamma: float) -> float:
    """``C * (||Sigma|| / gap) * sqrt((t + log p) / n)``."""
    if c_gamma < 0 or norm_sigma <= 0 or gap <= 0 or t <= 0 or p < 1 or n < 1:
        raise ValueError("threshold inputs must be positive (C may be zero)")
    return float(c_gamma * norm_sigma / gap * np.sqrt((t + np.log(p)) / n))


def recover_support(theta_tilde, beta: float) -> np.ndarray:
    """Indices ``j`` with ``|theta_tilde[j]| > beta`` (strict), 0-based."""
    if beta < 0:
        raise ValueError("threshold must be non-negative")
    return np.flatnonzero(np.abs(as_vector(theta_tilde)) > beta)


def sparse_pca_estimate(theta_tilde, support) -> np.ndarray:
    theta_tilde = as_vector(theta_tilde)
    out = np.zeros_like(theta_tilde)
    idx = np.asarray(support, dtype=np.int64)
    out[idx] = theta_tilde[idx]
    return out
