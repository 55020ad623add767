"""Exact second-moment formulas for the linear perturbation term."""

from __future__ import annotations

import numpy as np

from ..linalg import as_vector
from ..spectral import SpectralDecomposition, reduced_resolvent


def _sandwich(dec: SpectralDecomposition, r: int) -> tuple[np.ndarray, np.ndarray]:
    P = dec.projector(r)
    C = reduced_resolvent(dec, r)
    S = dec.operator
    return P @ S @ P, C @ S @ C


def gamma1(dec: SpectralDecomposition, r: int, u, v) -> float:
    """``<P S P u, v>``."""
    A, _ = _sandwich(dec, r)
    return float(as_vector(v, dec.dim) @ A @ as_vector(u, dec.dim))


def gamma2(dec: SpectralDecomposition, r: int, u, v) -> float:
    """``<C S C u, v>`` with ``C`` the reduced resolvent."""
    _, B = _sandwich(dec, r)
    return float(as_vector(v, dec.dim) @ B @ as_vector(u, dec.dim))


def gamma_covariance(dec: SpectralDecomposition, r: int, u, v, u2, v2) -> float:
    """Covariance of ``xi(u,v) + xi(v,u)`` and ``xi(u2,v2) + xi(v2,u2)``.

    ``xi(u, v) = <X, P v> <X, C u>``.  Because ``P S C = 0`` the two factors
    are independent and the covariance is a sum of four products::

        <A v, v2><B u, u2> + <A v, u2><B u, v2> + <A u, u2><B v, v2> + <A u, v2><B v, u2>

    with ``A = P S P`` and ``B = C S C``.
    """
    p = dec.dim
    u, v, u2, v2 = (as_vector(x, p) for x in (u, v, u2, v2))
    A, B = _sandwich(dec, r)
    a = lambda x, y: float(x @ A @ y)  # noqa: E731
    b = lambda x, y: float(x @ B @ y)  # noqa: E731
    return a(v, v2) * b(u, u2) + a(v, u2) * b(u, v2) + a(u, u2) * b(v, v2) + a(u, v2) * b(v, u2)


def xi_samples(x: np.ndarray, dec: SpectralDecomposition, r: int, u, v) -> np.ndarray:
    """``xi(u,v) + xi(v,u)`` evaluated on each row of ``x``."""
    p = dec.dim
    u, v = as_vector(u, p), as_vector(v, p)
    P = dec.projector(r)
    C = reduced_resolvent(dec, r)
    x = np.asarray(x, dtype=np.float64)
    return (x @ (P @ v)) * (x @ (C @ u)) + (x @ (P @ u)) * (x @ (C @ v))
