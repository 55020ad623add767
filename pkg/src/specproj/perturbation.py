"""First-order perturbation of spectral projectors and contour-integral evaluation.

For ``sigma_tilde = sigma + E`` the empirical projector of cluster ``r``
splits as ``P_tilde_r - P_r = L_r(E) + S_r(E)`` with the linear part
``L_r(E) = C_r E P_r + P_r E C_r``.  The remainder is always formed as the
exact difference; the resolvent series is never summed.

The contour routines integrate the resolvent numerically and serve as an
independent route to the same operators: they only need LU solves of
``sigma - eta I``, never an eigendecomposition.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .linalg import _freeze, as_symmetric, operator_norm
from .spectral import (
    RESOLVENT_TOL,
    SpectralDecomposition,
    reduced_resolvent,
    spectral_gap,
)

IMAG_TOL = 1e-8
MIN_NODES = 8


class QuadratureError(RuntimeError):
    """Contour quadrature produced an unusable result."""


@dataclass(frozen=True)
class ContourSpec:
    """A counter-clockwise contour in the complex plane with a node budget.

    ``circle``: centre on the real axis and a radius.  ``stadium``: the set of
    points at distance ``clearance`` from a real interval ``[a, b]``, built
    from two straight segments and two semicircles.
    """

    kind: str
    center: float = 0.0
    radius: float = 0.0
    interval: tuple[float, float] = (0.0, 0.0)
    clearance: float = 0.0
    nodes: int = 64

    def __post_init__(self):
        if self.nodes < MIN_NODES:
            raise ValueError(f"need at least {MIN_NODES} nodes, got {self.nodes}")
        if self.kind == "circle":
            if not self.radius > 0:
                raise ValueError("circle radius must be positive")
        elif self.kind == "stadium":
            if not self.clearance > 0:
                raise ValueError("stadium clearance must be positive")
            a, b = self.interval
            if b < a:
                raise ValueError(f"empty interval [{a}, {b}]")
        else:
            raise ValueError(f"unknown contour kind {self.kind!r}")

    @classmethod
    def circle(cls, center: float, radius: float, nodes: int = 64) -> ContourSpec:
        return cls(kind="circle", center=float(center), radius=float(radius), nodes=nodes)

    @classmethod
    def stadium(cls, a: float, b: float, clearance: float, nodes: int = 64) -> ContourSpec:
        return cls(kind="stadium", interval=(float(a), float(b)), clearance=float(clearance), nodes=nodes)

    def quadrature(self) -> tuple[np.ndarray, np.ndarray]:
        """Nodes ``eta_k`` and complex weights ``w_k`` with ``oint f ~ sum w_k f(eta_k)``."""
        if self.kind == "circle":
            return _circle_rule(self.center, self.radius, self.nodes)
        return _stadium_rule(*self.interval, self.clearance, self.nodes)

    def distance_to(self, x: np.ndarray) -> np.ndarray:
        """Distance from real points ``x`` to the contour curve."""
        x = np.asarray(x, dtype=np.float64)
        if self.kind == "circle":
            return np.abs(np.abs(x - self.center) - self.radius)
        a, b = self.interval
        return np.abs(np.maximum(np.maximum(a - x, x - b), 0.0) - self.clearance) if a < b else np.abs(
            np.abs(x - a) - self.clearance
        )


def _circle_rule(center: float, radius: float, n: int):
    # periodic analytic integrand: the trapezoid rule converges geometrically
    phi = 2.0 * np.pi * np.arange(n) / n
    z = np.exp(1j * phi)
    return center + radius * z, 1j * radius * z * (2.0 * np.pi / n)


def _gauss_on(n: int, lo: float, hi: float):
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


STADIUM_PANEL = 2.0
STADIUM_ARC_PANELS = 2


def _bernstein_rho(half_len: float, dist: float) -> float:
    y = dist / half_len
    return y + np.sqrt(1.0 + y * y)


def _stadium_rule(a: float, b: float, h: float, n: int):
    # The stadium is only C^1 at the joins, so every smooth piece gets its own
    # composite Gauss-Legendre rule.  Enclosed eigenvalues sit at distance h
    # from the edges and outside ones at distance >= 2h from the arc centres
    # (a singularity at imaginary angle log 2).  Nodes are split so that the
    # Bernstein-ellipse rates of edge and arc panels match.
    if b - a <= 0.0:
        return _circle_rule(a, h, n)
    seg = b - a
    n_seg = max(1, int(np.ceil(seg / (STADIUM_PANEL * h))))
    n_arc = STADIUM_ARC_PANELS
    log_seg = np.log(_bernstein_rho(seg / n_seg / 2.0, h))
    log_arc = np.log(_bernstein_rho(np.pi / n_arc / 2.0, np.log(2.0)))
    # k_seg * log_seg = k_arc * log_arc and 2 n_seg k_seg + 2 n_arc k_arc = n
    k_arc = n / (2.0 * n_arc + 2.0 * n_seg * log_arc / log_seg)
    k_arc = max(3, int(np.floor(k_arc)))
    k_seg = max(3, (n - 2 * n_arc * k_arc) // (2 * n_seg))
    nodes, weights = [], []

    def edge(y: float, forward: bool):
        edges = np.linspace(a, b, n_seg + 1)
        if not forward:
            edges = edges[::-1]
        for lo, hi in zip(edges[:-1], edges[1:]):
            s, ws = _gauss_on(k_seg, lo, hi)
            nodes.append(s + 1j * y)
            weights.append(ws.astype(complex))

    def arc(c: float, t0: float):
        edges = np.linspace(t0, t0 + np.pi, n_arc + 1)
        for lo, hi in zip(edges[:-1], edges[1:]):
            t, wt = _gauss_on(k_arc, lo, hi)
            z = np.exp(1j * t)
            nodes.append(c + h * z)
            weights.append(1j * h * z * wt)

    edge(-h, forward=True)
    arc(b, -np.pi / 2)
    edge(h, forward=False)
    arc(a, np.pi / 2)
    return np.concatenate(nodes), np.concatenate(weights)


def contour_for_cluster(dec: SpectralDecomposition, r: int, nodes: int = 64) -> ContourSpec:
    """Circle of radius ``gap_r / 2`` around ``mu_r``."""
    return ContourSpec.circle(dec.cluster(r).value, spectral_gap(dec, r) / 2.0, nodes)


def interval_gap(dec: SpectralDecomposition, rs) -> float:
    """Gap separating the consecutive clusters ``rs`` from the rest of the spectrum."""
    rs = sorted(rs)
    if rs != list(range(rs[0], rs[-1] + 1)):
        raise ValueError(f"clusters {rs} are not consecutive")
    lo, hi = rs[0], rs[-1]
    mu = dec.values
    if hi < len(mu):
        g_below = mu[hi - 1] - mu[hi]
    elif mu[-1] > 0:
        g_below = mu[-1]
    else:
        g_below = None
    g_above = mu[lo - 2] - mu[lo - 1] if lo >= 2 else None
    gs = [g for g in (g_above, g_below) if g is not None]
    if not gs:
        raise ValueError("interval covers the whole spectrum and touches 0")
    return float(min(gs))


def contour_for_interval(dec: SpectralDecomposition, rs, nodes: int = 64) -> ContourSpec:
    """Stadium at distance ``gap_I / 2`` from ``[mu_{r2}, mu_{r1}]``."""
    rs = sorted(rs)
    g = interval_gap(dec, rs)
    return ContourSpec.stadium(dec.cluster(rs[-1]).value, dec.cluster(rs[0]).value, g / 2.0, nodes)


def _check_contour(sigma: np.ndarray, contour: ContourSpec, tol: float) -> None:
    w = np.linalg.eigvalsh(sigma)
    scale = max(1.0, float(np.abs(w).max()))
    d = contour.distance_to(w)
    if np.min(d) <= tol * scale:
        raise QuadratureError(
            f"contour passes within {np.min(d):.3g} of eigenvalue {w[np.argmin(d)]:.6g}"
        )


def _real_part(z: np.ndarray, imag_tol: float) -> tuple[np.ndarray, float]:
    resid = float(np.abs(z.imag).max()) if z.size else 0.0
    if resid > imag_tol:
        raise QuadratureError(f"imaginary residual {resid:.3g} exceeds {imag_tol:.1g}")
    re = z.real
    return _freeze((re + re.T) / 2.0), resid


class ContourResult(NamedTuple):
    operator: np.ndarray
    imag_residual: float


def riesz_projector(
    sigma,
    contour: ContourSpec,
    imag_tol: float = IMAG_TOL,
    resolvent_tol: float = RESOLVENT_TOL,
    with_residual: bool = False,
):
    """``-(1/2 pi i) oint (sigma - eta I)^{-1} d eta`` by quadrature.

    Returns the real symmetric part; with ``with_residual=True`` also the
    largest discarded imaginary entry.
    """
    sigma = as_symmetric(sigma)
    _check_contour(sigma, contour, resolvent_tol)
    p = sigma.shape[0]
    eye = np.eye(p)
    acc = np.zeros((p, p), dtype=complex)
    for eta, w in zip(*contour.quadrature()):
        acc += w * np.linalg.solve(sigma - eta * eye, eye)
    op, resid = _real_part(-acc / (2j * np.pi), imag_tol)
    return ContourResult(op, resid) if with_residual else op


def contour_linear_term(
    sigma,
    E,
    contour: ContourSpec,
    imag_tol: float = IMAG_TOL,
    resolvent_tol: float = RESOLVENT_TOL,
    with_residual: bool = False,
):
    """``(1/2 pi i) oint R(eta) E R(eta) d eta`` with ``R(eta) = (sigma - eta I)^{-1}``."""
    sigma = as_symmetric(sigma)
    E = as_symmetric(E)
    if E.shape != sigma.shape:
        raise ValueError(f"shape mismatch {E.shape} vs {sigma.shape}")
    _check_contour(sigma, contour, resolvent_tol)
    p = sigma.shape[0]
    eye = np.eye(p)
    acc = np.zeros((p, p), dtype=complex)
    for eta, w in zip(*contour.quadrature()):
        res = np.linalg.solve(sigma - eta * eye, eye)
        acc += w * (res @ E @ res)
    op, resid = _real_part(acc / (2j * np.pi), imag_tol)
    return ContourResult(op, resid) if with_residual else op


def linear_term(dec: SpectralDecomposition, r: int, E) -> np.ndarray:
    """``L_r(E) = C_r E P_r + P_r E C_r``."""
    E = np.asarray(E, dtype=np.float64)
    if E.shape != dec.operator.shape:
        raise ValueError(f"shape mismatch {E.shape} vs {dec.operator.shape}")
    c = reduced_resolvent(dec, r)
    p = dec.projector(r)
    ce_p = c @ E @ p
    return _freeze(ce_p + ce_p.T) if np.array_equal(E, E.T) else _freeze(ce_p + p @ E @ c)


def linear_term_interval(dec: SpectralDecomposition, rs, E) -> np.ndarray:
    """Linear part for the combined projector of consecutive clusters ``rs``.

    Terms coupling two clusters inside the group cancel pairwise, leaving
    ``sum_{r in I} L_r(E)``.
    """
    return _freeze(sum(linear_term(dec, r, E) for r in rs))


def remainder_term(dec: SpectralDecomposition, r: int, E, P_hat) -> np.ndarray:
    """``S_r(E) = (P_hat_r - P_r) - L_r(E)``."""
    return _freeze(np.asarray(P_hat) - dec.projector(r) - linear_term(dec, r, E))


class PerturbationBounds(NamedTuple):
    bound_projector: float
    bound_remainder: float
    separated: bool


def bounds_from(norm_E: float, gap: float) -> PerturbationBounds:
    x = norm_E / gap
    return PerturbationBounds(4.0 * x, 14.0 * x * x, bool(norm_E < gap / 2.0))


def perturbation_bounds(dec: SpectralDecomposition, r: int, E) -> PerturbationBounds:
    """``4 ||E|| / gap``, ``14 (||E|| / gap)^2`` and the separation flag."""
    return bounds_from(operator_norm(E), spectral_gap(dec, r))


def interval_bounds(dec: SpectralDecomposition, rs, E) -> PerturbationBounds:
    """Interval analogues, each inflated by ``1 + 2 L_I / (pi gap_I)``."""
    rs = sorted(rs)
    g = interval_gap(dec, rs)
    spread = dec.cluster(rs[0]).value - dec.cluster(rs[-1]).value
    factor = 1.0 + 2.0 * spread / (np.pi * g)
    x = operator_norm(E) / g
    return PerturbationBounds(4.0 * factor * x, 15.0 * factor * x * x, bool(x < 0.5))


@dataclass(frozen=True)
class PerturbationDecomposition:
    E: np.ndarray = field(repr=False)
    r: int
    L: np.ndarray = field(repr=False)
    S: np.ndarray = field(repr=False)
    norm_E: float
    gap: float
    bound_projector: float
    bound_remainder: float
    separated: bool

    @property
    def difference(self) -> np.ndarray:
        return self.L + self.S


def perturbation_decomposition(
    dec: SpectralDecomposition, r: int, E, P_hat
) -> PerturbationDecomposition:
    E = as_symmetric(E)
    L = linear_term(dec, r, E)
    S = _freeze(np.asarray(P_hat) - dec.projector(r) - L)
    norm_E = operator_norm(E)
    gap = spectral_gap(dec, r)
    b = bounds_from(norm_E, gap)
    return PerturbationDecomposition(
        E=E, r=r, L=L, S=S, norm_E=norm_E, gap=gap,
        bound_projector=b.bound_projector, bound_remainder=b.bound_remainder,
        separated=b.separated,
    )
