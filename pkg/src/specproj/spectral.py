"""Distinct-eigenvalue clusters, spectral projectors, gaps and resolvents.

Cluster indices ``r`` are 1-based and follow descending eigenvalue order, so
``dec.cluster(1)`` is the top eigenvalue.  Member positions inside a cluster
are 0-based indices into the descending with-multiplicity eigenvalue list.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import _freeze, as_symmetric, operator_norm, sym_eigh

CLUSTER_TOL = 1e-8
PROJ_TOL = 1e-9
RECON_TOL = 1e-9
RESOLVENT_TOL = 1e-10


@dataclass(frozen=True)
class EigenCluster:
    index: int
    value: float
    multiplicity: int
    members: tuple[int, ...]
    projector: np.ndarray = field(repr=False)
    vectors: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class SpectralDecomposition:
    operator: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)
    clusters: tuple[EigenCluster, ...]

    @property
    def dim(self) -> int:
        return self.operator.shape[0]

    @property
    def values(self) -> np.ndarray:
        return np.array([c.value for c in self.clusters])

    def __len__(self) -> int:
        return len(self.clusters)

    def cluster(self, r: int) -> EigenCluster:
        if not 1 <= r <= len(self.clusters):
            raise IndexError(f"cluster index {r} out of range 1..{len(self.clusters)}")
        return self.clusters[r - 1]

    def projector(self, r: int) -> np.ndarray:
        return self.cluster(r).projector

    def eigenvector(self, r: int) -> np.ndarray:
        """Unit eigenvector of a simple eigenvalue (sign as returned by the solver)."""
        c = self.cluster(r)
        if c.multiplicity != 1:
            raise ValueError(f"cluster {r} has multiplicity {c.multiplicity}, expected 1")
        return c.vectors[:, 0]

    def gap(self, r: int) -> float:
        return spectral_gap(self, r)

    def reconstruct(self) -> np.ndarray:
        return sum(c.value * c.projector for c in self.clusters)


def _clusters_from_eigh(w: np.ndarray, q: np.ndarray, cluster_tol: float) -> tuple[EigenCluster, ...]:
    scale = max(1.0, float(np.abs(w).max()))
    groups: list[list[int]] = [[0]]
    for j in range(1, len(w)):
        if w[groups[-1][-1]] - w[j] <= cluster_tol * scale:
            groups[-1].append(j)
        else:
            groups.append([j])
    clusters = []
    for r, members in enumerate(groups, start=1):
        vecs = _freeze(q[:, members].copy())
        proj = _freeze(vecs @ vecs.T)
        clusters.append(
            EigenCluster(
                index=r,
                value=float(np.mean(w[members])),
                multiplicity=len(members),
                members=tuple(members),
                projector=proj,
                vectors=vecs,
            )
        )
    return tuple(clusters)


def decompose(sigma, cluster_tol: float = CLUSTER_TOL) -> SpectralDecomposition:
    """Group the sorted eigenvalues of ``sigma`` into distinct-eigenvalue clusters.

    Consecutive eigenvalues closer than ``cluster_tol * max(1, ||sigma||)`` are
    merged.  The projector of a cluster is the sum of its rank-one
    eigenprojectors.
    """
    sigma = as_symmetric(sigma)
    w, q = sym_eigh(sigma)
    return SpectralDecomposition(
        operator=sigma,
        eigenvalues=_freeze(w),
        eigenvectors=_freeze(q),
        clusters=_clusters_from_eigh(w, q, cluster_tol),
    )


def decomposition_from_eigenpairs(values, vectors, cluster_tol: float = CLUSTER_TOL) -> SpectralDecomposition:
    """Build a decomposition from known eigenpairs instead of calling the eigensolver.

    ``vectors`` holds orthonormal eigenvectors in its columns; pairs are
    re-sorted into descending order.  Used for models whose eigenbasis is
    known exactly.
    """
    w = np.asarray(values, dtype=np.float64)
    q = np.asarray(vectors, dtype=np.float64)
    if q.ndim != 2 or q.shape[0] != q.shape[1] or q.shape[1] != w.size:
        raise ValueError(f"expected {w.size} eigenvectors of length {w.size}, got shape {q.shape}")
    order = np.argsort(-w, kind="stable")
    w, q = w[order].copy(), q[:, order].copy()
    sigma = as_symmetric((q * w) @ q.T)
    return SpectralDecomposition(
        operator=sigma,
        eigenvalues=_freeze(w),
        eigenvectors=_freeze(q),
        clusters=_clusters_from_eigh(w, q, cluster_tol),
    )


def spectral_gap(dec: SpectralDecomposition, r: int) -> float:
    """The r-th spectral gap ``min(g_{r-1}, g_r)`` (``g_1`` for ``r = 1``).

    At finite dimension the last cluster has no successor; it is taken to be
    a phantom eigenvalue at 0 when ``mu_R > 0``.  Otherwise the last gap is
    simply ``g_{R-1}``.
    """
    mu = dec.values
    R = len(mu)
    dec.cluster(r)
    if r < R:
        g_next = mu[r - 1] - mu[r]
    elif mu[-1] > 0:
        g_next = mu[-1]
    else:
        g_next = None
    g_prev = mu[r - 2] - mu[r - 1] if r >= 2 else None
    candidates = [g for g in (g_prev, g_next) if g is not None]
    if not candidates:
        raise ValueError("single-cluster decomposition at eigenvalue 0 has no gap")
    if r == 1:
        return float(g_next if g_next is not None else g_prev)
    return float(min(candidates))


def reduced_resolvent(dec: SpectralDecomposition, r: int) -> np.ndarray:
    """``C_r = sum_{s != r} P_s / (mu_r - mu_s)``."""
    mu_r = dec.cluster(r).value
    c = np.zeros((dec.dim, dec.dim))
    for s in dec.clusters:
        if s.index != r:
            c += s.projector / (mu_r - s.value)
    return _freeze(c)


def resolvent(sigma, eta: complex, tol: float = RESOLVENT_TOL) -> np.ndarray:
    """``(sigma - eta I)^{-1}`` by a dense LU solve.

    Raises if ``eta`` lies within ``tol * max(1, ||sigma||)`` of the spectrum.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    w = np.linalg.eigvalsh(sigma)
    scale = max(1.0, float(np.abs(w).max()))
    dist = float(np.min(np.abs(w - eta)))
    if dist <= tol * scale:
        raise ValueError(f"eta={eta} is within {dist:.3g} of the spectrum")
    p = sigma.shape[0]
    return np.linalg.solve(sigma - eta * np.eye(p), np.eye(p, dtype=complex))


@dataclass(frozen=True)
class MatchedCluster:
    """Empirical cluster ``P_hat_r`` aggregated over the true positions ``Delta_r``."""

    index: int
    members: tuple[int, ...]
    eigenvalues: np.ndarray
    vectors: np.ndarray = field(repr=False)
    projector: np.ndarray = field(repr=False)
    separated: bool
    norm_E: float
    gap: float


def match_clusters(
    dec_true: SpectralDecomposition,
    sigma_hat,
    clusters: list[int] | None = None,
    empirical: tuple[np.ndarray, np.ndarray] | None = None,
) -> list[MatchedCluster]:
    """Match empirical eigenvectors to true clusters by sorted position.

    ``separated`` records the condition ``||sigma_hat - sigma|| < gap_r / 2``
    under which the matched eigenvalues are guaranteed to sit next to
    ``mu_r`` and away from the rest of the spectrum.  ``empirical`` may carry
    a precomputed ``sym_eigh(sigma_hat)``.
    """
    sigma_hat = as_symmetric(sigma_hat)
    if sigma_hat.shape != dec_true.operator.shape:
        raise ValueError(f"shape mismatch {sigma_hat.shape} vs {dec_true.operator.shape}")
    w, q = empirical if empirical is not None else sym_eigh(sigma_hat)
    norm_E = operator_norm(sigma_hat - dec_true.operator)
    wanted = clusters if clusters is not None else [c.index for c in dec_true.clusters]
    out = []
    for r in wanted:
        c = dec_true.cluster(r)
        members = list(c.members)
        vecs = _freeze(q[:, members].copy())
        try:
            gap = spectral_gap(dec_true, r)
        except ValueError:
            gap = float("nan")
        out.append(
            MatchedCluster(
                index=r,
                members=c.members,
                eigenvalues=_freeze(w[members].copy()),
                vectors=vecs,
                projector=_freeze(vecs @ vecs.T),
                separated=bool(norm_E < gap / 2),
                norm_E=norm_E,
                gap=gap,
            )
        )
    return out


def match_cluster(dec_true: SpectralDecomposition, sigma_hat, r: int, **kw) -> MatchedCluster:
    return match_clusters(dec_true, sigma_hat, clusters=[r], **kw)[0]
