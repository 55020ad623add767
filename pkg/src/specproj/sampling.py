"""Covariance models with exact ground truth, Gaussian sampling and sample covariance."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import scipy.linalg

from . import rng
from .linalg import _freeze, as_symmetric
from .spectral import (
    CLUSTER_TOL,
    SpectralDecomposition,
    decompose,
    decomposition_from_eigenpairs,
)

SUBSPACE_TOL = 1e-12


@dataclass(frozen=True)
class CovarianceModel:
    """A covariance operator together with its known spectral decomposition.

    ``eigenvalues[j]`` belongs to the eigenvector ``basis[:, j]``; for spiked
    models the first ``m`` columns of ``basis`` are the spike directions.
    ``spec`` is the JSON-compatible description that rebuilds the model.
    """

    sigma: np.ndarray = field(repr=False)
    ground_truth: SpectralDecomposition = field(repr=False)
    kind: str
    spec: dict[str, Any]
    basis: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.sigma.shape[0]

    @property
    def spike_vectors(self) -> np.ndarray:
        """Eigenvectors of the spikes (``p x m``); empty for non-spiked kinds."""
        m = int(self.spec.get("m", 0)) if self.kind in ("spiked", "truncated") else 0
        return self.basis[:, :m]

    def to_dict(self) -> dict[str, Any]:
        return dict(self.spec)


def _random_rotation(p: int, seed: int) -> np.ndarray:
    g = rng.standard_normal(rng.stream(seed, 0xBA515), (p, p))
    q, r = np.linalg.qr(g)
    return q * np.where(np.diag(r) < 0, -1.0, 1.0)


def _complete_basis(vectors: np.ndarray) -> np.ndarray:
    """Orthonormal p x p frame whose first columns are exactly ``vectors``."""
    p, m = vectors.shape
    gram = vectors.T @ vectors
    if not np.allclose(gram, np.eye(m), atol=1e-10):
        raise ValueError("spike vectors must be orthonormal")
    q, _ = scipy.linalg.qr(vectors, mode="full")
    rest = q[:, m:]
    # drop residual components along the spikes so the frame stays exact
    rest = rest - vectors @ (vectors.T @ rest)
    rest, _ = np.linalg.qr(rest)
    return np.hstack([vectors, rest])


def _build(kind: str, spec: dict, eigenvalues: np.ndarray, basis: np.ndarray, cluster_tol: float) -> CovarianceModel:
    basis = _freeze(np.array(basis, dtype=np.float64))
    eigenvalues = _freeze(np.array(eigenvalues, dtype=np.float64))
    dec = decomposition_from_eigenpairs(eigenvalues, basis, cluster_tol)
    return CovarianceModel(
        sigma=dec.operator,
        ground_truth=dec,
        kind=kind,
        spec=spec,
        basis=basis,
        eigenvalues=eigenvalues,
    )


def sparse_spike_vector(p: int, k: int) -> np.ndarray:
    """Unit vector with ``k`` leading entries equal to ``1/sqrt(k)``."""
    if not 1 <= k <= p:
        raise ValueError(f"sparsity k={k} must lie in 1..{p}")
    v = np.zeros(p)
    v[:k] = 1.0 / np.sqrt(k)
    return v


def spiked_model(
    s,
    sigma: float,
    p: int,
    basis_seed: int | None = None,
    sparse_k: int | None = None,
    cluster_tol: float = CLUSTER_TOL,
) -> CovarianceModel:
    """``sum_j (s_j^2 + sigma^2) theta_j theta_j^T + sigma^2 (I - sum_j theta_j theta_j^T)``.

    ``m = len(s)``.  Spike directions are the first ``m`` basis vectors: the
    identity frame, a seeded random rotation (``basis_seed``), or, with
    ``sparse_k``, a frame whose first column is ``sparse_spike_vector(p, k)``
    (only for ``m = 1``).
    """
    s = np.atleast_1d(np.asarray(s, dtype=np.float64))
    m = s.size
    p = int(p)
    if m == 0:
        raise ValueError("at least one spike is required")
    if not np.all(s > 0):
        raise ValueError("spike strengths must be positive")
    if np.any(np.diff(s) >= 0):
        raise ValueError(f"spikes must be strictly decreasing (distinct), got {s.tolist()}")
    if m >= p:
        raise ValueError(f"number of spikes m={m} must be < p={p}")
    if not sigma > 0:
        raise ValueError(f"noise level sigma must be > 0, got {sigma}")
    if sparse_k is not None and basis_seed is not None:
        raise ValueError("sparse_k and basis_seed are mutually exclusive")

    if sparse_k is not None:
        if m != 1:
            raise ValueError("sparse_k supports a single spike only")
        basis = _complete_basis(sparse_spike_vector(p, int(sparse_k))[:, None])
    elif basis_seed is not None:
        basis = _random_rotation(p, int(basis_seed))
    else:
        basis = np.eye(p)
    eig = np.full(p, float(sigma) ** 2)
    eig[:m] = s**2 + float(sigma) ** 2
    spec = {
        "kind": "spiked",
        "s": s.tolist(),
        "sigma": float(sigma),
        "p": p,
        "m": m,
        "basis_seed": basis_seed,
        "sparse_k": sparse_k,
    }
    return _build("spiked", spec, eig, basis, cluster_tol)


def explicit_spectrum_model(
    values,
    multiplicities,
    basis_seed: int | None = None,
    cluster_tol: float = CLUSTER_TOL,
) -> CovarianceModel:
    values = np.asarray(values, dtype=np.float64)
    mult = np.asarray(multiplicities, dtype=np.int64)
    if values.ndim != 1 or values.shape != mult.shape or values.size == 0:
        raise ValueError("values and multiplicities must be non-empty and of equal length")
    if np.any(mult < 1):
        raise ValueError("multiplicities must be >= 1")
    if np.any(values < 0):
        raise ValueError("covariance eigenvalues must be non-negative")
    if np.any(np.diff(values) >= 0):
        raise ValueError("distinct values must be strictly decreasing")
    eig = np.repeat(values, mult)
    p = eig.size
    basis = _random_rotation(p, int(basis_seed)) if basis_seed is not None else np.eye(p)
    spec = {
        "kind": "explicit",
        "values": values.tolist(),
        "multiplicities": mult.tolist(),
        "basis_seed": basis_seed,
    }
    return _build("explicit", spec, eig, basis, cluster_tol)


def truncated_model(base: CovarianceModel, q: int, cluster_tol: float = CLUSTER_TOL) -> CovarianceModel:
    """Compress ``base`` to the span of the first ``q`` coordinate directions.

    The signal eigenspaces (spikes, or every cluster but the lowest for
    explicit spectra) must lie inside that span.
    """
    p = base.dim
    q = int(q)
    if not 1 <= q <= p:
        raise ValueError(f"subspace dimension q={q} must lie in 1..{p}")
    if base.kind in ("spiked", "truncated"):
        signal = base.spike_vectors
    else:
        bottom = base.ground_truth.clusters[-1].members
        keep = [j for j in range(p) if j not in set(bottom)]
        signal = base.ground_truth.eigenvectors[:, keep]
    if signal.size and np.abs(signal[q:]).max(initial=0.0) > SUBSPACE_TOL:
        raise ValueError(f"signal eigenvectors have components outside the first {q} coordinates")

    sigma_q = as_symmetric(base.sigma[:q, :q])
    spec = {"kind": "truncated", "base": base.to_dict(), "q": q}
    if "m" in base.spec:
        spec["m"] = base.spec["m"]
    if signal.size:
        # signal eigenvectors survive the compression; the complement inside
        # the subspace carries the bottom eigenvalue
        vectors = _complete_basis(np.ascontiguousarray(signal[:q]))
        eig = np.einsum("ij,ik,kj->j", vectors, sigma_q, vectors)
        dec = decomposition_from_eigenpairs(eig, vectors, cluster_tol)
    else:
        dec = decompose(sigma_q, cluster_tol)
        vectors, eig = dec.eigenvectors, dec.eigenvalues
    return CovarianceModel(
        sigma=sigma_q,
        ground_truth=dec,
        kind="truncated",
        spec=spec,
        basis=_freeze(np.array(vectors)),
        eigenvalues=_freeze(np.array(eig)),
    )


def model_from_spec(spec: dict[str, Any], cluster_tol: float = CLUSTER_TOL) -> CovarianceModel:
    """Rebuild a model from its ``to_dict()`` description."""
    spec = dict(spec)
    kind = spec.pop("kind", None)
    if kind == "spiked":
        spec.pop("m", None)
        return spiked_model(cluster_tol=cluster_tol, **spec)
    if kind == "explicit":
        return explicit_spectrum_model(cluster_tol=cluster_tol, **spec)
    if kind == "truncated":
        spec.pop("m", None)
        return truncated_model(model_from_spec(spec["base"], cluster_tol), spec["q"], cluster_tol)
    raise ValueError(f"unknown model kind {kind!r}")


@dataclass(frozen=True)
class SampleSet:
    n: int
    vectors: np.ndarray = field(repr=False)
    seed: int
    replicate: tuple[int, ...]
    model: CovarianceModel | None = field(default=None, repr=False)

    def halves(self) -> tuple["SampleSet", "SampleSet"]:
        if self.n % 2:
            raise ValueError(f"sample count {self.n} is odd; cannot split evenly")
        h = self.n // 2
        return (
            SampleSet(h, self.vectors[:h], self.seed, self.replicate, self.model),
            SampleSet(h, self.vectors[h:], self.seed, self.replicate, self.model),
        )

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            for row in self.vectors:
                writer.writerow([repr(float(x)) for x in row])


def sample_gaussian(model: CovarianceModel, n: int, seed: int, replicate: int | tuple[int, ...] = 0) -> SampleSet:
    """``n`` i.i.d. centred Gaussian vectors with covariance ``model.sigma``.

    Row ``i`` is ``Q diag(sqrt(lambda)) z_i`` with ``z_i`` standard normal
    drawn from the stream ``(seed, *replicate)``.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"sample size n must be >= 1, got {n}")
    keys = (replicate,) if isinstance(replicate, (int, np.integer)) else tuple(replicate)
    z = rng.standard_normal(rng.stream(seed, *keys), (n, model.dim))
    z *= np.sqrt(np.clip(model.eigenvalues, 0.0, None))
    x = z if _is_identity(model.basis) else z @ model.basis.T
    return SampleSet(n=n, vectors=_freeze(x), seed=int(seed), replicate=tuple(int(k) for k in keys), model=model)


def _is_identity(q: np.ndarray) -> bool:
    return bool(np.array_equal(q, np.eye(q.shape[0])))


def sample_covariance(samples: SampleSet | np.ndarray) -> np.ndarray:
    """Uncentred second-moment matrix ``X^T X / n``."""
    x = samples.vectors if isinstance(samples, SampleSet) else np.asarray(samples, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1:
        raise ValueError("need at least one sample row")
    return as_symmetric(x.T @ x / x.shape[0])
