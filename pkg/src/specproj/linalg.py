"""Dense symmetric linear algebra primitives.

Operators are plain ``float64`` numpy arrays of shape ``(p, p)``; vectors are
1-d arrays of length ``p``.  Constructors return read-only arrays so values
behave as immutable once built.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

SYM_TOL = 1e-12


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def as_symmetric(a) -> np.ndarray:
    """Validate ``a`` as a finite square matrix and return ``(a + a.T) / 2``.

    Asymmetry is removed rather than rejected: sample covariances pick up
    rounding asymmetry, and the symmetric part is what every caller wants.
    The result is exactly symmetric, well inside ``SYM_TOL``.
    """
    a = np.array(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return _freeze((a + a.T) / 2.0)


def is_symmetric(a: np.ndarray, sym_tol: float = SYM_TOL) -> bool:
    a = np.asarray(a)
    scale = max(1.0, float(np.abs(a).max()))
    return bool(np.abs(a - a.T).max() <= sym_tol * scale)


def as_vector(u, dim: int | None = None) -> np.ndarray:
    u = np.array(u, dtype=np.float64).reshape(-1)
    if u.size == 0:
        raise ValueError("empty vector")
    if not np.all(np.isfinite(u)):
        raise ValueError("vector has non-finite coordinates")
    if dim is not None and u.size != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {u.size}")
    return u


def sym_eigh(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues in descending order (with multiplicity) and matching eigenvectors.

    Columns of the returned matrix are orthonormal eigenvectors.  LAPACK
    non-convergence surfaces as ``numpy.linalg.LinAlgError``.
    """
    w, q = np.linalg.eigh(a)
    return w[::-1].copy(), q[:, ::-1].copy()


def operator_norm(a: np.ndarray) -> float:
    """Largest absolute eigenvalue of a symmetric matrix."""
    w = np.linalg.eigvalsh(a)
    return float(max(abs(w[0]), abs(w[-1])))


def trace(a: np.ndarray) -> float:
    return float(np.trace(a))


def hs_norm(a: np.ndarray) -> float:
    """Hilbert-Schmidt (Frobenius) norm."""
    return float(np.sqrt(np.sum(np.asarray(a) ** 2)))


def effective_rank(sigma: np.ndarray) -> float:
    """``tr(sigma) / ||sigma||``; requires a nonzero positive semi-definite input."""
    norm = operator_norm(sigma)
    if norm == 0.0:
        raise ValueError("effective rank of the zero operator is undefined")
    return trace(sigma) / norm


def tensor_product(u, v) -> np.ndarray:
    """The operator ``x -> <v, x> u`` as a (generally non-symmetric) matrix."""
    u = as_vector(u)
    v = as_vector(v)
    if u.size != v.size:
        raise ValueError(f"dimension mismatch: {u.size} vs {v.size}")
    return np.outer(u, v)


def sup_norm(u) -> float:
    u = np.asarray(u, dtype=np.float64)
    return float(np.abs(u).max()) if u.size else 0.0


def read_csv_matrix(path: str | Path) -> np.ndarray:
    """Read a header-less numeric CSV; ragged rows are rejected."""
    rows: list[list[float]] = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                rows.append([float(c) for c in row])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: non-numeric entry ({exc})") from None
            if len(rows[-1]) != len(rows[0]):
                raise ValueError(
                    f"{path}:{lineno}: ragged row with {len(rows[-1])} columns, "
                    f"expected {len(rows[0])}"
                )
    if not rows:
        raise ValueError(f"{path}: no data")
    return np.array(rows, dtype=np.float64)


def write_csv_matrix(path: str | Path, a) -> None:
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in a:
            writer.writerow([repr(float(x)) for x in row])
