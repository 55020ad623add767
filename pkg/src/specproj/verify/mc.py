"""Monte Carlo replicate loop and the expected-projector oracle."""

from __future__ import annotations

from collections.abc import Callable, Iterator
from dataclasses import dataclass, field

import numpy as np

from ..linalg import operator_norm, sym_eigh
from ..perturbation import linear_term
from ..sampling import CovarianceModel, sample_covariance, sample_gaussian
from ..spectral import spectral_gap

MAX_NONSEPARATED = 0.01


class SeparationError(RuntimeError):
    """Too many replicates violated ``||E|| < gap / 2``."""


@dataclass(frozen=True)
class Replicate:
    """One draw of the empirical operator and its matched cluster."""

    index: int
    sigma_hat: np.ndarray
    E: np.ndarray
    projector: np.ndarray
    vectors: np.ndarray
    eigenvalues: np.ndarray
    norm_E: float
    separated: bool


def replicates(
    model: CovarianceModel,
    r: int,
    n: int,
    R: int,
    seed: int,
    cell: int = 0,
) -> Iterator[Replicate]:
    """Yield ``R`` replicates in index order; replicate ``k`` uses stream ``(seed, cell, k)``."""
    dec = model.ground_truth
    members = list(dec.cluster(r).members)
    gap = spectral_gap(dec, r)
    for k in range(int(R)):
        x = sample_gaussian(model, n, seed, (cell, k))
        sigma_hat = sample_covariance(x)
        E = sigma_hat - model.sigma
        w, q = sym_eigh(sigma_hat)
        vecs = q[:, members]
        norm_E = operator_norm(E)
        yield Replicate(
            index=k,
            sigma_hat=sigma_hat,
            E=E,
            projector=vecs @ vecs.T,
            vectors=vecs,
            eigenvalues=w[members],
            norm_E=norm_E,
            separated=bool(norm_E < gap / 2),
        )


def check_separation(count: int, total: int, limit: float) -> float:
    frac = count / total if total else 0.0
    if frac > limit:
        raise SeparationError(
            f"{count} of {total} replicates ({frac:.1%}) have ||E|| >= gap/2, above the allowed {limit:.1%}"
        )
    return frac


@dataclass(frozen=True)
class BiasReport:
    """Monte Carlo estimate of ``E P_hat_r`` and its bias decomposition.

    ``b`` is ``<(E P_hat - P) theta, theta>`` and ``T_norm`` is
    ``||E P_hat - P - b P||`` (rank-one clusters only; NaN otherwise).
    ``W_estimate`` is the mean of the second-order remainder, and
    ``mean_projector = P + W_estimate``: since ``E L(E) = 0`` this is the
    replicate mean of ``P_hat`` with ``L(E)`` as a control variate.
    ``plain_mean_projector`` is the uncorrected replicate mean.
    """

    r: int
    n: int
    R: int
    mean_projector: np.ndarray = field(repr=False)
    plain_mean_projector: np.ndarray = field(repr=False)
    W_estimate: np.ndarray = field(repr=False)
    b: float
    b_se: float
    T_norm: float
    entry_se: float
    nonseparated_fraction: float

    @property
    def bracket_holds(self) -> bool:
        return -1.0 - self.T_norm <= self.b <= self.T_norm

    def summary(self) -> dict[str, float]:
        return {
            "r": self.r,
            "n": self.n,
            "R": self.R,
            "b": self.b,
            "b_se": self.b_se,
            "T_norm": self.T_norm,
            "entry_se": self.entry_se,
            "mean_projector_norm": operator_norm(self.mean_projector),
            "W_norm": operator_norm(self.W_estimate),
            "nonseparated_fraction": self.nonseparated_fraction,
        }


def mc_expected_projector(
    model: CovarianceModel,
    r: int,
    n: int,
    R: int,
    seed: int,
    cell: int = 0,
    max_nonseparated: float = MAX_NONSEPARATED,
    on_replicate: Callable[[Replicate], None] | None = None,
) -> BiasReport:
    """Average ``P_hat_r`` over ``R`` seeded replicates (running sums, index order).

    Raises ``SeparationError`` when more than ``max_nonseparated`` of the
    replicates break ``||E|| < gap / 2``.  ``on_replicate`` sees every
    replicate, which lets callers collect extra statistics from the same draws.
    """
    if R < 2:
        raise ValueError("need at least two replicates")
    dec = model.ground_truth
    P = dec.projector(r)
    p = dec.dim
    sum_P = np.zeros((p, p))
    sum_S = np.zeros((p, p))
    sum_S2 = np.zeros((p, p))
    rank_one = dec.cluster(r).multiplicity == 1
    theta = dec.eigenvector(r) if rank_one else None
    q_vals = np.empty(R)
    bad = 0
    for rep in replicates(model, r, n, R, seed, cell):
        S = rep.projector - P - linear_term(dec, r, rep.E)
        sum_P += rep.projector
        sum_S += S
        sum_S2 += S**2
        if rank_one:
            q_vals[rep.index] = float(theta @ rep.projector @ theta)
        bad += not rep.separated
        if on_replicate is not None:
            on_replicate(rep)
    frac = check_separation(bad, R, max_nonseparated)
    W = sum_S / R
    mean_P = P + W
    var_S = np.clip(sum_S2 / R - W**2, 0.0, None) * R / (R - 1)
    if rank_one:
        b = float(np.mean(q_vals) - 1.0)
        b_se = float(np.std(q_vals, ddof=1) / np.sqrt(R))
        T_norm = operator_norm(mean_P - P - b * P)
    else:
        b = b_se = T_norm = float("nan")
    return BiasReport(
        r=r,
        n=int(n),
        R=int(R),
        mean_projector=mean_P,
        plain_mean_projector=sum_P / R,
        W_estimate=W,
        b=b,
        b_se=b_se,
        T_norm=T_norm,
        entry_se=float(np.sqrt(var_S.max() / R)),
        nonseparated_fraction=frac,
    )

