"""Empirical spectral projectors of sample covariance operators.

Exact perturbation identities, Monte Carlo checks of their fluctuations and
bias, and split-sample eigenvector estimation with support recovery.
"""

__version__ = "0.1.0"

from .linalg import effective_rank, operator_norm, sym_eigh
from .spectral import SpectralDecomposition, decompose, reduced_resolvent, spectral_gap
from .perturbation import (
    ContourSpec,
    linear_term,
    perturbation_bounds,
    perturbation_decomposition,
    riesz_projector,
)
from .sampling import CovarianceModel, sample_covariance, sample_gaussian, spiked_model
from .estimation import (
    align_sign,
    debiased_eigenvector,
    estimate_bias_split,
    recover_support,
    sparse_pca_estimate,
    threshold_level,
)

__all__ = [
    "ContourSpec",
    "CovarianceModel",
    "SpectralDecomposition",
    "align_sign",
    "debiased_eigenvector",
    "decompose",
    "effective_rank",
    "estimate_bias_split",
    "linear_term",
    "operator_norm",
    "perturbation_bounds",
    "perturbation_decomposition",
    "recover_support",
    "reduced_resolvent",
    "riesz_projector",
    "sample_covariance",
    "sample_gaussian",
    "sparse_pca_estimate",
    "spectral_gap",
    "spiked_model",
    "sym_eigh",
    "threshold_level",
]
