"""Covariance formulas, Monte Carlo oracles and seeded verification experiments."""

from .experiments import (
    calibrate_threshold_constant,
    chi2_mean_abs_deviation,
    loglog_fit,
    run_bias_estimator_experiment,
    run_bias_experiment,
    run_clt_experiment,
    run_operator_norm_experiment,
    run_remainder_concentration_experiment,
    run_risk_experiment,
    run_support_recovery_experiment,
)
from .gamma import gamma1, gamma2, gamma_covariance, xi_samples
from .ks import ks_statistic
from .mc import BiasReport, SeparationError, mc_expected_projector
from .report import ExperimentReport, Verdict, combine
from .risk import spiked_risk_prediction

__all__ = [
    "BiasReport",
    "ExperimentReport",
    "SeparationError",
    "Verdict",
    "calibrate_threshold_constant",
    "chi2_mean_abs_deviation",
    "combine",
    "gamma1",
    "gamma2",
    "gamma_covariance",
    "ks_statistic",
    "loglog_fit",
    "mc_expected_projector",
    "run_bias_estimator_experiment",
    "run_bias_experiment",
    "run_clt_experiment",
    "run_operator_norm_experiment",
    "run_remainder_concentration_experiment",
    "run_risk_experiment",
    "run_support_recovery_experiment",
    "spiked_risk_prediction",
    "xi_samples",
]
