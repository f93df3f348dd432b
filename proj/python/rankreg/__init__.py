"""Regressions involving ranks, with standard errors that account for the
estimation of the ranks themselves."""

from ._rankreg import (
    AssumptionViolation,
    CalibrationFailure,
    Dataset,
    DegenerateInput,
    FitResult,
    InferenceReport,
    RankregError,
    ResamplingFailure,
    SingularDesign,
    bootstrap,
    calibrate_parameter,
    coverage_experiment,
    ecdf,
    ecdf_left,
    fit,
    influence,
    lemma2_closed_forms,
    mobility_theta,
    naive_ew_variance,
    naive_hom_variance,
    omega_sweep,
    plugin_inference,
    population_rank_correlation,
    rank_transform,
    sample_copula,
    spearman,
    variance_triple_mc,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
