"""Nullspace-based interpretation of high-dimensional linear regression coefficients.

Fit several linear estimators to the same wide data matrix, then ask how far
one coefficient vector can be moved toward another without changing the
predictions on the training data (beyond a tolerance).
"""

from .errors import (
    ConfigError,
    CsvParseError,
    DegenerateColumnError,
    EarlyTerminationError,
    InputError,
    NotConvergedError,
    NullspaceError,
    NumericalError,
    ProvenanceError,
)
from .linalg import SvdFactors, svd_factor
from .modelselect import CvResult, EvalReport, SubsetRule, cross_validate, evaluate, fit_cv
from .nullspace import (
    GammaSearch,
    NullspaceComparison,
    compare,
    nrmse,
    project_nullspace,
    relaxed_nullspace,
    select_gamma,
)
from .preprocess import (
    Dataset,
    PreprocessState,
    apply_preprocess,
    fit_preprocess,
    invert_preprocess,
    snr_profile,
)
from .regress import (
    CoefficientVector,
    PenaltyMatrix,
    SolverConfig,
    fit_fused_lasso,
    fit_generalized_lasso,
    fit_method,
    fit_min_norm,
    fit_pcr,
    fit_pls,
    fit_ridge,
    orthogonality_defect,
    predict,
)
from .synthdata import ParabolicSpec, SyntheticResponseSpec, attach_synthetic_response, gen_parabolic

__version__ = "0.1.0"

__all__ = [
    "CoefficientVector", "ConfigError", "CsvParseError", "CvResult", "Dataset", "DegenerateColumnError",
    "EarlyTerminationError", "EvalReport", "GammaSearch", "InputError", "NotConvergedError",
    "NullspaceComparison", "NullspaceError", "NumericalError", "ParabolicSpec", "PenaltyMatrix",
    "PreprocessState", "ProvenanceError", "SolverConfig", "SubsetRule", "SvdFactors",
    "SyntheticResponseSpec", "apply_preprocess", "attach_synthetic_response", "compare", "cross_validate",
    "evaluate", "fit_cv", "fit_fused_lasso", "fit_generalized_lasso", "fit_method", "fit_min_norm",
    "fit_pcr", "fit_pls", "fit_preprocess", "fit_ridge", "gen_parabolic", "invert_preprocess", "nrmse",
    "orthogonality_defect", "predict", "project_nullspace", "relaxed_nullspace", "select_gamma",
    "snr_profile", "svd_factor",
]
