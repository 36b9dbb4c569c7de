"""Regression and testing toolbox for the peak-delay and lifetime analyses."""

from ._format import format_p, stars
from .diagnostics import DiagnosticData, diagnostics
from .dispersion import DispersionTestResult, overdispersion_test
from .negbin import (
    ConvergenceError,
    NbFit,
    PoissonFit,
    PredictionBand,
    nb_predict_band,
    nb_regress,
    poisson_glm,
)
from .ols import OlsFit, loglog_transform, ols, ols_loglog
from .permutation import PermutationResult, permutation_test

__all__ = [
    "ConvergenceError",
    "DiagnosticData",
    "DispersionTestResult",
    "NbFit",
    "OlsFit",
    "PermutationResult",
    "PoissonFit",
    "PredictionBand",
    "diagnostics",
    "format_p",
    "loglog_transform",
    "nb_predict_band",
    "nb_regress",
    "ols",
    "ols_loglog",
    "overdispersion_test",
    "permutation_test",
    "poisson_glm",
    "stars",
]
