"""Regression-based test of Poisson equidispersion against overdispersion."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from .negbin import poisson_glm


@dataclass(frozen=True)
class DispersionTestResult:
    z_statistic: float
    p_value: float
    alpha_hat: float
    variant: str = "constant"


def overdispersion_test(s, y, variant: str = "constant") -> DispersionTestResult:
    """One-sided test of Var[y|s] = E[y|s] after a Poisson fit.

    ``variant="constant"`` tests Var = (1 + a) * mu by regressing
    ((y - mu)^2 - y) / mu on a constant. ``variant="linear"`` tests
    Var = mu + a * mu^2 by regressing the same quantity on mu without intercept.
    """
    y = np.asarray(y, dtype=np.float64)
    if y.size < 10:
        raise ValueError(f"need at least 10 observations, got {y.size}")
    mu = poisson_glm(s, y).mu
    aux = ((y - mu) ** 2 - y) / mu
    n = y.size
    if variant == "constant":
        coef = aux.mean()
        se = aux.std(ddof=1) / np.sqrt(n)
    elif variant == "linear":
        smm = mu @ mu
        coef = (aux @ mu) / smm
        resid = aux - coef * mu
        se = np.sqrt((resid @ resid) / (n - 1) / smm)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    if se > 0:
        z = coef / se
    else:
        z = np.copysign(np.inf, coef) if coef != 0 else 0.0
    return DispersionTestResult(float(z), float(sps.norm.sf(z)), float(coef), variant)
