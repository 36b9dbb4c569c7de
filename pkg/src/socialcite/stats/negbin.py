"""Poisson and NB2 count regressions with a log link and a single predictor.

The NB2 fit alternates IRLS for the coefficients at fixed dispersion ``theta``
with a one-dimensional maximum-likelihood update of ``theta``, in the manner
of MASS::glm.nb. Variance model: ``Var = mu + mu**2 / theta``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize
from scipy import stats as sps
from scipy.special import gammaln

log = logging.getLogger(__name__)

THETA_MIN = 1e-6
THETA_MAX = 1e8


class ConvergenceError(RuntimeError):
    pass


def _design(s) -> np.ndarray:
    s = np.asarray(s, dtype=np.float64)
    return np.column_stack([np.ones_like(s), s])


def _counts(y) -> np.ndarray:
    y = np.asarray(y)
    yi = np.rint(y).astype(np.int64)
    if np.any(yi < 0) or not np.allclose(y, yi):
        raise ValueError("response must be non-negative integers")
    return yi


@dataclass(frozen=True)
class PoissonFit:
    alpha: float
    beta: float
    se_alpha: float
    se_beta: float
    loglik: float
    converged: bool
    n: int
    mu: np.ndarray = field(repr=False)
    cov: np.ndarray = field(repr=False)


def _irls(X, y, weight_fn, coef, max_iter=100, tol=1e-10):
    """Log-link IRLS; ``weight_fn(mu)`` gives the working weights."""
    eta = X @ coef
    mu = np.exp(eta)
    converged = False
    for _ in range(max_iter):
        w = weight_fn(mu)
        z = eta + (y - mu) / mu
        xtw = X.T * w
        new = np.linalg.solve(xtw @ X, xtw @ z)
        step = np.max(np.abs(new - coef))
        coef = new
        eta = X @ coef
        mu = np.exp(eta)
        if step < tol * (1.0 + np.max(np.abs(coef))):
            converged = True
            break
    w = weight_fn(mu)
    cov = np.linalg.inv((X.T * w) @ X)
    return coef, mu, cov, converged


def _start(y) -> np.ndarray:
    return np.array([np.log(max(y.mean(), 1e-8)), 0.0])


def poisson_glm(s, y, max_iter: int = 100) -> PoissonFit:
    """Poisson regression log(mu) = alpha + beta * s by IRLS."""
    X = _design(s)
    y = _counts(y).astype(np.float64)
    if y.size < 2:
        raise ValueError("need at least 2 observations")
    if not y.any():
        raise ValueError("response is all zero")
    coef, mu, cov, converged = _irls(X, y, lambda m: m, _start(y), max_iter)
    ll = float(np.sum(y * np.log(mu) - mu - gammaln(y + 1)))
    se = np.sqrt(np.diag(cov))
    return PoissonFit(float(coef[0]), float(coef[1]), float(se[0]), float(se[1]), ll,
                      converged, int(y.size), mu, cov)


# -- NB2 likelihood pieces ----------------------------------------------------


class _CountTable:
    """Stable evaluation of lgamma(y + theta) - lgamma(theta) and its derivative
    for integer y, as finite sums over k < y."""

    def __init__(self, y: np.ndarray):
        self.y = y
        self.ymax = int(y.max())
        self.k = np.arange(self.ymax, dtype=np.float64)

    def _cum(self, terms):
        cum = np.concatenate([[0.0], np.cumsum(terms)])
        return cum[self.y]

    def lgamma_ratio(self, theta):
        return self._cum(np.log(theta + self.k))

    def digamma_diff(self, theta):
        return self._cum(1.0 / (theta + self.k))


def nb_loglik(y, mu, theta, table: _CountTable | None = None) -> float:
    y = np.asarray(y)
    table = table or _CountTable(y)
    return float(
        np.sum(
            table.lgamma_ratio(theta)
            - gammaln(y + 1.0)
            - theta * np.log1p(mu / theta)
            + y * (np.log(mu) - np.log(theta + mu))
        )
    )


def _theta_score(theta, y, mu, table):
    return float(np.sum(table.digamma_diff(theta) - np.log1p(mu / theta) + (mu - y) / (theta + mu)))


def theta_ml(y, mu, table: _CountTable | None = None) -> float:
    """Maximum-likelihood dispersion for fixed means; clipped to [THETA_MIN, THETA_MAX]."""
    table = table or _CountTable(np.asarray(y))
    score = lambda lt: _theta_score(np.exp(lt), y, mu, table)  # noqa: E731
    lo, hi = np.log(THETA_MIN), np.log(THETA_MAX)
    s_lo, s_hi = score(lo), score(hi)
    if s_hi >= 0:
        return THETA_MAX
    if s_lo <= 0:
        return THETA_MIN
    return float(np.exp(optimize.brentq(score, lo, hi, xtol=1e-12, rtol=1e-12)))


@dataclass(frozen=True)
class NbFit:
    alpha: float
    beta: float
    theta: float
    se_alpha: float
    se_beta: float
    p_beta: float
    loglik: float
    converged: bool
    n: int
    n_iter: int = 0
    cov: np.ndarray = field(default=None, repr=False)

    def linear_predictor_se(self, s) -> np.ndarray:
        X = _design(np.atleast_1d(s))
        return np.sqrt(np.einsum("ij,jk,ik->i", X, self.cov, X))


def nb_regress(s, y, max_outer: int = 100, tol: float = 1e-8) -> NbFit:
    """Maximum-likelihood NB2 regression log(mu) = alpha + beta * s.

    Returns the last iterate with ``converged=False`` if the joint
    log-likelihood has not stabilized within ``max_outer`` alternations.
    """
    X = _design(s)
    yi = _counts(y)
    if yi.size < 10:
        raise ValueError(f"need at least 10 observations, got {yi.size}")
    if not yi.any():
        raise ValueError("response is all zero")
    y = yi.astype(np.float64)
    table = _CountTable(yi)

    pois = poisson_glm(s, yi)
    coef = np.array([pois.alpha, pois.beta])
    mu = pois.mu
    theta = theta_ml(yi, mu, table)
    ll = nb_loglik(yi, mu, theta, table)
    converged = False
    n_iter = 0
    for n_iter in range(1, max_outer + 1):
        th = theta
        coef, mu, cov, inner_ok = _irls(X, y, lambda m: m / (1.0 + m / th), coef)
        theta = theta_ml(yi, mu, table)
        ll_new = nb_loglik(yi, mu, theta, table)
        delta = abs(ll_new - ll)
        ll = ll_new
        if delta < tol and inner_ok:
            converged = True
            break
    cov = np.linalg.inv((X.T * (mu / (1.0 + mu / theta))) @ X)
    se = np.sqrt(np.diag(cov))
    p_beta = float(2.0 * sps.norm.sf(abs(coef[1]) / se[1])) if se[1] > 0 else float("nan")
    if not converged:
        log.warning("NB regression did not converge after %d iterations", n_iter)
    return NbFit(float(coef[0]), float(coef[1]), float(theta), float(se[0]), float(se[1]),
                 p_beta, ll, converged, int(y.size), n_iter, cov)


@dataclass(frozen=True)
class PredictionBand:
    s: np.ndarray
    mu: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    level: float

    def rows(self):
        return list(zip(self.s.tolist(), self.mu.tolist(), self.lower.tolist(), self.upper.tolist()))


def nb_predict_band(fit: NbFit, s_grid, level: float = 0.95) -> PredictionBand:
    """Mean response exp(alpha + beta*s) with a Wald band on the linear predictor."""
    if not fit.converged:
        raise ConvergenceError("cannot build a band from an unconverged fit")
    s_grid = np.asarray(s_grid, dtype=np.float64)
    eta = fit.alpha + fit.beta * s_grid
    half = sps.norm.ppf(0.5 + level / 2.0) * fit.linear_predictor_se(s_grid)
    return PredictionBand(s_grid, np.exp(eta), np.exp(eta - half), np.exp(eta + half), level)
