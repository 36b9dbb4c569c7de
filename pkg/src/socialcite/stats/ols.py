"""Ordinary least squares on log10-transformed (predictor, response) pairs."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy import stats as sps


@dataclass(frozen=True)
class OlsFit:
    beta0: float
    beta1: float
    se0: float
    se1: float
    p1: float
    r2: float
    n: int
    n_excluded: int = 0
    cov01: float = 0.0

    def predict(self, x) -> np.ndarray:
        return self.beta0 + self.beta1 * np.asarray(x, dtype=np.float64)

    def predict_se(self, x) -> np.ndarray:
        """Standard error of the fitted mean at ``x``."""
        x = np.asarray(x, dtype=np.float64)
        return np.sqrt(self.se0**2 + x * x * self.se1**2 + 2.0 * x * self.cov01)


def loglog_transform(s, y, log_offset: Optional[float] = None):
    """(log10 s, log10 y, number of pairs dropped).

    Without an offset, pairs with a non-positive value are dropped. With an
    offset ``k`` every value is shifted by ``k`` before taking the logarithm.
    """
    s = np.asarray(s, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if s.shape != y.shape or s.ndim != 1:
        raise ValueError("s and y must be 1-d arrays of equal length")
    if log_offset is not None:
        s = s + log_offset
        y = y + log_offset
    keep = (s > 0) & (y > 0)
    return np.log10(s[keep]), np.log10(y[keep]), int(s.size - keep.sum())


def ols(x, y) -> OlsFit:
    """Simple linear regression y = beta0 + beta1 * x with t-based p-value for beta1."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = x.size
    if n < 3:
        raise ValueError(f"need at least 3 observations, got {n}")
    xm, ym = x.mean(), y.mean()
    xc, yc = x - xm, y - ym
    sxx = xc @ xc
    if not sxx > 0:
        raise ValueError("predictor is constant")
    beta1 = (xc @ yc) / sxx
    beta0 = ym - beta1 * xm
    resid = yc - beta1 * xc
    sse = resid @ resid
    syy = yc @ yc
    sigma2 = sse / (n - 2)
    se1 = np.sqrt(sigma2 / sxx)
    se0 = np.sqrt(sigma2 * (1.0 / n + xm * xm / sxx))
    if se1 > 0:
        p1 = 2.0 * sps.t.sf(abs(beta1) / se1, df=n - 2)
    else:
        p1 = 0.0 if beta1 != 0 else 1.0
    r2 = 1.0 - sse / syy if syy > 0 else 1.0
    return OlsFit(float(beta0), float(beta1), float(se0), float(se1), float(p1),
                  float(min(max(r2, 0.0), 1.0)), int(n), 0, float(-xm * sigma2 / sxx))


def ols_loglog(s, y, log_offset: Optional[float] = None) -> OlsFit:
    """Fit log10 y = beta0 + beta1 * log10 s."""
    lx, ly, dropped = loglog_transform(s, y, log_offset)
    fit = ols(lx, ly)
    return replace(fit, n_excluded=dropped)
