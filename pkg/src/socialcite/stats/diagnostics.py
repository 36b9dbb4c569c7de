"""Residual diagnostics for the log-log regressions: QQ data and Tukey-Anscombe bins."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import stats as sps

from .ols import OlsFit, loglog_transform

MAX_QQ_POINTS = 99
TA_BINS = 20


@dataclass(frozen=True)
class DiagnosticData:
    qq: np.ndarray = field(repr=False)  # (m, 2): theoretical, observed
    ta_bins: np.ndarray = field(repr=False)  # (k, 4): fitted center, mean, std, count
    lower_tail_flag: bool = False

    @property
    def max_qq_deviation(self) -> float:
        return float(np.max(np.abs(self.qq[:, 1] - self.qq[:, 0])))


def qq_points(resid: np.ndarray) -> np.ndarray:
    """Residual quantiles against a normal with the residuals' mean and std.

    Uses min(n, 99) plotting positions k / (m + 1).
    """
    m = min(resid.size, MAX_QQ_POINTS)
    probs = np.arange(1, m + 1) / (m + 1)
    sd = resid.std(ddof=1) if resid.size > 1 else 0.0
    theo = resid.mean() + sd * sps.norm.ppf(probs)
    obs = np.quantile(resid, probs)
    return np.column_stack([theo, obs])


def lower_tail_plateau(qq: np.ndarray, ratio: float = 3.0) -> bool:
    """True when the lowest observed quantile stretches over most of the lower tail.

    Compares how far the lowest point lies below the median on each axis:
    flags when the theoretical distance exceeds ``ratio`` times the observed
    one, i.e. the observed lower half is squashed against its minimum.
    """
    if qq.shape[0] < 3:
        return False
    mid = qq.shape[0] // 2
    theo_span = qq[mid, 0] - qq[0, 0]
    obs_span = qq[mid, 1] - qq[0, 1]
    return bool(theo_span > ratio * obs_span)


def tukey_anscombe(fitted: np.ndarray, resid: np.ndarray, n_bins: int = TA_BINS) -> np.ndarray:
    """Equal-count bins of fitted values with residual mean, std and count per bin."""
    k = max(1, min(n_bins, fitted.size))
    order = np.argsort(fitted, kind="stable")
    rows = []
    for idx in np.array_split(order, k):
        r = resid[idx]
        rows.append((fitted[idx].mean(), r.mean(), r.std(), idx.size))
    return np.array(rows, dtype=np.float64)


def diagnostics(fit: OlsFit, s, y, log_offset: Optional[float] = None) -> DiagnosticData:
    x, ly, _ = loglog_transform(s, y, log_offset)
    if x.size == 0:
        raise ValueError("no observations")
    fitted = fit.predict(x)
    resid = ly - fitted
    qq = qq_points(resid)
    return DiagnosticData(qq, tukey_anscombe(fitted, resid), lower_tail_plateau(qq))
