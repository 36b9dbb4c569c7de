"""Citation histories: binned citation rates, peak delay and exponential decay lifetime."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field, replace
from datetime import date
from typing import Iterable, Optional, Sequence

import numpy as np

from .network import TwoLayerNetwork

DAYS_PER_YEAR = 365.25


class HistoryError(ValueError):
    """Base class for histories that cannot be parametrized."""


class UnusableHistoryError(HistoryError):
    """The paper was never cited within the horizon (maximum rate is zero)."""


class InsufficientDataError(HistoryError):
    """Too few positive bins from the peak onwards to fit a decay."""


class NonDecayingError(HistoryError):
    """The log-rate slope after the peak is not negative."""


class ScaleKind(enum.Enum):
    YEARS = "years"
    PUBS = "pubs"


@dataclass(frozen=True)
class TimeScale:
    kind: ScaleKind = ScaleKind.YEARS
    bin_width: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ScaleKind(self.kind))
        if not self.bin_width > 0:
            raise ValueError("bin_width must be positive")

    @property
    def label(self) -> str:
        return self.kind.value


def default_pubs_bin_width(network: TwoLayerNetwork) -> float:
    """Papers per year over the corpus span, so both timescales give similar bin counts."""
    span_years = (network.paper_date[-1] - network.paper_date[0]) / DAYS_PER_YEAR
    if span_years <= 0:
        return 1.0
    return network.n_papers / span_years


@dataclass(frozen=True)
class CitationHistory:
    """Citation rate per bin (citations per unit time), bin ``b`` covering
    ``[b * width, (b + 1) * width)`` after publication.

    The final bin may be cut short by the horizon; ``last_bin_fraction`` is
    the fraction of it that was observed.
    """

    paper_id: str
    delta_i: date
    scale: TimeScale
    rates: np.ndarray
    last_bin_fraction: float = 1.0

    @property
    def bin_width(self) -> float:
        return self.scale.bin_width

    @property
    def n_bins(self) -> int:
        return int(self.rates.size)

    @property
    def n_complete(self) -> int:
        return self.n_bins if self.last_bin_fraction >= 1.0 else self.n_bins - 1

    @property
    def c_max(self) -> float:
        return float(self.rates.max()) if self.rates.size else 0.0

    @property
    def usable(self) -> bool:
        return self.c_max > 0

    @property
    def total(self) -> float:
        return float(self.rates.sum() * self.bin_width)

    def complete(self) -> "CitationHistory":
        """The same history without a partially observed final bin."""
        return replace(self, rates=self.rates[: self.n_complete], last_bin_fraction=1.0)


def _as_rates(history) -> tuple[np.ndarray, float]:
    if isinstance(history, CitationHistory):
        return history.rates, history.bin_width
    return np.asarray(history, dtype=np.float64), 1.0


def elapsed_since(network: TwoLayerNetwork, delta_i: int, dates: np.ndarray, scale: TimeScale) -> np.ndarray:
    """Elapsed time from ``delta_i`` to each date ordinal, in the scale's units."""
    dates = np.asarray(dates, dtype=np.int64)
    if scale.kind is ScaleKind.YEARS:
        return (dates - delta_i) / DAYS_PER_YEAR
    # number of corpus papers published in (delta_i, d]
    base = np.searchsorted(network.paper_date, delta_i, side="right")
    return (np.searchsorted(network.paper_date, dates, side="right") - base).astype(np.float64)


def compute_history(
    network: TwoLayerNetwork, paper_id: str, scale: TimeScale, horizon: date
) -> CitationHistory:
    """Bin the citations of ``paper_id`` received up to and including ``horizon``."""
    i = network.paper(paper_id)
    d0 = int(network.paper_date[i])
    h = horizon.toordinal()
    if h < d0:
        raise ValueError(f"horizon {horizon} precedes publication of {paper_id!r}")
    citing = network.citing_dates(i)
    citing = citing[citing <= h]
    span = float(elapsed_since(network, d0, np.array([h]), scale)[0]) / scale.bin_width
    n_bins = int(math.floor(span)) + 1
    elapsed = elapsed_since(network, d0, citing, scale) / scale.bin_width
    bins = np.minimum(np.floor(elapsed).astype(np.int64), n_bins - 1)
    counts = np.bincount(bins, minlength=n_bins).astype(np.float64)
    return CitationHistory(
        paper_id=paper_id,
        delta_i=date.fromordinal(d0),
        scale=scale,
        rates=counts / scale.bin_width,
        last_bin_fraction=span - math.floor(span),
    )


def normalize(history) -> np.ndarray:
    """Rates divided by their maximum."""
    rates, _ = _as_rates(history)
    c_max = rates.max() if rates.size else 0.0
    if not c_max > 0:
        raise UnusableHistoryError("history has no citations (maximum rate is zero)")
    return rates / c_max


def peak_delay(history) -> int:
    """Index of the first bin attaining the maximum rate."""
    rates, _ = _as_rates(history)
    if not rates.size or not rates.max() > 0:
        raise UnusableHistoryError("history has no citations (maximum rate is zero)")
    return int(np.argmax(rates))


@dataclass(frozen=True)
class DecayFit:
    tau: float
    slope: float
    r2: float
    n_points: int


def fit_decay(history, min_positive_bins: int = 3) -> DecayFit:
    """Least-squares line through (t, ln ĉ(t)) from the peak bin on, skipping empty bins.

    ``t`` is in the history's time units, so ``tau = -1 / slope`` is too.
    """
    rates, width = _as_rates(history)
    norm = normalize(rates)
    start = peak_delay(rates)
    t = np.arange(start, rates.size, dtype=np.float64) * width
    c = norm[start:]
    keep = c > 0
    t, c = t[keep], c[keep]
    if t.size < max(min_positive_bins, 2):
        raise InsufficientDataError(
            f"{t.size} positive bins from the peak on, need {max(min_positive_bins, 2)}"
        )
    y = np.log(c)
    tc = t - t.mean()
    yc = y - y.mean()
    sxx = tc @ tc
    slope = (tc @ yc) / sxx
    syy = yc @ yc
    resid = yc - slope * tc
    r2 = 1.0 - (resid @ resid) / syy if syy > 0 else 1.0
    if not slope < 0:
        raise NonDecayingError(f"non-decaying: log-rate slope {slope:.4g} >= 0")
    return DecayFit(tau=-1.0 / slope, slope=float(slope), r2=float(r2), n_points=int(t.size))


# -- exclusion of incomplete histories --------------------------------------

RECENCY = "recency"
NON_DECREASING = "non_decreasing"
SHORT = "short_history"


@dataclass
class ExclusionReport:
    input_count: int = 0
    kept_count: int = 0
    dropped_by_rule: dict[str, int] = field(default_factory=lambda: {RECENCY: 0, NON_DECREASING: 0, SHORT: 0})
    reasons: dict[str, str] = field(default_factory=dict)


def exclusion_reason(history: CitationHistory, corpus_end: date, window_years: float = 5.0) -> Optional[str]:
    """Why the history is incomplete, or None if it can be used.

    Recency is checked first. The non-decreasing check compares the last two
    complete bins (the final whole year and the one before it for yearly bins).
    A history that has already decayed to zero in both is complete.
    """
    cutoff = corpus_end.toordinal() - window_years * DAYS_PER_YEAR
    if history.delta_i.toordinal() > cutoff:
        return RECENCY
    rates = history.rates[: history.n_complete]
    if rates.size < 2:
        return SHORT
    if rates[-1] >= rates[-2] and rates[-1] > 0:
        return NON_DECREASING
    return None


def exclude_incomplete(
    histories: Sequence[CitationHistory], corpus_end: date, window_years: float = 5.0
) -> tuple[list[CitationHistory], ExclusionReport]:
    report = ExclusionReport(input_count=len(histories))
    kept = []
    for h in histories:
        reason = exclusion_reason(h, corpus_end, window_years)
        if reason is None:
            kept.append(h)
        else:
            report.dropped_by_rule[reason] += 1
            report.reasons[h.paper_id] = reason
    report.kept_count = len(kept)
    return kept, report


# -- per-paper parametrization ------------------------------------------------


@dataclass(frozen=True)
class HistoryParams:
    paper_id: str
    scale: str
    t_peak: Optional[float]
    tau: Optional[float]
    tau_r2: Optional[float]
    n_bins: int
    excluded_reason: str = ""


def parametrize(
    history: CitationHistory, min_positive_bins: int = 3, excluded_reason: str = ""
) -> HistoryParams:
    """Peak delay and lifetime (both in the scale's time units) over the complete bins."""
    h = history.complete()
    t_peak = tau = r2 = None
    if not h.usable:
        excluded_reason = excluded_reason or "uncited"
    else:
        t_peak = peak_delay(h) * h.bin_width
        try:
            fit = fit_decay(h, min_positive_bins)
        except HistoryError:
            pass
        else:
            tau, r2 = fit.tau, fit.r2
    return HistoryParams(history.paper_id, history.scale.label, t_peak, tau, r2, h.n_bins, excluded_reason)


HISTORY_COLUMNS = ["paper_id", "scale", "t_peak", "tau", "tau_r2", "n_bins", "excluded_reason"]


def _fmt(x: Optional[float]) -> str:
    return "" if x is None else f"{x:.6g}"


def write_histories_csv(rows: Iterable[HistoryParams], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HISTORY_COLUMNS)
        for r in rows:
            w.writerow([r.paper_id, r.scale, _fmt(r.t_peak), _fmt(r.tau), _fmt(r.tau_r2),
                        r.n_bins, r.excluded_reason])


def read_histories_csv(path) -> list[HistoryParams]:
    def opt(s: str) -> Optional[float]:
        return float(s) if s else None

    with open(path, newline="", encoding="utf-8") as fh:
        return [
            HistoryParams(row["paper_id"], row["scale"], opt(row["t_peak"]), opt(row["tau"]),
                          opt(row["tau_r2"]), int(row["n_bins"]), row["excluded_reason"])
            for row in csv.DictReader(fh)
        ]


def write_rates_csv(histories: Iterable[CitationHistory], path) -> None:
    """Long format (paper_id, bin, rate) for plotting."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["paper_id", "bin", "rate"])
        for h in histories:
            for b, rate in enumerate(h.rates):
                w.writerow([h.paper_id, b, f"{rate:.6g}"])

