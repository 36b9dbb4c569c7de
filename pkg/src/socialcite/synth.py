"""Synthetic corpora with planted social effects on peak delay and lifetime.

Each paper's yearly citation intensity ramps linearly up to a peak bin drawn
from NB(mu = exp(alpha_peak + beta_peak * s_nc), theta) and then decays as
exp(-t / tau) with tau = tau0 * max(s_nc, 1) ** beta_tau. Per-bin citation
counts are Poisson around that intensity and every citation is realized as a
reference from a later synthetic paper.
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass
from datetime import date
from typing import Optional

import numpy as np

from .corpus import BibRecord, write_corpus
from .histories import DAYS_PER_YEAR


@dataclass(frozen=True)
class PlantedParams:
    n_authors: int = 2000
    n_papers: int = 5000
    span_years: float = 40.0
    team_size_law: str = "geometric"  # "fixed" or "geometric"
    team_size: float = 3.0  # k for "fixed", mean for "geometric"
    alpha_peak: float = 1.0
    beta_peak: float = -0.005
    theta: float = 1.5
    tau0: float = 5.0
    beta_tau: float = -0.2
    citations_per_paper_mean: float = 40.0
    seed: int = 0
    career_years: Optional[float] = 10.0
    tail_years: Optional[float] = 10.0
    start: date = date(1960, 1, 1)
    journal: str = "SYN"

    def validate(self) -> None:
        if self.n_papers < 2 or self.n_authors < 1:
            raise ValueError("need at least 2 papers and 1 author")
        if not self.span_years > 0:
            raise ValueError("span_years must be positive")
        if self.team_size_law not in ("fixed", "geometric"):
            raise ValueError(f"unknown team_size_law {self.team_size_law!r}")
        if self.team_size_law == "fixed" and not 1 <= int(self.team_size) <= self.n_authors:
            raise ValueError("fixed team size must lie in [1, n_authors]")
        if self.tail_years is not None and not self.tail_years >= 1:
            raise ValueError("tail_years must be at least 1")
        if self.career_years is not None and not self.career_years > 0:
            raise ValueError("career_years must be positive")
        if self.team_size < 1:
            raise ValueError("team_size must be at least 1")
        if not (self.theta > 0 and self.tau0 > 0 and self.citations_per_paper_mean >= 0):
            raise ValueError("theta and tau0 must be positive, citation mean non-negative")
        # each ordered pair (later, earlier) carries at most one citation
        if self.citations_per_paper_mean * self.n_papers > self.n_papers * (self.n_papers - 1) / 2:
            raise ValueError("infeasible: more citations requested than paper pairs can carry")
        end = self.start.toordinal() + self.span_years * DAYS_PER_YEAR
        if end > date.today().toordinal():
            raise ValueError("synthetic corpus would extend past today")


@dataclass(frozen=True)
class GroundTruth:
    paper_id: str
    s_nc_true: int
    s_np_true: int
    t_peak_true: int
    tau_true: float


@dataclass(frozen=True)
class GenerationReport:
    scheduled: int
    placed: int
    beyond_horizon: int
    unplaceable: int


def _team_sizes(p: PlantedParams, rng: np.random.Generator) -> np.ndarray:
    if p.team_size_law == "fixed":
        return np.full(p.n_papers, int(p.team_size), dtype=np.int64)
    sizes = rng.geometric(1.0 / p.team_size, size=p.n_papers)
    return np.minimum(sizes, p.n_authors)


def _draw_teams(p: PlantedParams, dates: np.ndarray, rng: np.random.Generator) -> list[np.ndarray]:
    sizes = _team_sizes(p, rng)
    activity = rng.pareto(2.0, p.n_authors) + 1.0
    if p.career_years is None:
        weights = activity / activity.sum()
        return [np.sort(rng.choice(p.n_authors, size=k, replace=False, p=weights)) for k in sizes]
    span_days = p.span_years * DAYS_PER_YEAR
    career = p.career_years * DAYS_PER_YEAR
    first = p.start.toordinal() + rng.uniform(-career, span_days, p.n_authors)
    teams = []
    for k, d in zip(sizes, dates):
        active = np.flatnonzero((first <= d) & (d < first + career))
        pool = active if active.size >= k else np.arange(p.n_authors)
        w = activity[pool] / activity[pool].sum()
        teams.append(np.sort(rng.choice(pool, size=k, replace=False, p=w)))
    return teams


def _incremental_truth(dates: np.ndarray, teams: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Accumulate coauthor and paper sets in date order; same-day papers don't see each other."""
    n = len(teams)
    coauthors: dict[int, set] = {}
    papers: dict[int, set] = {}
    s_nc = np.zeros(n, dtype=np.int64)
    s_np = np.zeros(n, dtype=np.int64)
    i = 0
    while i < n:
        j = i
        while j < n and dates[j] == dates[i]:
            j += 1
        for q in range(i, j):
            people, prior = set(), set()
            for r in teams[q].tolist():
                people |= coauthors.get(r, set())
                prior |= papers.get(r, set())
            s_nc[q] = len(people)
            s_np[q] = len(prior)
        for q in range(i, j):
            team = teams[q].tolist()
            for r in team:
                coauthors.setdefault(r, set()).update(a for a in team if a != r)
                papers.setdefault(r, set()).add(q)
        i = j
    return s_nc, s_np


def intensity_shape(t_peak: int, tau: float, n_bins: int) -> np.ndarray:
    """Linear ramp to 1 at ``t_peak`` followed by exp(-(b - t_peak) / tau)."""
    b = np.arange(n_bins, dtype=np.float64)
    return np.where(b <= t_peak, (b + 1.0) / (t_peak + 1.0), np.exp(-(b - t_peak) / tau))


def _shape_mass(t_peak: int, tau: float) -> float:
    return (t_peak + 2.0) / 2.0 + 1.0 / math.expm1(1.0 / tau)


def _place(i: int, desired: np.ndarray, dates: np.ndarray, first_ok: int) -> np.ndarray:
    """Indices of citing papers for paper ``i``, each nearest in date to a desired day.

    Candidates are papers ``first_ok..n-1`` other than ``i``; each is used at most once.
    """
    n = dates.size
    used = {i}
    out = []
    for T in desired:
        pos = int(np.searchsorted(dates, T))
        lo, hi = pos - 1, pos
        while lo >= first_ok and lo in used:
            lo -= 1
        while hi < n and hi in used:
            hi += 1
        left_ok, right_ok = lo >= first_ok, hi < n
        if not (left_ok or right_ok):
            break
        if left_ok and (not right_ok or T - dates[lo] <= dates[hi] - T):
            chosen = lo
        else:
            chosen = hi
        used.add(chosen)
        out.append(chosen)
    return np.asarray(out, dtype=np.int64)


def generate_corpus(params: PlantedParams) -> tuple[list[BibRecord], list[GroundTruth], GenerationReport]:
    params.validate()
    p = params
    rng = np.random.default_rng(p.seed)
    span_days = p.span_years * DAYS_PER_YEAR
    start = p.start.toordinal()
    dates = np.sort(start + np.floor(rng.uniform(0, span_days, p.n_papers)).astype(np.int64))
    end = int(dates[-1])
    teams = _draw_teams(p, dates, rng)
    s_nc, s_np = _incremental_truth(dates, teams)

    mu = np.exp(p.alpha_peak + p.beta_peak * s_nc)
    t_peak = rng.negative_binomial(p.theta, p.theta / (p.theta + mu))
    tau = p.tau0 * np.maximum(s_nc, 1).astype(np.float64) ** p.beta_tau

    refs: list[list[int]] = [[] for _ in range(p.n_papers)]
    scheduled = beyond = unplaceable = 0
    first_same_day = np.searchsorted(dates, dates, side="left")
    for i in range(p.n_papers):
        n_bins = int((end - dates[i]) / DAYS_PER_YEAR) + 1
        scale = p.citations_per_paper_mean / _shape_mass(int(t_peak[i]), float(tau[i]))
        shape = intensity_shape(int(t_peak[i]), float(tau[i]), n_bins)
        if p.tail_years is not None:
            shape[int(t_peak[i]) + 1 + int(p.tail_years):] = 0.0
        counts = rng.poisson(scale * shape)
        total = int(counts.sum())
        if total == 0:
            continue
        # whole-day offsets whose floor(offset / year) is the bin index
        b = np.repeat(np.arange(n_bins), counts)
        lo = np.ceil(b * DAYS_PER_YEAR).astype(np.int64)
        hi = np.ceil((b + 1) * DAYS_PER_YEAR).astype(np.int64)
        when = np.sort(dates[i] + rng.integers(lo, hi))
        scheduled += total
        inside = when <= end
        beyond += int((~inside).sum())
        when = when[inside]
        citing = _place(i, when, dates, int(first_same_day[i]))
        unplaceable += when.size - citing.size
        for j in citing.tolist():
            refs[j].append(i)

    ids = [f"P{k:06d}" for k in range(p.n_papers)]
    records = [
        BibRecord(
            paper_id=ids[k],
            date=date.fromordinal(int(dates[k])),
            author_ids=tuple(f"A{a:05d}" for a in teams[k].tolist()),
            ref_ids=tuple(ids[j] for j in sorted(refs[k])),
            tags=(),
            journal=p.journal,
        )
        for k in range(p.n_papers)
    ]
    truth = [
        GroundTruth(ids[k], int(s_nc[k]), int(s_np[k]), int(t_peak[k]), float(tau[k]))
        for k in range(p.n_papers)
    ]
    placed = sum(len(r) for r in refs)
    return records, truth, GenerationReport(scheduled, placed, beyond, unplaceable)


def write_ground_truth_csv(truth, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["paper_id", "s_nc_true", "s_np_true", "t_peak_true", "tau_true"])
        for g in truth:
            w.writerow([g.paper_id, g.s_nc_true, g.s_np_true, g.t_peak_true, f"{g.tau_true:.6g}"])


def write_synthetic(params: PlantedParams, corpus_path, truth_path) -> GenerationReport:
    records, truth, report = generate_corpus(params)
    write_corpus(records, corpus_path)
    write_ground_truth_csv(truth, truth_path)
    return report


def params_dict(params: PlantedParams) -> dict:
    d = asdict(params)
    d["start"] = params.start.isoformat()
    return d
