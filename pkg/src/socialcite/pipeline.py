"""Pipeline stages. Each stage reads the corpus and/or earlier CSV artifacts
from the output directory and writes its own CSV artifacts there.

Citations are only counted within a journal, so every stage after
``summary`` works on one network per journal.
"""

from __future__ import annotations

import csv
import logging
import re
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy import stats as sps

from . import stats
from .corpus import BibRecord, CorpusError, FilterConfig, apply_filters, corpus_summary, parse_corpus, split_by_journal
from .histories import (
    ScaleKind,
    TimeScale,
    compute_history,
    default_pubs_bin_width,
    exclusion_reason,
    parametrize,
    read_histories_csv,
    write_histories_csv,
    write_rates_csv,
)
from .network import TwoLayerNetwork, build_network
from .social import read_metrics_csv, social_profiles, write_metrics_csv
from .stats._format import fmt, format_p
from .synth import PlantedParams, write_synthetic

log = logging.getLogger(__name__)

METRICS = ("NC", "NP")
REGRESSIONS = (("peak", "ols_peak"), ("tau", "ols_decay"))


class PipelineError(Exception):
    exit_code = 1


class ConfigError(PipelineError):
    exit_code = 2


class DataError(PipelineError):
    exit_code = 3


class ConvergenceFailure(PipelineError):
    exit_code = 4


class MissingArtifactError(PipelineError):
    exit_code = 5


@dataclass
class PipelineConfig:
    corpus: Optional[Path] = None
    out: Path = Path("out")
    filters: FilterConfig = field(default_factory=FilterConfig)
    timescales: tuple[str, ...] = ("years", "pubs")
    delta_t: float = 1.0
    pubs_bin_width: Optional[float] = None
    exclusion_years: float = 5.0
    min_positive_bins: int = 3
    log_offset: Optional[float] = None
    permutations: int = 10000
    seed: int = 0
    alpha: float = 0.05
    corpus_end: Optional[date] = None
    synth: PlantedParams = field(default_factory=PlantedParams)

    def __post_init__(self):
        if self.corpus is not None:
            self.corpus = Path(self.corpus).resolve()
        self.out = Path(self.out).resolve()
        for ts in self.timescales:
            if ts not in ("years", "pubs"):
                raise ConfigError(f"unknown timescale {ts!r}")
        if not self.delta_t > 0:
            raise ConfigError("--delta-t must be positive")
        if self.pubs_bin_width is not None and not self.pubs_bin_width > 0:
            raise ConfigError("pubs bin width must be positive")
        if self.min_positive_bins < 2:
            raise ConfigError("--min-positive-bins must be at least 2")
        if self.permutations < 1:
            raise ConfigError("--permutations must be at least 1")
        if not 0 < self.alpha < 1:
            raise ConfigError("--alpha must lie in (0, 1)")
        if self.log_offset is not None and not self.log_offset > 0:
            raise ConfigError("--log-offset must be positive")


# -- helpers -------------------------------------------------------------------


def _writer(path: Path, header):
    fh = open(path, "w", newline="", encoding="utf-8")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    return fh, w


def _need(path: Path, stage: str) -> Path:
    if not path.exists():
        raise MissingArtifactError(f"{path.name} not found in {path.parent}; run `{stage}` first")
    return path


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name) or "_"


def _require_corpus(config: PipelineConfig) -> Path:
    if config.corpus is None:
        raise ConfigError("--corpus is required")
    if not config.corpus.is_file():
        raise ConfigError(f"corpus {config.corpus} does not exist")
    return config.corpus


def load_records(config: PipelineConfig) -> list[BibRecord]:
    _require_corpus(config)
    try:
        records, diagnostics = parse_corpus(config.corpus, strict=False)
    except CorpusError as exc:
        raise DataError(str(exc)) from exc
    for d in diagnostics:
        log.warning("skipped %s", d)
    kept, _ = apply_filters(records, config.filters)
    if not kept:
        raise DataError("no records left after filtering")
    return kept


def _networks(records) -> dict[str, TwoLayerNetwork]:
    return {j: build_network(recs) for j, recs in split_by_journal(records).items()}


def _corpus_end(config: PipelineConfig, records) -> date:
    return config.corpus_end or max(r.date for r in records)


# -- stages --------------------------------------------------------------------


def stage_validate(config: PipelineConfig) -> list[Path]:
    _require_corpus(config)
    try:
        records, diagnostics = parse_corpus(config.corpus, strict=False)
    except CorpusError as exc:
        raise DataError("\n".join(map(str, exc.diagnostics)) or str(exc)) from exc
    if diagnostics:
        lines = [str(d) for d in diagnostics]
        lines.append(f"{len(diagnostics)} invalid line(s) in {config.corpus}")
        raise DataError("\n".join(lines))
    log.info("%d valid records", len(records))
    return []


def stage_summary(config: PipelineConfig) -> list[Path]:
    _require_corpus(config)
    try:
        records, _ = parse_corpus(config.corpus, strict=False)
    except CorpusError as exc:
        raise DataError(str(exc)) from exc
    kept, report = apply_filters(records, config.filters)
    summary_path = config.out / "summary.csv"
    fh, w = _writer(summary_path, ["journal", "n_papers", "n_authors", "n_citations", "n_authorships"])
    with fh:
        for journal, recs in split_by_journal(kept).items():
            w.writerow([journal, *corpus_summary(recs).as_tuple()])
    filter_path = config.out / "filter_report.csv"
    fh, w = _writer(filter_path, ["rule", "count"])
    with fh:
        w.writerows(report.rows())
    return [summary_path, filter_path]


def stage_build(config: PipelineConfig) -> list[Path]:
    records = load_records(config)
    net_dir = config.out / "network"
    net_dir.mkdir(parents=True, exist_ok=True)
    report_path = config.out / "build_report.csv"
    paths = [report_path]
    fh, w = _writer(report_path, ["journal", "n_papers", "n_authors", "n_citations", "n_authorships",
                                  "n_coauthorships", "anachronistic_citations", "external_refs"])
    with fh:
        for journal, net in _networks(records).items():
            w.writerow([journal, net.n_papers, net.n_authors, net.n_citations, net.n_authorships,
                        len(net.coauthorships), net.report.anachronistic_citations, net.report.external_refs])
            edges = net_dir / f"{_slug(journal)}_edges.csv"
            nodes = net_dir / f"{_slug(journal)}_nodes.csv"
            net.write_edges_csv(edges)
            net.write_nodes_csv(nodes)
            paths += [edges, nodes]
    return paths


def stage_metrics(config: PipelineConfig) -> list[Path]:
    records = load_records(config)
    profiles = []
    for net in _networks(records).values():
        profiles.extend(social_profiles(net))
    path = config.out / "metrics.csv"
    write_metrics_csv(profiles, path)
    return [path]


def stage_histories(config: PipelineConfig) -> list[Path]:
    records = load_records(config)
    end = _corpus_end(config, records)
    rows = []
    rates = {ts: [] for ts in config.timescales}
    excl_counts: dict[tuple[str, str], int] = {}
    yearly = TimeScale(ScaleKind.YEARS, 1.0)
    for journal, net in _networks(records).items():
        scales = {}
        if "years" in config.timescales:
            scales["years"] = TimeScale(ScaleKind.YEARS, config.delta_t)
        if "pubs" in config.timescales:
            scales["pubs"] = TimeScale(ScaleKind.PUBS, config.pubs_bin_width or default_pubs_bin_width(net))
        for pid in net.paper_ids:
            reason = exclusion_reason(compute_history(net, pid, yearly, end), end, config.exclusion_years) or ""
            if reason:
                excl_counts[(journal, reason)] = excl_counts.get((journal, reason), 0) + 1
            for label, scale in scales.items():
                h = compute_history(net, pid, scale, end)
                rates[label].append(h)
                rows.append(parametrize(h, config.min_positive_bins, reason))
    rows.sort(key=lambda r: (config.timescales.index(r.scale), r.paper_id))
    path = config.out / "histories.csv"
    write_histories_csv(rows, path)
    paths = [path]
    for label, hs in rates.items():
        p = config.out / f"rates_{label}.csv"
        write_rates_csv(sorted(hs, key=lambda h: h.paper_id), p)
        paths.append(p)
    excl_path = config.out / "exclusion_report.csv"
    fh, w = _writer(excl_path, ["journal", "rule", "count"])
    with fh:
        for (journal, rule), n in sorted(excl_counts.items()):
            w.writerow([journal, rule, n])
    paths.append(excl_path)
    return paths


@dataclass
class _Cell:
    journal: str
    metric: str
    timescale: str
    s: np.ndarray
    t_peak: np.ndarray
    s_tau: np.ndarray
    tau: np.ndarray


def _cells(config: PipelineConfig, records) -> list[_Cell]:
    """Regression inputs per (journal, metric, timescale), kept papers only."""
    metrics = read_metrics_csv(_need(config.out / "metrics.csv", "metrics"))
    hist = read_histories_csv(_need(config.out / "histories.csv", "histories"))
    journal_of = {r.paper_id: r.journal for r in records}
    cells = []
    for journal in sorted(set(journal_of.values())):
        for metric in METRICS:
            for ts in config.timescales:
                s, tp, s_tau, tau = [], [], [], []
                for h in hist:
                    if h.scale != ts or h.excluded_reason or journal_of.get(h.paper_id) != journal:
                        continue
                    prof = metrics.get(h.paper_id)
                    if prof is None:
                        raise MissingArtifactError(f"paper {h.paper_id} missing from metrics.csv; rerun `metrics`")
                    sv = prof.s_nc if metric == "NC" else prof.s_np
                    if h.t_peak is not None:
                        s.append(sv)
                        tp.append(h.t_peak)
                    if h.tau is not None:
                        s_tau.append(sv)
                        tau.append(h.tau)
                cells.append(_Cell(journal, metric, ts, np.array(s, float), np.array(tp, float),
                                   np.array(s_tau, float), np.array(tau, float)))
    return cells


def _try_ols(s, y, log_offset):
    try:
        return stats.ols_loglog(s, y, log_offset)
    except ValueError as exc:
        log.warning("regression skipped: %s", exc)
        return None


def stage_regress(config: PipelineConfig) -> list[Path]:
    records = load_records(config)
    path = config.out / "regression.csv"
    header = ["journal", "metric", "timescale",
              "beta1_peak", "se_peak", "p_peak", "stars_peak", "n_peak",
              "beta1_tau", "se_tau", "p_tau", "stars_tau", "n_tau"]
    fh, w = _writer(path, header)
    with fh:
        for c in _cells(config, records):
            row = [c.journal, c.metric, c.timescale]
            for s, y in ((c.s, c.t_peak), (c.s_tau, c.tau)):
                fit = _try_ols(s, y, config.log_offset)
                if fit is None:
                    row += ["", "", "", "", 0]
                else:
                    row += [fmt(fit.beta1), fmt(fit.se1), format_p(fit.p1), stats.stars(fit.p1), fit.n]
            w.writerow(row)
    return [path]


def stage_nbreg(config: PipelineConfig) -> list[Path]:
    """NB regression of yearly peak delays (as counts), plus band data for effect plots."""
    records = load_records(config)
    cells = [c for c in _cells(config, records) if c.timescale == "years"]
    if not cells:
        raise ConfigError("nbreg needs the years timescale")
    nb_path = config.out / "nbreg.csv"
    band_path = config.out / "nb_bands.csv"
    tau_path = config.out / "tau_bands.csv"
    failures = []
    f_nb, w_nb = _writer(nb_path, ["journal", "metric", "alpha", "se_alpha", "beta", "se_beta", "p_beta",
                                   "stars", "theta", "loglik", "converged", "n"])
    f_band, w_band = _writer(band_path, ["journal", "metric", "s", "mu", "lower", "upper"])
    f_tau, w_tau = _writer(tau_path, ["journal", "metric", "s", "tau", "lower", "upper"])
    with f_nb, f_band, f_tau:
        for c in cells:
            counts = np.rint(c.t_peak / config.delta_t)
            try:
                fit = stats.nb_regress(c.s, counts)
            except ValueError as exc:
                log.warning("nbreg %s/%s skipped: %s", c.journal, c.metric, exc)
                continue
            w_nb.writerow([c.journal, c.metric, fmt(fit.alpha), fmt(fit.se_alpha), fmt(fit.beta),
                           fmt(fit.se_beta), format_p(fit.p_beta), stats.stars(fit.p_beta),
                           fmt(fit.theta), fmt(fit.loglik), int(fit.converged), fit.n])
            if not fit.converged:
                failures.append(f"{c.journal}/{c.metric}")
                continue
            grid = np.linspace(0.0, c.s.max(), 101)
            for row in stats.nb_predict_band(fit, grid).rows():
                w_band.writerow([c.journal, c.metric, *map(fmt, row)])
            ols = _try_ols(c.s_tau, c.tau, config.log_offset)
            if ols is not None and c.s_tau.max() > 1:
                s_grid = np.logspace(0.0, np.log10(c.s_tau.max()), 101)
                lx = np.log10(s_grid + (config.log_offset or 0.0))
                eta, se = ols.predict(lx), ols.predict_se(lx)
                z = float(sps.norm.ppf(0.975))
                for sv, e, h in zip(s_grid, eta, se):
                    w_tau.writerow([c.journal, c.metric, fmt(sv), fmt(10**e), fmt(10 ** (e - z * h)), fmt(10 ** (e + z * h))])
    if failures:
        raise ConvergenceFailure(f"NB regression did not converge for {', '.join(failures)}")
    return [nb_path, band_path, tau_path]


def stage_disptest(config: PipelineConfig) -> list[Path]:
    records = load_records(config)
    path = config.out / "dispersion.csv"
    fh, w = _writer(path, ["journal", "metric", "z", "alpha_hat", "p_value", "stars", "n"])
    with fh:
        for c in _cells(config, records):
            if c.timescale != "years":
                continue
            counts = np.rint(c.t_peak / config.delta_t)
            try:
                res = stats.overdispersion_test(c.s, counts)
            except ValueError as exc:
                log.warning("disptest %s/%s skipped: %s", c.journal, c.metric, exc)
                continue
            w.writerow([c.journal, c.metric, fmt(res.z_statistic), fmt(res.alpha_hat),
                        format_p(res.p_value), stats.stars(res.p_value), c.s.size])
    return [path]


def _cell_seed(seed: int, k: int) -> int:
    return int(np.random.SeedSequence([seed, k]).generate_state(1)[0])


def stage_permtest(config: PipelineConfig) -> list[Path]:
    records = load_records(config)
    sum_path = config.out / "permutation.csv"
    hist_path = config.out / "permutation_hist.csv"
    key = ["journal", "metric", "timescale", "regression"]
    f_sum, w_sum = _writer(sum_path, key + ["observed_slope", "empirical_p", "n_perm", "seed", "null_mean", "null_std"])
    f_hist, w_hist = _writer(hist_path, key + ["bin_left", "bin_right", "count"])
    k = 0
    with f_sum, f_hist:
        for c in _cells(config, records):
            for label, (s, y) in zip(("peak", "tau"), ((c.s, c.t_peak), (c.s_tau, c.tau))):
                regression = dict(REGRESSIONS)[label]
                seed = _cell_seed(config.seed, k)
                k += 1
                try:
                    res = stats.permutation_test(s, y, regression, config.permutations, seed, config.log_offset)
                except ValueError as exc:
                    log.warning("permtest %s/%s/%s/%s skipped: %s", c.journal, c.metric, c.timescale, label, exc)
                    continue
                ident = [c.journal, c.metric, c.timescale, label]
                w_sum.writerow(ident + [fmt(res.observed_slope), fmt(res.empirical_p), res.n_perm, seed,
                                        fmt(res.null_slopes.mean()), fmt(res.null_slopes.std())])
                counts, edges = res.histogram()
                for lo, hi, n in zip(edges[:-1], edges[1:], counts):
                    w_hist.writerow(ident + [fmt(lo), fmt(hi), int(n)])
    return [sum_path, hist_path]


def stage_diagnose(config: PipelineConfig) -> list[Path]:
    records = load_records(config)
    key = ["journal", "metric", "timescale", "regression"]
    qq_path = config.out / "diagnostics_qq.csv"
    ta_path = config.out / "diagnostics_ta.csv"
    flag_path = config.out / "diagnostics_flags.csv"
    f_qq, w_qq = _writer(qq_path, key + ["theoretical", "observed"])
    f_ta, w_ta = _writer(ta_path, key + ["fitted_center", "resid_mean", "resid_std", "count"])
    f_fl, w_fl = _writer(flag_path, key + ["lower_tail_flag", "max_qq_deviation", "n"])
    with f_qq, f_ta, f_fl:
        for c in _cells(config, records):
            for label, (s, y) in zip(("peak", "tau"), ((c.s, c.t_peak), (c.s_tau, c.tau))):
                fit = _try_ols(s, y, config.log_offset)
                if fit is None:
                    continue
                d = stats.diagnostics(fit, s, y, config.log_offset)
                ident = [c.journal, c.metric, c.timescale, label]
                for theo, obs in d.qq:
                    w_qq.writerow(ident + [fmt(theo), fmt(obs)])
                for center, mean, sd, n in d.ta_bins:
                    w_ta.writerow(ident + [fmt(center), fmt(mean), fmt(sd), int(n)])
                w_fl.writerow(ident + [int(d.lower_tail_flag), fmt(d.max_qq_deviation), fit.n])
    return [qq_path, ta_path, flag_path]


def stage_synth(config: PipelineConfig) -> list[Path]:
    corpus_path = config.out / "synth_corpus.jsonl"
    truth_path = config.out / "ground_truth.csv"
    report_path = config.out / "synth_report.csv"
    try:
        rep = write_synthetic(config.synth, corpus_path, truth_path)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    fh, w = _writer(report_path, ["scheduled", "placed", "beyond_horizon", "unplaceable"])
    with fh:
        w.writerow([rep.scheduled, rep.placed, rep.beyond_horizon, rep.unplaceable])
    return [corpus_path, truth_path, report_path]


REPORT_CHAIN = ("summary", "build", "metrics", "histories", "regress", "nbreg", "disptest", "permtest", "diagnose")


def stage_report(config: PipelineConfig) -> list[Path]:
    paths = []
    for name in REPORT_CHAIN:
        log.info("report: running %s", name)
        paths += STAGES[name](config)
    return paths


STAGES: dict[str, Callable[[PipelineConfig], list[Path]]] = {
    "validate": stage_validate,
    "summary": stage_summary,
    "build": stage_build,
    "metrics": stage_metrics,
    "histories": stage_histories,
    "regress": stage_regress,
    "nbreg": stage_nbreg,
    "disptest": stage_disptest,
    "permtest": stage_permtest,
    "diagnose": stage_diagnose,
    "synth": stage_synth,
    "report": stage_report,
}


def run_subcommand(name: str, config: PipelineConfig) -> list[Path]:
    """Run one stage; raises a :class:`PipelineError` subclass carrying the exit code."""
    if name not in STAGES:
        raise ConfigError(f"unknown subcommand {name!r}")
    config.out.mkdir(parents=True, exist_ok=True)
    return STAGES[name](config)
