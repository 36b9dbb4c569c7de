"""Command-line entry point: ``socialcite <subcommand> [options]``.

Every option can also be set through an environment variable named
``SOCIALCITE_`` plus the option name in upper case with dashes turned into
underscores (``--delta-t`` -> ``SOCIALCITE_DELTA_T``). Flags win over the
environment.
"""

import logging
import sys

import click

from . import pipeline
from .corpus import FilterConfig
from .synth import PlantedParams

ENV_PREFIX = "SOCIALCITE_"


def _env(name: str) -> str:
    return ENV_PREFIX + name.upper().replace("-", "_")


def _opt(name, *aliases, **kwargs):
    return click.option(f"--{name}", *aliases, envvar=_env(name), show_envvar=True, **kwargs)


def _tags(value):
    if not value:
        return frozenset()
    return frozenset(t.strip() for t in value.split(",") if t.strip())


PIPELINE_OPTIONS = [
    _opt("corpus", type=click.Path(dir_okay=False), help="Corpus file, one JSON record per line."),
    _opt("out", type=click.Path(file_okay=False), default="out", show_default=True, help="Output directory."),
    _opt("timescale", type=click.Choice(["years", "pubs", "both"]), default="both", show_default=True),
    _opt("delta-t", type=float, default=1.0, show_default=True, help="Bin width in years."),
    _opt("pubs-bin-width", type=float, default=None, help="Bin width in papers (default: papers per year)."),
    _opt("exclusion-years", type=float, default=5.0, show_default=True),
    _opt("min-positive-bins", type=int, default=3, show_default=True),
    _opt("log-offset", type=float, default=None, help="Add this before log10 instead of dropping zeros."),
    _opt("permutations", type=int, default=10000, show_default=True),
    _opt("seed", type=int, default=0, show_default=True),
    _opt("alpha", type=float, default=0.05, show_default=True, help="Significance level."),
    _opt("drop-tags", default="", help="Comma-separated tags; records carrying any are dropped."),
    _opt("require-tags", default="", help="Comma-separated tags; records carrying none are dropped."),
    _opt("max-authors", type=int, default=None),
    _opt("journals", default="", help="Comma-separated journal allowlist."),
    _opt("filter-config", type=click.Path(exists=True, dir_okay=False), default=None,
         help="JSON filter config; overrides the individual filter flags."),
    _opt("corpus-end", type=click.DateTime(formats=["%Y-%m-%d"]), default=None,
         help="Release date of the database (default: latest paper date)."),
    _opt("verbose", "-v", is_flag=True, default=False),
]

SYNTH_OPTIONS = [
    _opt("n-papers", type=int, default=PlantedParams.n_papers, show_default=True),
    _opt("n-authors", type=int, default=PlantedParams.n_authors, show_default=True),
    _opt("span-years", type=float, default=PlantedParams.span_years, show_default=True),
    _opt("team-size-law", type=click.Choice(["fixed", "geometric"]), default=PlantedParams.team_size_law,
         show_default=True),
    _opt("team-size", type=float, default=PlantedParams.team_size, show_default=True),
    _opt("alpha-peak", type=float, default=PlantedParams.alpha_peak, show_default=True),
    _opt("beta-peak", type=float, default=PlantedParams.beta_peak, show_default=True),
    _opt("theta", type=float, default=PlantedParams.theta, show_default=True),
    _opt("tau0", type=float, default=PlantedParams.tau0, show_default=True),
    _opt("beta-tau", type=float, default=PlantedParams.beta_tau, show_default=True),
    _opt("citations-mean", type=float, default=PlantedParams.citations_per_paper_mean, show_default=True),
    _opt("career-years", type=float, default=PlantedParams.career_years, show_default=True,
         help="Author career length; 0 keeps every author active over the whole span."),
    _opt("tail-years", type=float, default=PlantedParams.tail_years, show_default=True,
         help="Years of decay after the peak bin before citations stop; 0 for no limit."),
]


def _apply(options):
    def decorate(f):
        for option in reversed(options):
            f = option(f)
        return f

    return decorate


def build_config(opts: dict) -> pipeline.PipelineConfig:
    try:
        if opts.get("filter_config"):
            filters = FilterConfig.from_json(opts["filter_config"])
        else:
            journals = _tags(opts.get("journals"))
            filters = FilterConfig(
                drop_tags=_tags(opts.get("drop_tags")),
                require_tags=_tags(opts.get("require_tags")),
                max_authors=opts.get("max_authors"),
                journal_allowlist=journals or None,
            )
    except (ValueError, OSError) as exc:
        raise pipeline.ConfigError(f"bad filter configuration: {exc}") from exc
    ts = opts.get("timescale", "both")
    timescales = ("years", "pubs") if ts == "both" else (ts,)
    end = opts.get("corpus_end")
    synth = PlantedParams()
    if "n_papers" in opts:
        synth = PlantedParams(
            n_authors=opts["n_authors"],
            n_papers=opts["n_papers"],
            span_years=opts["span_years"],
            team_size_law=opts["team_size_law"],
            team_size=opts["team_size"],
            alpha_peak=opts["alpha_peak"],
            beta_peak=opts["beta_peak"],
            theta=opts["theta"],
            tau0=opts["tau0"],
            beta_tau=opts["beta_tau"],
            citations_per_paper_mean=opts["citations_mean"],
            seed=opts["seed"],
            career_years=opts["career_years"] or None,
            tail_years=opts["tail_years"] or None,
        )
    return pipeline.PipelineConfig(
        corpus=opts.get("corpus"),
        out=opts.get("out", "out"),
        filters=filters,
        timescales=timescales,
        delta_t=opts["delta_t"],
        pubs_bin_width=opts.get("pubs_bin_width"),
        exclusion_years=opts["exclusion_years"],
        min_positive_bins=opts["min_positive_bins"],
        log_offset=opts.get("log_offset"),
        permutations=opts["permutations"],
        seed=opts["seed"],
        alpha=opts["alpha"],
        corpus_end=end.date() if end is not None else None,
        synth=synth,
    )


def _run(name: str, opts: dict) -> None:
    logging.basicConfig(
        level=logging.INFO if opts.get("verbose") else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = build_config(opts)
        paths = pipeline.run_subcommand(name, config)
    except pipeline.PipelineError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(exc.exit_code)
    for p in paths:
        click.echo(str(p))


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def main():
    """Social metrics, citation histories and regressions for a bibliographic corpus."""


def _subcommand(name: str, help_text: str, extra=()):
    @main.command(name=name, help=help_text)
    @_apply(PIPELINE_OPTIONS + list(extra))
    def command(**opts):
        _run(name, opts)

    return command


_subcommand("validate", "Check every corpus line; nonzero exit with line-numbered diagnostics on errors.")
_subcommand("summary", "Per-journal paper, author, citation and authorship counts.")
_subcommand("build", "Build the per-journal two-layer networks and dump their edge lists.")
_subcommand("metrics", "Pre-publication coauthor and paper counts of each paper's authors.")
_subcommand("histories", "Binned citation histories with peak delay and lifetime per paper.")
_subcommand("regress", "Log-log regressions of peak delay and lifetime on the social metrics.")
_subcommand("nbreg", "Negative binomial regression of yearly peak delays, with band data.")
_subcommand("disptest", "Overdispersion test of yearly peak delays.")
_subcommand("permtest", "Permutation tests of the regression slopes.")
_subcommand("diagnose", "QQ and Tukey-Anscombe data for the log-log regressions.")
_subcommand("synth", "Generate a synthetic corpus with planted social effects.", SYNTH_OPTIONS)
_subcommand("report", "Run summary through diagnose in sequence.")


if __name__ == "__main__":  # pragma: no cover
    main()
