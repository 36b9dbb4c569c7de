"""Social metrics and citation-history regressions on temporal coauthorship/citation networks."""

from ._accel import backend
from .corpus import (
    BibRecord,
    CorpusError,
    FilterConfig,
    apply_filters,
    corpus_summary,
    parse_corpus,
    write_corpus,
)
from .histories import (
    CitationHistory,
    ScaleKind,
    TimeScale,
    compute_history,
    exclude_incomplete,
    fit_decay,
    normalize,
    peak_delay,
)
from .network import TwoLayerNetwork, build_network
from .social import social_nc, social_np, social_profiles
from .synth import PlantedParams, generate_corpus

__version__ = "0.1.0"

__all__ = [
    "BibRecord",
    "CitationHistory",
    "CorpusError",
    "FilterConfig",
    "PlantedParams",
    "ScaleKind",
    "TimeScale",
    "TwoLayerNetwork",
    "apply_filters",
    "backend",
    "build_network",
    "compute_history",
    "corpus_summary",
    "exclude_incomplete",
    "fit_decay",
    "generate_corpus",
    "normalize",
    "parse_corpus",
    "peak_delay",
    "social_nc",
    "social_np",
    "social_profiles",
    "write_corpus",
]
