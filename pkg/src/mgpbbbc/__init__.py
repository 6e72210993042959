"""Multiple-global-peaks big bang-big crunch optimiser and niching benchmark harness."""

from .benchmarks import (
    BenchmarkSpec,
    PeakRegistry,
    get_benchmark,
    load_custom,
    make_benchmark,
    register_custom,
    register_evaluator,
)
from .clustering import ClusterSet, mean_shift
from .core import (
    BandwidthStrategy,
    ConfigError,
    Individual,
    Population,
    Problem,
    RunConfig,
    make_rng,
    random_init,
)
from .crunchbang import big_bang, big_crunch, get_extent, offspring_per_com
from .harness import ExperimentConfig, ExperimentReport, run_experiment
from .metrics import count_peaks, peak_ratio, success_ratio
from .solver import run
from .survival import survival

__version__ = "0.1.0"

__all__ = [
    "BandwidthStrategy",
    "BenchmarkSpec",
    "ClusterSet",
    "ConfigError",
    "ExperimentConfig",
    "ExperimentReport",
    "Individual",
    "PeakRegistry",
    "Population",
    "Problem",
    "RunConfig",
    "big_bang",
    "big_crunch",
    "count_peaks",
    "get_benchmark",
    "get_extent",
    "load_custom",
    "make_benchmark",
    "make_rng",
    "mean_shift",
    "offspring_per_com",
    "peak_ratio",
    "random_init",
    "register_custom",
    "register_evaluator",
    "run",
    "run_experiment",
    "success_ratio",
    "survival",
]
