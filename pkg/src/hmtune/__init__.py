"""Trace-driven hybrid memory simulation and page-scheduling period tuning."""

from hmtune.errors import (
    EmptyTraceError,
    HmtuneError,
    InvalidParameterError,
    ParseError,
    SimulationError,
)
from hmtune.trace import AccessTrace, TraceStats, compute_stats, generate_synthetic, load_trace, save_trace
from hmtune.memsim import HybridMemoryConfig, PlacementMap, SimResult, all_fast_runtime, initial_placement, simulate
from hmtune.scheduler import MigrationPlan, SchedulerSpec, oracle_counts, plan_period
from hmtune.reuse import ReuseHistogram, collect_reuse, import_loop_histogram
from hmtune.freqgen import (
    CandidateSet,
    DominantReuse,
    baseline_candidates,
    cori_candidates,
    dominant_reuse,
    to_request_domain,
)
from hmtune.tuner import StoppingPolicy, TrialResult, TuningReport, exhaustive_best, run_tuning

__version__ = "0.1.0"

__all__ = [
    "AccessTrace",
    "CandidateSet",
    "DominantReuse",
    "EmptyTraceError",
    "HmtuneError",
    "HybridMemoryConfig",
    "InvalidParameterError",
    "MigrationPlan",
    "ParseError",
    "PlacementMap",
    "ReuseHistogram",
    "SchedulerSpec",
    "SimResult",
    "SimulationError",
    "StoppingPolicy",
    "TraceStats",
    "TrialResult",
    "TuningReport",
    "all_fast_runtime",
    "baseline_candidates",
    "collect_reuse",
    "compute_stats",
    "cori_candidates",
    "dominant_reuse",
    "exhaustive_best",
    "generate_synthetic",
    "import_loop_histogram",
    "initial_placement",
    "load_trace",
    "oracle_counts",
    "plan_period",
    "run_tuning",
    "save_trace",
    "simulate",
    "to_request_domain",
]
