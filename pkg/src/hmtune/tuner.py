"""Trial-based selection of the scheduling period."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum

from hmtune.errors import InvalidParameterError, SimulationError
from hmtune.freqgen import CandidateSet
from hmtune.memsim import HybridMemoryConfig, SimResult, all_fast_runtime, simulate
from hmtune.reuse import Domain
from hmtune.scheduler import SchedulerSpec
from hmtune.trace import AccessTrace


class StopReason(str, Enum):
    TARGET_MET = "target-met"
    PATIENCE_EXHAUSTED = "patience-exhausted"
    CANDIDATES_EXHAUSTED = "candidates-exhausted"
    MAX_TRIALS = "max-trials"


class SelectionRule(str, Enum):
    MIN_RUNTIME = "min-runtime"
    FIRST_KNEE = "first-knee"


@dataclass(frozen=True)
class StoppingPolicy:
    """When to stop trying candidates and how to pick among the trials.

    ``patience=None`` disables the no-improvement rule, so every candidate
    (up to ``max_trials``) is tried.
    """

    max_trials: int | None = None
    patience: int | None = 2
    improvement_epsilon: float = 0.01
    target_slowdown: float | None = None
    selection_rule: SelectionRule = SelectionRule.MIN_RUNTIME
    knee_fraction: float = 0.5

    def __post_init__(self):
        try:
            object.__setattr__(self, "selection_rule", SelectionRule(self.selection_rule))
        except ValueError as exc:
            raise InvalidParameterError(str(exc)) from None
        if self.max_trials is not None and self.max_trials < 1:
            raise InvalidParameterError("max_trials must be >= 1")
        if self.patience is not None and self.patience < 1:
            raise InvalidParameterError("patience must be >= 1")
        if self.improvement_epsilon < 0:
            raise InvalidParameterError("improvement_epsilon must be >= 0")
        if not 0 < self.knee_fraction <= 1:
            raise InvalidParameterError("knee_fraction must be in (0, 1]")

    @classmethod
    def exhaustive(cls, selection_rule=SelectionRule.MIN_RUNTIME) -> "StoppingPolicy":
        return cls(patience=None, selection_rule=selection_rule)


@dataclass(frozen=True)
class TrialResult:
    trial_index: int            # 1-based order of execution
    period: int
    runtime_ns: float
    slowdown_vs_allfast: float
    bytes_moved: int
    migrations: int
    fast_hit_fraction: float
    access_time_ns: float = 0.0
    periods: int = 0

    @classmethod
    def from_sim(cls, index: int, sim: SimResult, ideal_ns: float) -> "TrialResult":
        return cls(index, sim.period_requests, sim.runtime_ns, sim.runtime_ns / ideal_ns - 1.0,
                   sim.bytes_moved, sim.migrations, sim.fast_hit_fraction, sim.access_time_ns,
                   sim.periods)


TRIAL_COLUMNS = ["trial_index", "period", "runtime_ns", "slowdown_vs_allfast", "bytes_moved",
                 "migrations", "fast_hit_fraction"]


@dataclass(frozen=True)
class TuningReport:
    trials: tuple[TrialResult, ...]
    selected_period: int
    stop_reason: StopReason
    selection_rule: SelectionRule
    source: str = ""
    all_fast_runtime_ns: float = 0.0

    @property
    def trials_used(self) -> int:
        return len(self.trials)

    @property
    def selected(self) -> TrialResult:
        return next(t for t in self.trials if t.period == self.selected_period)

    @property
    def trials_to_selection(self) -> int:
        """How many trials were run up to and including the selected one."""
        return self.selected.trial_index


def _min_runtime(trials) -> TrialResult:
    return min(trials, key=lambda t: (t.runtime_ns, t.bytes_moved, t.period))


def _first_knee(trials, policy: StoppingPolicy) -> TrialResult:
    # earliest trial that cuts data moved sharply without giving up runtime;
    # falls back to the fastest trial when no such drop happens
    best = trials[0].runtime_ns
    for prev, cur in zip(trials, trials[1:]):
        best = min(best, cur.runtime_ns)
        if (cur.bytes_moved <= policy.knee_fraction * prev.bytes_moved
                and cur.runtime_ns <= best * (1.0 + policy.improvement_epsilon)):
            return cur
    return _min_runtime(trials)


def _trial(trace, config, scheduler, period) -> SimResult:
    try:
        return simulate(trace, config, scheduler, period)
    except Exception as exc:
        raise SimulationError(period, exc) from exc


def run_tuning(candidates: CandidateSet, trace: AccessTrace, config: HybridMemoryConfig,
               scheduler: SchedulerSpec, policy: StoppingPolicy | None = None) -> TuningReport:
    """Try candidate periods in order until the stopping policy fires."""
    policy = policy or StoppingPolicy()
    if candidates.domain is not Domain.REQUESTS:
        raise InvalidParameterError("candidates must be in the request domain; see to_request_domain")
    ideal = all_fast_runtime(trace, config)

    trials: list[TrialResult] = []
    best = None
    stale = 0
    reason = StopReason.CANDIDATES_EXHAUSTED
    for index, period in enumerate(candidates.periods, start=1):
        if policy.max_trials is not None and index > policy.max_trials:
            reason = StopReason.MAX_TRIALS
            break
        trial = TrialResult.from_sim(index, _trial(trace, config, scheduler, period), ideal)
        trials.append(trial)

        if best is None or trial.runtime_ns < best * (1.0 - policy.improvement_epsilon):
            stale = 0
        else:
            stale += 1
        best = trial.runtime_ns if best is None else min(best, trial.runtime_ns)

        if policy.target_slowdown is not None and trial.slowdown_vs_allfast <= policy.target_slowdown:
            reason = StopReason.TARGET_MET
            break
        if policy.patience is not None and stale >= policy.patience:
            reason = StopReason.PATIENCE_EXHAUSTED
            break

    if policy.selection_rule is SelectionRule.FIRST_KNEE:
        chosen = _first_knee(trials, policy)
    else:
        chosen = _min_runtime(trials)
    return TuningReport(tuple(trials), chosen.period, reason, policy.selection_rule,
                        candidates.source.value, ideal)


def sweep_periods(total_requests: int, step: int) -> list[int]:
    if int(step) != step or step < 1:
        raise InvalidParameterError("step must be an integer >= 1")
    periods = list(range(step, total_requests // 2 + 1, step))
    if not periods:
        raise InvalidParameterError(f"step {step} exceeds half the trace ({total_requests // 2})")
    return periods


def _sweep_one(args):
    trace, config, scheduler, period = args
    return simulate(trace, config, scheduler, period)


def exhaustive_best(trace: AccessTrace, config: HybridMemoryConfig, scheduler: SchedulerSpec,
                    step: int = 1, workers: int | None = None):
    """Simulate every period ``step, 2*step, ..., floor(N/2)``.

    Returns ``(best_period, best_runtime_ns, sweep)``; ties go to the shorter
    period. ``workers > 1`` spreads the sweep over processes; the result is
    identical to the sequential one.
    """
    periods = sweep_periods(len(trace), step)
    ideal = all_fast_runtime(trace, config)
    jobs = [(trace, config, scheduler, p) for p in periods]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            sims = list(pool.map(_sweep_one, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        sims = [_sweep_one(job) for job in jobs]
    sweep = tuple(TrialResult.from_sim(i, s, ideal) for i, s in enumerate(sims, start=1))
    best = min(sweep, key=lambda t: (t.runtime_ns, t.period))
    return best.period, best.runtime_ns, sweep
