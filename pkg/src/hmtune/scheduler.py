"""Periodic hot/LRU page schedulers."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from hmtune.errors import InvalidParameterError
from hmtune.trace import AccessTrace


class SchedulerKind(str, Enum):
    REACTIVE = "reactive"
    PREDICTIVE = "predictive"
    NOOP = "no-op"


class HotnessMode(str, Enum):
    TOPK = "topk"
    EMA = "ema"


@dataclass(frozen=True)
class SchedulerSpec:
    kind: SchedulerKind = SchedulerKind.REACTIVE
    history_periods: int = 1
    hotness_mode: HotnessMode = HotnessMode.TOPK
    ema_smoothing: float = 0.5
    ema_threshold: float = 0.25

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", SchedulerKind(self.kind))
            object.__setattr__(self, "hotness_mode", HotnessMode(self.hotness_mode))
        except ValueError as exc:
            raise InvalidParameterError(str(exc)) from None
        if self.kind is SchedulerKind.NOOP:
            return
        if int(self.history_periods) != self.history_periods or self.history_periods < 1:
            raise InvalidParameterError("history_periods must be an integer >= 1")
        if not 0 < self.ema_smoothing <= 1:
            raise InvalidParameterError("ema_smoothing must be in (0, 1]")
        if not 0 < self.ema_threshold < 1:
            raise InvalidParameterError("ema_threshold must be in (0, 1)")

    @property
    def label(self) -> str:
        return self.kind.value


NOOP = SchedulerSpec(SchedulerKind.NOOP)


@dataclass(frozen=True)
class MigrationPlan:
    """Ordered (promote, demote) page pairs; promote is slow-resident, demote fast-resident."""

    swaps: tuple[tuple[int, int], ...] = ()

    def __len__(self) -> int:
        return len(self.swaps)

    @property
    def promote(self) -> np.ndarray:
        return np.array([p for p, _ in self.swaps], dtype=np.int64)

    @property
    def demote(self) -> np.ndarray:
        return np.array([d for _, d in self.swaps], dtype=np.int64)


EMPTY_PLAN = MigrationPlan()


def update_ema(scores: np.ndarray, counts: np.ndarray, smoothing: float) -> np.ndarray:
    """One EMA step over per-period accessed bits (bit = count > 0)."""
    accessed = (np.asarray(counts) > 0).astype(np.float64)
    return smoothing * accessed + (1.0 - smoothing) * scores


def _rank(pages: np.ndarray, primary: np.ndarray, secondary: np.ndarray | None = None) -> np.ndarray:
    # descending by primary (then secondary), ties to the lower page id
    keys = [pages, -primary[pages]]
    if secondary is not None:
        keys.insert(1, -secondary[pages])
    return pages[np.lexsort(keys)]


def plan_period(spec: SchedulerSpec, placement, history, capacity_pages: int,
                scores: np.ndarray | None = None) -> MigrationPlan:
    """Choose this period's swaps.

    ``history`` holds per-page access counts for the scheduling window (the
    past ``history_periods`` periods for a reactive scheduler, the upcoming
    period for a predictive one). In ``ema`` mode ``scores`` must already
    include that window's update.
    """
    if spec.kind is SchedulerKind.NOOP or capacity_pages <= 0:
        return EMPTY_PLAN
    fast = np.asarray(placement.fast, dtype=bool)
    history = np.asarray(history)
    if history.shape != fast.shape:
        raise InvalidParameterError(
            f"history covers {history.size} pages but placement has {fast.size}")
    if history.size and history.min() < 0:
        raise InvalidParameterError("access counts must be non-negative")
    pages = np.arange(fast.size)

    if spec.hotness_mode is HotnessMode.TOPK:
        touched = pages[history > 0]
        hot = _rank(touched, history)[:capacity_pages]
    else:
        if scores is None or np.shape(scores) != fast.shape:
            raise InvalidParameterError("ema mode needs a score per page")
        scores = np.asarray(scores, dtype=np.float64)
        hot = _rank(pages[scores >= spec.ema_threshold], scores, history)

    hot_mask = np.zeros(fast.size, dtype=bool)
    hot_mask[hot] = True
    promote = hot[~fast[hot]]
    candidates = pages[fast & ~hot_mask]
    lru = np.asarray(placement.lru_clock)
    victims = candidates[np.lexsort((candidates, lru[candidates]))]

    n = min(promote.size, victims.size, capacity_pages)
    return MigrationPlan(tuple((int(p), int(d)) for p, d in zip(promote[:n], victims[:n])))


def period_bounds(total_requests: int, period_requests: int, period_index: int) -> tuple[int, int]:
    lo = period_index * period_requests
    if period_index < 0 or lo >= total_requests:
        raise InvalidParameterError(f"period {period_index} is outside the trace")
    return lo, min(total_requests, lo + period_requests)


def oracle_counts(trace: AccessTrace, period_requests: int, period_index: int) -> np.ndarray:
    """Exact per-page access counts of one period (what a predictive scheduler sees)."""
    if period_requests < 1:
        raise InvalidParameterError("period_requests must be >= 1")
    lo, hi = period_bounds(len(trace), period_requests, period_index)
    return np.bincount(trace.accesses[lo:hi], minlength=trace.footprint_pages)
