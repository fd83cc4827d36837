"""Flat fast/slow hybrid memory model.

Runtime is accumulated request by request: every access pays the latency of
the tier its page sits in, plus any wait behind that tier's bandwidth queue.
Each tier is one FIFO server; a 64-byte request occupies it for
``64 / bandwidth`` and a page swap puts ``2 * page_size`` bytes on both
tiers (one page in, one page out). Every period start charges a fixed
scheduler overhead and, per swap, a fixed migration delay.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from hmtune.errors import EmptyTraceError, InvalidParameterError
from hmtune.scheduler import (
    NOOP,
    HotnessMode,
    SchedulerKind,
    SchedulerSpec,
    plan_period,
    update_ema,
)
from hmtune.trace import AccessTrace, TraceStats, compute_stats

REQUEST_BYTES = 64
# 64 B every 100 ns is 0.64 GB/s; the default fast tier runs that stream at 50% load
DEFAULT_FAST_BANDWIDTH = 1.28e9


@dataclass(frozen=True)
class HybridMemoryConfig:
    fast_capacity_fraction: float = 0.20
    fast_latency_ns: float = 100.0
    slow_latency_multiplier: float = 3.0
    fast_bandwidth_bytes_per_s: float = DEFAULT_FAST_BANDWIDTH
    slow_bandwidth_fraction: float = 0.37
    per_migration_delay_ns: float = 3000.0
    per_period_overhead_ns: float = 5000.0
    requests_per_second: float = 10_000.0
    migration_overlap_fraction: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or math.isnan(value):
                raise InvalidParameterError(f"{f.name} must be a number, got {value!r}")
        if not 0 < self.fast_capacity_fraction <= 1:
            raise InvalidParameterError("fast_capacity_fraction must be in (0, 1]")
        if self.slow_latency_multiplier < 1:
            raise InvalidParameterError("slow_latency_multiplier must be >= 1")
        if not 0 < self.slow_bandwidth_fraction <= 1:
            raise InvalidParameterError("slow_bandwidth_fraction must be in (0, 1]")
        if self.requests_per_second <= 0:
            raise InvalidParameterError("requests_per_second must be > 0")
        if self.fast_latency_ns <= 0 or self.fast_bandwidth_bytes_per_s <= 0:
            raise InvalidParameterError("fast latency and bandwidth must be > 0")
        if self.per_migration_delay_ns < 0 or self.per_period_overhead_ns < 0:
            raise InvalidParameterError("overheads must be >= 0")
        if not 0 <= self.migration_overlap_fraction <= 1:
            raise InvalidParameterError("migration_overlap_fraction must be in [0, 1]")

    @property
    def slow_latency_ns(self) -> float:
        return self.fast_latency_ns * self.slow_latency_multiplier

    @property
    def slow_bandwidth_bytes_per_s(self) -> float:
        return self.fast_bandwidth_bytes_per_s * self.slow_bandwidth_fraction

    def capacity_pages(self, footprint_pages: int) -> int:
        return int(math.floor(self.fast_capacity_fraction * footprint_pages + 1e-9))

    def requests_to_seconds(self, requests: float) -> float:
        return requests / self.requests_per_second

    def seconds_to_requests(self, seconds: float) -> int:
        return max(1, int(math.floor(seconds * self.requests_per_second + 0.5)))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class PlacementMap:
    fast: np.ndarray        # bool per page
    lru_clock: np.ndarray   # last access index per page, -1 if never touched

    @property
    def fast_count(self) -> int:
        return int(self.fast.sum())

    def apply(self, plan) -> None:
        if len(plan):
            self.fast[plan.promote] = True
            self.fast[plan.demote] = False


def initial_placement(trace_stats: TraceStats, config: HybridMemoryConfig) -> PlacementMap:
    """Interleave pages across tiers in proportion to capacity.

    Page ``i`` is fast iff ``(i * C) mod P < C`` with ``C`` fast pages out of
    ``P``. This puts exactly ``C`` pages in fast memory, spread evenly; for
    ``C = P / k`` it is the plain "every k-th page" rule.
    """
    pages = trace_stats.distinct_pages
    if pages <= 0:
        raise EmptyTraceError("cannot place a trace with no pages")
    cap = config.capacity_pages(pages)
    idx = np.arange(pages, dtype=np.int64)
    fast = (idx * cap) % pages < cap
    return PlacementMap(fast, np.full(pages, -1, dtype=np.int64))


@dataclass(frozen=True)
class PeriodRecord:
    index: int
    start: int
    requests: int
    fast_hits: int
    migrations: int
    fast_resident: int
    bandwidth_delay_ns: float
    runtime_ns: float


@dataclass(frozen=True)
class SimResult:
    runtime_ns: float
    access_time_ns: float
    bandwidth_delay_ns: float
    migration_time_ns: float
    period_overhead_ns: float
    migrations: int
    bytes_moved: int
    fast_hit_fraction: float
    period_requests: int
    capacity_pages: int
    footprint_pages: int
    per_period_log: tuple[PeriodRecord, ...] = field(repr=False, default=())

    @property
    def periods(self) -> int:
        return len(self.per_period_log)

    def summary(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "per_period_log"}
        out["periods"] = self.periods
        return out


SUMMARY_COLUMNS = [
    "period_requests", "periods", "runtime_ns", "access_time_ns", "bandwidth_delay_ns",
    "migration_time_ns", "period_overhead_ns", "migrations", "bytes_moved",
    "fast_hit_fraction", "capacity_pages", "footprint_pages",
]
PERIOD_COLUMNS = [f.name for f in fields(PeriodRecord)]


class _Queues:
    """Two FIFO servers (fast = 0, slow = 1) driven by a single issuing clock."""

    def __init__(self, latency, service):
        self.latency = latency
        self.service = service
        self.free_at = [0.0, 0.0]
        # when service <= latency a tier can only make the first of a run of
        # its own requests wait, which lets a period be settled in O(1)
        self.fast_path = service[0] <= latency[0] and service[1] <= latency[1]

    def enqueue_bulk(self, clock: float, busy: tuple[float, float]) -> None:
        for m in (0, 1):
            self.free_at[m] = max(self.free_at[m], clock) + busy[m]

    def run(self, clock: float, tiers: np.ndarray) -> tuple[float, float]:
        """Issue the period's requests (tier per request); return (new clock, wait)."""
        if tiers.size == 0:
            return clock, 0.0
        if self.fast_path:
            return self._run_fast(clock, tiers)
        return self._run_loop(clock, tiers)

    def _run_fast(self, clock, tiers):
        lat = self.latency
        first = int(tiers[0])
        wait0 = max(0.0, self.free_at[first] - clock)
        other = 1 - first
        wait1 = 0.0
        hits = np.flatnonzero(tiers == other)
        if hits.size:
            i1 = int(hits[0])
            arrival = clock + wait0 + i1 * lat[first]
            wait1 = max(0.0, self.free_at[other] - arrival)
        n_slow = int(tiers.sum())
        end = clock + wait0 + wait1 + (tiers.size - n_slow) * lat[0] + n_slow * lat[1]
        # any tier that served a request is idle by the time the clock reaches `end`
        self.free_at[first] = end
        if hits.size:
            self.free_at[other] = end
        return end, wait0 + wait1

    def _run_loop(self, clock, tiers):
        lat, svc, free = self.latency, self.service, self.free_at
        waited = 0.0
        for m in tiers.tolist():
            start = free[m] if free[m] > clock else clock
            waited += start - clock
            free[m] = start + svc[m]
            clock = start + lat[m]
        return clock, waited


def simulate(trace: AccessTrace, config: HybridMemoryConfig, scheduler: SchedulerSpec,
             period_requests: int) -> SimResult:
    """Run ``trace`` through the hybrid memory with a scheduler invoked every
    ``period_requests`` requests."""
    stats = compute_stats(trace)
    n = stats.total_requests
    if int(period_requests) != period_requests or not 1 <= period_requests <= n:
        raise InvalidParameterError(f"period_requests must be in [1, {n}], got {period_requests}")
    period_requests = int(period_requests)
    pages = stats.distinct_pages
    cap = config.capacity_pages(pages)
    placement = initial_placement(stats, config)
    accesses = trace.accesses

    lat = (float(config.fast_latency_ns), float(config.slow_latency_ns))
    bw = (config.fast_bandwidth_bytes_per_s, config.slow_bandwidth_bytes_per_s)
    queues = _Queues(lat, (REQUEST_BYTES / bw[0] * 1e9, REQUEST_BYTES / bw[1] * 1e9))
    swap_bytes = 2 * trace.page_size_bytes
    swap_busy = (swap_bytes / bw[0] * 1e9, swap_bytes / bw[1] * 1e9)
    visible_migration = (1.0 - config.migration_overlap_fraction) * config.per_migration_delay_ns

    kind = scheduler.kind
    ema = scheduler.hotness_mode is HotnessMode.EMA
    scores = np.zeros(pages) if ema else None
    history: deque = deque(maxlen=scheduler.history_periods if kind is SchedulerKind.REACTIVE else 1)
    positions = np.arange(n, dtype=np.int64)

    clock = 0.0
    total_wait = 0.0
    total_swaps = 0
    fast_hits = 0
    log = []
    n_periods = -(-n // period_requests)
    for k in range(n_periods):
        lo, hi = k * period_requests, min(n, (k + 1) * period_requests)
        seg = accesses[lo:hi]
        period_start = clock
        clock += config.per_period_overhead_ns

        swaps = 0
        if kind is not SchedulerKind.NOOP:
            if kind is SchedulerKind.PREDICTIVE:
                window = np.bincount(seg, minlength=pages)
            elif history:
                window = history[0] if len(history) == 1 else np.sum(history, axis=0)
            else:
                window = np.zeros(pages, dtype=np.int64)
            # EMA folds in each window once: the finished period (reactive)
            # or the one about to run (predictive)
            if ema and kind is SchedulerKind.PREDICTIVE:
                scores = update_ema(scores, window, scheduler.ema_smoothing)
            elif ema and history:
                scores = update_ema(scores, history[-1], scheduler.ema_smoothing)
            plan = plan_period(scheduler, placement, window, cap, scores)
            swaps = len(plan)
            if swaps:
                placement.apply(plan)
                queues.enqueue_bulk(clock, (swaps * swap_busy[0], swaps * swap_busy[1]))
                clock += swaps * visible_migration
                total_swaps += swaps

        tiers = (~placement.fast[seg]).astype(np.int8)
        clock, waited = queues.run(clock, tiers)
        total_wait += waited
        hits = int(tiers.size - int(tiers.sum()))
        fast_hits += hits

        # last touch per page within the period
        rev_pages, rev_first = np.unique(seg[::-1], return_index=True)
        placement.lru_clock[rev_pages] = positions[hi - 1 - rev_first]
        if kind is SchedulerKind.REACTIVE:
            history.append(np.bincount(seg, minlength=pages))

        log.append(PeriodRecord(k, lo, hi - lo, hits, swaps, placement.fast_count,
                                waited, clock - period_start))

    slow_hits = n - fast_hits
    access_time = fast_hits * lat[0] + slow_hits * lat[1]
    migration_time = total_swaps * config.per_migration_delay_ns
    overhead = n_periods * config.per_period_overhead_ns
    runtime = (access_time + total_wait
               + (1.0 - config.migration_overlap_fraction) * migration_time + overhead)
    return SimResult(
        runtime_ns=runtime,
        access_time_ns=access_time,
        bandwidth_delay_ns=total_wait,
        migration_time_ns=migration_time,
        period_overhead_ns=overhead,
        migrations=total_swaps,
        bytes_moved=total_swaps * swap_bytes,
        fast_hit_fraction=fast_hits / n,
        period_requests=period_requests,
        capacity_pages=cap,
        footprint_pages=pages,
        per_period_log=tuple(log),
    )


def all_fast_runtime(trace: AccessTrace, config: HybridMemoryConfig) -> float:
    """Runtime with infinite fast memory: no scheduler, no overheads."""
    ideal = replace(config, fast_capacity_fraction=1.0, per_period_overhead_ns=0.0)
    return simulate(trace, ideal, NOOP, len(trace)).runtime_ns
