from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hmtune import (
    AccessTrace,
    HybridMemoryConfig,
    SchedulerSpec,
    all_fast_runtime,
    compute_stats,
    generate_synthetic,
    initial_placement,
    simulate,
)
from hmtune.errors import InvalidParameterError
from hmtune.memsim import REQUEST_BYTES
from hmtune.scheduler import NOOP
from oracles import ref_simulate

NO_OVERHEAD = HybridMemoryConfig(per_period_overhead_ns=0.0, per_migration_delay_ns=0.0)
SCHEDULERS = ["reactive", "predictive", "no-op"]


def _fast_pages(pages, f):
    stats = compute_stats(AccessTrace.from_pages(range(pages)))
    return np.flatnonzero(initial_placement(stats, HybridMemoryConfig(fast_capacity_fraction=f)).fast)


def test_interleaved_placement():
    assert _fast_pages(10, 0.2).tolist() == [0, 5]
    assert _fast_pages(10, 0.5).tolist() == [0, 2, 4, 6, 8]
    assert _fast_pages(10, 1.0).tolist() == list(range(10))


@given(st.integers(1, 500), st.floats(0.01, 1.0))
def test_placement_fills_capacity_exactly(pages, f):
    cfg = HybridMemoryConfig(fast_capacity_fraction=f)
    stats = compute_stats(AccessTrace.from_pages(range(pages)))
    assert initial_placement(stats, cfg).fast_count == cfg.capacity_pages(pages)


def test_all_fast_runtime_is_n_latencies():
    trace = generate_synthetic("random", 50, 20, seed=1)
    assert all_fast_runtime(trace, HybridMemoryConfig()) == 1000 * 100.0
    cfg = HybridMemoryConfig(fast_capacity_fraction=1.0, per_period_overhead_ns=0.0)
    assert simulate(trace, cfg, NOOP, len(trace)).runtime_ns == 1000 * 100.0


def test_two_page_alternation():
    # page 0 fast, page 1 slow (f = 0.5), no saturation and no overheads
    trace = AccessTrace.from_pages([0, 1] * 5)
    cfg = replace(NO_OVERHEAD, fast_capacity_fraction=0.5)
    sim = simulate(trace, cfg, NOOP, len(trace))
    assert sim.access_time_ns == 5 * 100 + 5 * 300
    assert sim.runtime_ns == sim.access_time_ns
    assert sim.bandwidth_delay_ns == 0


def test_default_stream_uses_half_the_fast_bandwidth():
    cfg = HybridMemoryConfig()
    assert REQUEST_BYTES / cfg.fast_latency_ns * 1e9 == pytest.approx(0.5 * cfg.fast_bandwidth_bytes_per_s)
    assert cfg.slow_latency_ns == 3 * cfg.fast_latency_ns


def test_config_validation():
    for kwargs in [dict(fast_capacity_fraction=0), dict(slow_latency_multiplier=0.5),
                   dict(slow_bandwidth_fraction=1.5), dict(requests_per_second=0),
                   dict(per_migration_delay_ns=-1), dict(migration_overlap_fraction=2),
                   dict(fast_latency_ns="fast")]:
        with pytest.raises(InvalidParameterError):
            HybridMemoryConfig(**kwargs)


def test_period_validation():
    trace = generate_synthetic("strided", 4, 3)
    for bad in (0, 13, 2.5):
        with pytest.raises(InvalidParameterError):
            simulate(trace, HybridMemoryConfig(), NOOP, bad)


def test_time_conversion():
    cfg = HybridMemoryConfig()
    assert cfg.seconds_to_requests(1.0) == 10_000
    assert cfg.seconds_to_requests(0.01) == 100
    assert cfg.requests_to_seconds(2500) == 0.25


seqs = st.lists(st.integers(0, 14), min_size=2, max_size=160)
configs = st.builds(
    HybridMemoryConfig,
    fast_capacity_fraction=st.sampled_from([0.2, 0.34, 0.5, 1.0]),
    fast_bandwidth_bytes_per_s=st.sampled_from([1.28e9, 0.2e9, 51.2e9]),
    per_migration_delay_ns=st.sampled_from([0.0, 300.0, 3000.0]),
    per_period_overhead_ns=st.sampled_from([0.0, 5000.0]),
    migration_overlap_fraction=st.sampled_from([0.0, 0.5]),
)


@settings(max_examples=150, deadline=None)
@given(seqs, configs, st.sampled_from(SCHEDULERS), st.integers(1, 40))
def test_matches_reference_simulator(seq, cfg, kind, period):
    trace = AccessTrace.from_pages(seq)
    period = min(period, len(seq))
    sim = simulate(trace, cfg, SchedulerSpec(kind), period)
    runtime, hits, swaps = ref_simulate(trace.accesses.tolist(), 4096, cfg, kind, period)
    assert sim.runtime_ns == pytest.approx(runtime, rel=1e-9)
    assert sim.fast_hit_fraction * len(seq) == pytest.approx(hits)
    assert sim.migrations == swaps


@settings(max_examples=100, deadline=None)
@given(seqs, configs, st.sampled_from(SCHEDULERS), st.integers(1, 40))
def test_invariants(seq, cfg, kind, period):
    trace = AccessTrace.from_pages(seq)
    period = min(period, len(seq))
    sim = simulate(trace, cfg, SchedulerSpec(kind), period)
    cap = sim.capacity_pages
    assert sim.footprint_pages == trace.footprint_pages
    for rec in sim.per_period_log:
        assert rec.fast_resident == cap
        assert rec.migrations <= cap
    assert sum(r.requests for r in sim.per_period_log) == len(seq)
    assert sim.bytes_moved == 2 * 4096 * sim.migrations
    assert sim.periods == -(-len(seq) // period)
    if REQUEST_BYTES / cfg.fast_bandwidth_bytes_per_s * 1e9 <= cfg.fast_latency_ns:
        # a saturated fast tier can lose to two tiers serving in parallel
        assert all_fast_runtime(trace, cfg) <= sim.runtime_ns
    assert simulate(trace, cfg, SchedulerSpec(kind), period) == sim
    if kind == "no-op":
        assert sim.bytes_moved == 0 and sim.migration_time_ns == 0
        assert sim.period_overhead_ns == sim.periods * cfg.per_period_overhead_ns


@settings(max_examples=100, deadline=None)
@given(seqs, configs, st.sampled_from(SCHEDULERS), st.integers(1, 40), st.floats(1.0, 3.0))
def test_slower_slow_tier_never_helps(seq, cfg, kind, period, extra):
    trace = AccessTrace.from_pages(seq)
    period = min(period, len(seq))
    base = simulate(trace, cfg, SchedulerSpec(kind), period).runtime_ns
    slower = replace(cfg, slow_latency_multiplier=cfg.slow_latency_multiplier + extra)
    assert simulate(trace, slower, SchedulerSpec(kind), period).runtime_ns >= base


def test_saturated_queue_path_matches_reference():
    # slow service time above its latency forces the per-request queue loop
    cfg = HybridMemoryConfig(fast_bandwidth_bytes_per_s=0.1e9)
    trace = generate_synthetic("random", 30, 20, seed=4)
    for kind in SCHEDULERS:
        sim = simulate(trace, cfg, SchedulerSpec(kind), 37)
        runtime, _, _ = ref_simulate(trace.accesses.tolist(), 4096, cfg, kind, 37)
        assert sim.runtime_ns == pytest.approx(runtime, rel=1e-9)
        assert sim.bandwidth_delay_ns > 0


def test_history_and_ema_modes_run():
    trace = generate_synthetic("cyclic-phases", 40, 6, sets=2, sweeps=3)
    cfg = HybridMemoryConfig()
    for spec in [SchedulerSpec("reactive", history_periods=3),
                 SchedulerSpec("reactive", hotness_mode="ema"),
                 SchedulerSpec("predictive", hotness_mode="ema")]:
        sim = simulate(trace, cfg, spec, 20)
        assert all(r.fast_resident == sim.capacity_pages for r in sim.per_period_log)
        assert sim == simulate(trace, cfg, spec, 20)


def test_reactive_first_period_does_nothing():
    trace = generate_synthetic("strided", 10, 4)
    sim = simulate(trace, HybridMemoryConfig(), SchedulerSpec("reactive"), 10)
    assert sim.per_period_log[0].migrations == 0
