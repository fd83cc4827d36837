from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from hmtune import baseline_candidates, cori_candidates, dominant_reuse, to_request_domain
from hmtune.errors import InvalidParameterError
from hmtune.freqgen import CandidateSet, DominantReuse, Source
from hmtune.reuse import Domain, ReuseHistogram

bins = st.dictionaries(st.integers(0, 10**6), st.integers(1, 1000), min_size=1, max_size=12)


def _hist(d):
    return ReuseHistogram.from_counts(d)


def test_dominant_reuse_examples():
    assert dominant_reuse(_hist({10: 5, 100: 2, 1000: 1})).value == 25
    assert dominant_reuse(_hist({500: 10})).value == 500
    assert dominant_reuse(_hist({10: 1, 20: 1})).value == 10


def test_dominant_reuse_is_exact():
    dr = dominant_reuse(_hist({1: 1, 2: 2, 9: 1}))
    # (2*1*1 + 1*2*2) / (2*1 + 1*2) = 6/4
    assert dr.value == Fraction(3, 2) and isinstance(dr.value, Fraction)


def test_dominant_reuse_empty():
    with pytest.raises(InvalidParameterError):
        dominant_reuse(ReuseHistogram(()))


@given(bins, st.integers(1, 50))
def test_dr_scale_invariant(d, k):
    assert dominant_reuse(_hist(d)) == dominant_reuse(_hist({v: c * k for v, c in d.items()}))


@given(bins)
def test_dr_within_range(d):
    assert min(d) <= dominant_reuse(_hist(d)).value <= max(d)


def test_cori_examples():
    assert cori_candidates(DominantReuse(Fraction(25)), 130).periods == (25, 50, 65)
    assert cori_candidates(DominantReuse(Fraction(10)), 60).periods == (10, 20, 30)
    assert cori_candidates(DominantReuse(Fraction(50)), 100).periods == (50,)


def test_cori_dr_beyond_half_warns():
    cands = cori_candidates(DominantReuse(Fraction(80)), 100)
    assert cands.periods == (50,) and cands.warning


def test_cori_rejects_zero_dr():
    with pytest.raises(InvalidParameterError):
        cori_candidates(DominantReuse(Fraction(0)), 100)


def test_baseline_orderings():
    assert baseline_candidates(10, 60, "right").periods == (10, 20, 30)
    assert baseline_candidates(10, 60, "left").periods == (30, 20, 10)
    rnd = baseline_candidates(10, 60, "random", seed=3)
    assert sorted(rnd.periods) == [10, 20, 30]
    assert rnd == baseline_candidates(10, 60, "random", seed=3)
    assert rnd.source is Source.BASE_RANDOM and rnd.seed == 3
    with pytest.raises(InvalidParameterError):
        baseline_candidates(10, 60, "middle")
    with pytest.raises(InvalidParameterError):
        baseline_candidates(0, 60)


@given(st.integers(1, 5000), st.integers(2, 10**5))
def test_multiples_and_shared_terminal(step, runtime):
    assume(2 * step <= runtime)
    cori = cori_candidates(DominantReuse(Fraction(step)), runtime).periods
    base = baseline_candidates(step, runtime, "right").periods
    assert cori == base
    assert cori[-1] == runtime // 2
    assert all(p % step == 0 for p in cori[:-1])
    assert list(cori) == sorted(set(cori))
    for order in ("left", "random"):
        assert sorted(baseline_candidates(step, runtime, order, 1).periods) == list(base)


def test_fractional_dr_rounds_in_request_domain():
    assert cori_candidates(DominantReuse(Fraction(49, 2)), 130).periods == (25, 50, 65)


def test_seconds_to_requests():
    secs = CandidateSet((1.0, 0.01, 0.25, 0.00001, 0.00002), Source.CORI, Domain.SECONDS)
    assert to_request_domain(secs, 10_000).periods == (10_000, 100, 2500, 1)


def test_seconds_domain_candidates():
    cands = cori_candidates(DominantReuse(Fraction(1, 2), Domain.SECONDS), 3)
    assert cands.periods == (0.5, 1.0, 1.5) and cands.domain is Domain.SECONDS
    assert to_request_domain(cands, 10_000).periods == (5000, 10_000, 15_000)
