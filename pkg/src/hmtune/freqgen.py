"""Candidate scheduling periods: reuse-guided and step-function baselines."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from hmtune.errors import InvalidParameterError
from hmtune.reuse import Domain, ReuseHistogram
from hmtune.rng import XorShift64Star


class Source(str, Enum):
    CORI = "cori"
    BASE_LEFT = "base-left"
    BASE_RIGHT = "base-right"
    BASE_RANDOM = "base-random"


ORDERINGS = {"left": Source.BASE_LEFT, "right": Source.BASE_RIGHT, "random": Source.BASE_RANDOM}


@dataclass(frozen=True)
class DominantReuse:
    value: Fraction
    domain: Domain = Domain.REQUESTS

    def __float__(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class CandidateSet:
    periods: tuple
    source: Source
    domain: Domain = Domain.REQUESTS
    order_note: str = "ascending period"
    seed: int | None = None
    warning: str | None = None

    def __post_init__(self):
        if not self.periods:
            raise InvalidParameterError("candidate set is empty")
        object.__setattr__(self, "source", Source(self.source))
        object.__setattr__(self, "domain", Domain(self.domain))

    def __len__(self) -> int:
        return len(self.periods)

    def __iter__(self):
        return iter(self.periods)

    def csv_rows(self):
        for rank, period in enumerate(self.periods, start=1):
            yield {"rank": rank, "period": period, "domain": self.domain.value,
                   "source": self.source.value}


CANDIDATE_COLUMNS = ["rank", "period", "domain", "source"]


def dominant_reuse(hist: ReuseHistogram) -> DominantReuse:
    """Weighted mean of the reuse values, biased toward short, frequent reuses.

    Bin ``i`` (1-based, ascending) gets weight ``(N - i) * count_i``, so the
    longest bin never contributes. With a single bin the weights all vanish
    and its value is returned as is. Computed exactly with fractions.
    """
    if len(hist) == 0:
        raise InvalidParameterError("dominant reuse of an empty histogram")
    values = [Fraction(v) for v in hist.values]
    counts = hist.counts
    n = len(values)
    if n == 1:
        return DominantReuse(values[0], hist.domain)
    num = Fraction(0)
    den = 0
    for i, (reuse, repeat) in enumerate(zip(values, counts), start=1):
        num += (n - i) * repeat * reuse
        den += (n - i) * repeat
    return DominantReuse(num / den, hist.domain)


def _round_half_up(x) -> int:
    return int(math.floor(x + Fraction(1, 2)))


def _multiples(step, runtime, domain: Domain) -> tuple[list, str | None]:
    """``[step, 2*step, ...]`` below ``runtime / 2``, then ``runtime / 2`` itself."""
    if domain is Domain.REQUESTS:
        step = max(1, _round_half_up(Fraction(step)))
        half = int(runtime) // 2
    else:
        step = Fraction(step)
        half = Fraction(runtime) / 2
    if step <= 0:
        raise InvalidParameterError("period step must be positive")
    if half <= 0:
        raise InvalidParameterError(f"runtime {runtime} is too short to split into two periods")
    if step > half:
        return [half], f"step {step} exceeds runtime/2 = {half}; only runtime/2 is proposed"
    out = []
    k = 1
    while k * step < half:
        out.append(k * step)
        k += 1
    out.append(half)
    return out, None


def _emit(values, domain: Domain):
    if domain is Domain.REQUESTS:
        return tuple(int(v) for v in values)
    return tuple(float(v) for v in values)


def cori_candidates(dr: DominantReuse, runtime) -> CandidateSet:
    """Multiples of the dominant reuse up to half the runtime, shortest first."""
    if dr.value <= 0:
        raise InvalidParameterError(f"dominant reuse must be positive, got {dr.value}")
    periods, warning = _multiples(dr.value, runtime, dr.domain)
    return CandidateSet(_emit(periods, dr.domain), Source.CORI, dr.domain,
                        "ascending period", None, warning)


def baseline_candidates(timestep, runtime, ordering: str = "right", seed: int = 0,
                        domain: Domain | str = Domain.REQUESTS) -> CandidateSet:
    """Step-function candidates ``[t, 2t, ..., runtime/2]`` in the given traversal order.

    ``right`` walks shortest period first, ``left`` longest first and
    ``random`` is a seeded xorshift64* shuffle.
    """
    domain = Domain(domain)
    if ordering not in ORDERINGS:
        raise InvalidParameterError(f"ordering must be one of {sorted(ORDERINGS)}, got {ordering!r}")
    if Fraction(timestep) < 1:
        raise InvalidParameterError("timestep must be >= 1")
    periods, warning = _multiples(timestep, runtime, domain)
    periods = list(_emit(periods, domain))
    note = "ascending period"
    used_seed = None
    if ordering == "left":
        periods.reverse()
        note = "descending period"
    elif ordering == "random":
        periods = XorShift64Star(seed).shuffle(periods)
        note = "seeded permutation"
        used_seed = seed
    return CandidateSet(tuple(periods), ORDERINGS[ordering], domain, note, used_seed, warning)


def to_request_domain(cands: CandidateSet, requests_per_second: float) -> CandidateSet:
    """Convert seconds-domain periods to request counts (nearest, at least 1).

    Periods that collapse onto the same request count are kept once, at their
    first position.
    """
    if cands.domain is Domain.REQUESTS:
        return cands
    seen = []
    for period in cands.periods:
        req = max(1, _round_half_up(Fraction(period) * Fraction(requests_per_second)))
        if req not in seen:
            seen.append(req)
    return CandidateSet(tuple(seen), cands.source, Domain.REQUESTS, cands.order_note,
                        cands.seed, cands.warning)


def source_from_generator(name: str) -> Source:
    try:
        return Source(name)
    except ValueError:
        raise InvalidParameterError(
            f"unknown generator {name!r}; choose from {[s.value for s in Source]}") from None
