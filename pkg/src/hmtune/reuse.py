"""Page reuse-distance histograms.

The reuse distance between two consecutive accesses to a page is the number
of accesses to *other* pages issued in between (an access count, not a count
of distinct pages). Histograms can also come from externally measured loop
durations, in seconds.
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum

import numpy as np

from hmtune.errors import EmptyTraceError, InvalidParameterError, ParseError
from hmtune.trace import AccessTrace

DEFAULT_BIN_WIDTH = 1000


class Domain(str, Enum):
    REQUESTS = "requests"
    SECONDS = "seconds"


HEADERS = {Domain.REQUESTS: "reuse_requests", Domain.SECONDS: "duration_seconds"}


@dataclass(frozen=True)
class ReuseHistogram:
    bins: tuple[tuple[float, int], ...]
    domain: Domain = Domain.REQUESTS

    def __post_init__(self):
        object.__setattr__(self, "domain", Domain(self.domain))
        bins = tuple((v, int(c)) for v, c in self.bins)
        for (a, _), (b, _) in zip(bins, bins[1:]):
            if not a < b:
                raise InvalidParameterError("histogram bins must be strictly ascending")
        if any(c < 1 for _, c in bins):
            raise InvalidParameterError("histogram counts must be >= 1")
        object.__setattr__(self, "bins", bins)

    @classmethod
    def from_counts(cls, counts, domain=Domain.REQUESTS) -> "ReuseHistogram":
        """Build from a ``{value: count}`` mapping, dropping zero counts."""
        return cls(tuple((v, c) for v, c in sorted(counts.items()) if c > 0), domain)

    @property
    def total_observations(self) -> int:
        return sum(c for _, c in self.bins)

    @property
    def values(self) -> list:
        return [v for v, _ in self.bins]

    @property
    def counts(self) -> list[int]:
        return [c for _, c in self.bins]

    def __len__(self) -> int:
        return len(self.bins)


def reuse_distances(trace: AccessTrace) -> np.ndarray:
    """Reuse distance of every non-first access, in trace order of the later access."""
    a = trace.accesses
    if a.size == 0:
        raise EmptyTraceError("trace has no accesses")
    order = np.lexsort((np.arange(a.size), a))
    same = a[order[1:]] == a[order[:-1]]
    later = order[1:][same]
    earlier = order[:-1][same]
    dist = later - earlier - 1
    return dist[np.argsort(later, kind="stable")]


def collect_reuse(trace: AccessTrace, bin_width: int = DEFAULT_BIN_WIDTH) -> ReuseHistogram:
    """Histogram of page reuse distances, binned to ``floor(d / w) * w``."""
    if int(bin_width) != bin_width or bin_width < 1:
        raise InvalidParameterError("bin_width must be an integer >= 1")
    dist = reuse_distances(trace)
    binned = (dist // bin_width) * bin_width
    values, counts = np.unique(binned, return_counts=True)
    return ReuseHistogram(tuple(zip(values.tolist(), counts.tolist())), Domain.REQUESTS)


def coarsen(hist: ReuseHistogram, bin_width: int) -> ReuseHistogram:
    """Re-bin a request-domain histogram to a coarser ``bin_width``."""
    merged: Counter = Counter()
    for value, count in hist.bins:
        merged[(value // bin_width) * bin_width] += count
    return ReuseHistogram.from_counts(merged, hist.domain)


def _number(text: str, lineno: int, path, kind=float):
    try:
        value = kind(text)
    except ValueError:
        raise ParseError(f"non-numeric value {text!r}", lineno, path) from None
    if isinstance(value, float) and not math.isfinite(value):
        raise ParseError(f"non-finite value {text!r}", lineno, path)
    return value


def read_histogram_csv(path) -> ReuseHistogram:
    """Read a two-column histogram CSV.

    The header decides the domain (``duration_seconds,count`` or
    ``reuse_requests,count``). ``#`` comment lines are skipped and duplicate
    values are merged by summing their counts.
    """
    merged: Counter = Counter()
    domain = None
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or (row[0].startswith("#")):
                continue
            cells = [c.strip() for c in row]
            if domain is None:
                for dom, head in HEADERS.items():
                    if cells == [head, "count"]:
                        domain = dom
                if domain is None:
                    raise ParseError(f"unexpected header {','.join(row)!r}", lineno, path)
                continue
            if len(cells) != 2:
                raise ParseError(f"expected two columns, got {len(cells)}", lineno, path)
            kind = int if domain is Domain.REQUESTS else float
            value = _number(cells[0], lineno, path, kind)
            count = _number(cells[1], lineno, path, int)
            if value < 0 or count < 0:
                raise ParseError("values and counts must be non-negative", lineno, path)
            merged[value] += count
    if domain is None:
        raise ParseError("missing header", None, path)
    return ReuseHistogram.from_counts(merged, domain)


def import_loop_histogram(path) -> ReuseHistogram:
    """Load loop durations (``duration_seconds,count``) as a seconds-domain histogram."""
    hist = read_histogram_csv(path)
    if hist.domain is not Domain.SECONDS:
        raise ParseError("loop histogram needs a 'duration_seconds,count' header", 1, path)
    return hist


def write_histogram_csv(hist: ReuseHistogram, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# domain={hist.domain.value}\n")
        fh.write(f"{HEADERS[hist.domain]},count\n")
        for value, count in hist.bins:
            fh.write(f"{value!r},{count}\n")
