"""Page-granular memory access traces: file I/O and synthetic generators."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from hmtune.errors import EmptyTraceError, InvalidParameterError, ParseError
from hmtune.rng import XorShift64Star

DEFAULT_PAGE_SIZE = 4096


class TraceFormat(str, Enum):
    HEX_ADDRESS = "hex-address"
    PAGE_CSV = "page-csv"


class PatternKind(str, Enum):
    STRIDED = "strided"
    TRIANGULAR = "triangular"
    RANDOM = "random"
    CYCLIC_PHASES = "cyclic-phases"


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.int64)
    arr.setflags(write=False)
    return arr


def canonicalize(pages) -> tuple[np.ndarray, np.ndarray]:
    """Renumber pages densely in order of first appearance.

    Returns ``(accesses, original)`` where ``original[i]`` is the page id that
    was renumbered to ``i``.
    """
    pages = np.asarray(pages, dtype=np.int64)
    if pages.size == 0:
        return pages.copy(), pages.copy()
    uniq, first, inverse = np.unique(pages, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    return rank[inverse.reshape(-1)], uniq[order]


@dataclass(frozen=True, eq=False)
class AccessTrace:
    accesses: np.ndarray
    page_size_bytes: int = DEFAULT_PAGE_SIZE
    original_pages: np.ndarray = field(default=None, repr=False)
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "accesses", _frozen(self.accesses))
        if self.original_pages is None:
            object.__setattr__(self, "original_pages", _frozen(np.arange(self.footprint_pages)))
        else:
            object.__setattr__(self, "original_pages", _frozen(self.original_pages))

    @classmethod
    def from_pages(cls, pages, page_size_bytes: int = DEFAULT_PAGE_SIZE, name: str = "") -> "AccessTrace":
        accesses, original = canonicalize(pages)
        return cls(accesses, page_size_bytes, original, name)

    @property
    def footprint_pages(self) -> int:
        if self.accesses.size == 0:
            return 0
        return int(self.accesses.max()) + 1

    def __len__(self) -> int:
        return int(self.accesses.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AccessTrace):
            return NotImplemented
        return (
            self.page_size_bytes == other.page_size_bytes
            and np.array_equal(self.accesses, other.accesses)
            and np.array_equal(self.original_pages, other.original_pages)
        )

    def __hash__(self):
        return hash((self.page_size_bytes, self.accesses.tobytes()))


@dataclass(frozen=True)
class TraceStats:
    total_requests: int
    footprint_bytes: int
    distinct_pages: int


def compute_stats(trace: AccessTrace) -> TraceStats:
    if len(trace) == 0:
        raise EmptyTraceError("trace has no accesses")
    distinct = trace.footprint_pages
    return TraceStats(len(trace), distinct * trace.page_size_bytes, distinct)


def _read_lines(path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if not text.strip():
        raise EmptyTraceError(f"{path}: empty trace file")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def _parse_hex(lines, path, page_size: int) -> list[int]:
    pages = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line.startswith(("0x", "0X")):
            raise ParseError(f"expected 0x-prefixed address, got {raw!r}", lineno, path)
        try:
            addr = int(line[2:], 16)
        except ValueError:
            raise ParseError(f"bad hex address {raw!r}", lineno, path) from None
        pages.append(addr // page_size)
    return pages


def _parse_page_csv(lines, path) -> list[int]:
    if lines[0].strip() != "index,page":
        raise ParseError(f"expected header 'index,page', got {lines[0]!r}", 1, path)
    pages = []
    for lineno, raw in enumerate(lines[1:], start=2):
        parts = raw.strip().split(",")
        if len(parts) != 2:
            raise ParseError(f"expected two columns, got {raw!r}", lineno, path)
        try:
            index, page = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer field in {raw!r}", lineno, path) from None
        if index != len(pages):
            raise ParseError(f"index {index} out of sequence (expected {len(pages)})", lineno, path)
        if page < 0:
            raise ParseError(f"negative page id {page}", lineno, path)
        pages.append(page)
    return pages


def load_trace(path, format: str | TraceFormat = TraceFormat.HEX_ADDRESS,
               page_size_bytes: int = DEFAULT_PAGE_SIZE) -> AccessTrace:
    fmt = TraceFormat(format)
    lines = _read_lines(path)
    if fmt is TraceFormat.HEX_ADDRESS:
        pages = _parse_hex(lines, path, page_size_bytes)
    else:
        pages = _parse_page_csv(lines, path)
    if not pages:
        raise EmptyTraceError(f"{path}: no accesses")
    return AccessTrace.from_pages(pages, page_size_bytes, name=os.path.basename(str(path)))


def save_trace(trace: AccessTrace, path, format: str | TraceFormat = TraceFormat.HEX_ADDRESS) -> None:
    """Write ``trace`` using its original page ids, so loading restores it exactly."""
    fmt = TraceFormat(format)
    original = trace.original_pages[trace.accesses]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if fmt is TraceFormat.HEX_ADDRESS:
            size = trace.page_size_bytes
            fh.writelines(f"0x{int(p) * size:x}\n" for p in original)
        else:
            fh.write("index,page\n")
            fh.writelines(f"{i},{int(p)}\n" for i, p in enumerate(original))


def generate_synthetic(kind: str | PatternKind, pages: int, repeats: int, seed: int = 0,
                       *, sets: int = 2, sweeps: int = 4, inner: str | PatternKind = "strided",
                       page_size_bytes: int = DEFAULT_PAGE_SIZE) -> AccessTrace:
    """Build a trace with a known reuse structure.

    strided
        pages ``0..P-1`` round-robin, ``repeats`` times.
    triangular
        pass ``k`` (0-based) visits ``0..P-1-k``; ``repeats`` passes.
    random
        ``P * repeats`` i.i.d. uniform draws over ``P`` pages (xorshift64*).
    cyclic-phases
        the pages are split into ``sets`` contiguous disjoint working sets and
        there are ``repeats`` phases; phase ``j`` runs ``inner`` over set
        ``j % sets`` with ``sweeps`` as its repeat count (round-robin sweeps,
        shrinking passes, or ``W * sweeps`` uniform draws for a set of ``W``
        pages).
    """
    kind = PatternKind(kind)
    if pages < 1 or repeats < 1:
        raise InvalidParameterError("pages and repeats must be >= 1")

    if kind is PatternKind.STRIDED:
        seq = np.tile(np.arange(pages, dtype=np.int64), repeats)
    elif kind is PatternKind.TRIANGULAR:
        if repeats > pages:
            raise InvalidParameterError(f"triangular needs repeats <= pages ({repeats} > {pages})")
        seq = np.concatenate([np.arange(pages - k, dtype=np.int64) for k in range(repeats)])
    elif kind is PatternKind.RANDOM:
        rng = XorShift64Star(seed)
        seq = np.array(rng.integers(pages, pages * repeats), dtype=np.int64)
    else:
        if not 1 <= sets <= pages or sweeps < 1:
            raise InvalidParameterError("cyclic-phases needs 1 <= sets <= pages and sweeps >= 1")
        inner = PatternKind(inner)
        if inner is PatternKind.CYCLIC_PHASES:
            raise InvalidParameterError("cyclic-phases cannot nest itself")
        bounds = [pages * s // sets for s in range(sets + 1)]
        if inner is PatternKind.TRIANGULAR and sweeps > bounds[1] - bounds[0]:
            raise InvalidParameterError("triangular phases need sweeps <= working-set size")
        rng = XorShift64Star(seed)
        chunks = []
        for j in range(repeats):
            lo, hi = bounds[j % sets], bounds[j % sets + 1]
            if inner is PatternKind.STRIDED:
                chunks.append(np.tile(np.arange(lo, hi, dtype=np.int64), sweeps))
            elif inner is PatternKind.TRIANGULAR:
                chunks.extend(np.arange(lo, hi - k, dtype=np.int64) for k in range(sweeps))
            else:
                chunks.append(lo + np.array(rng.integers(hi - lo, (hi - lo) * sweeps), dtype=np.int64))
        seq = np.concatenate(chunks)

    return AccessTrace.from_pages(seq, page_size_bytes, name=f"{kind.value}:{pages}x{repeats}")


def parse_synthetic_spec(text: str) -> AccessTrace:
    """Build a trace from ``kind:PxR[:seed][:key=value...]``.

    Extra keys are ``sets``, ``sweeps`` and ``inner`` (cyclic-phases only),
    e.g. ``cyclic-phases:800x6:0:sets=8:sweeps=16:inner=random``.
    """
    parts = text.split(":")
    if len(parts) < 2:
        raise InvalidParameterError(f"synthetic trace spec {text!r} is not kind:PxR[:seed]")
    kind = parts[0]
    try:
        p, r = parts[1].lower().split("x")
        pages, repeats = int(p), int(r)
    except ValueError:
        raise InvalidParameterError(f"bad size {parts[1]!r} in {text!r}; expected PxR") from None
    seed = 0
    extras: dict = {}
    for i, item in enumerate(parts[2:]):
        try:
            if "=" in item:
                key, value = item.split("=", 1)
                if key not in ("sets", "sweeps", "inner"):
                    raise InvalidParameterError(f"unknown synthetic option {key!r}")
                extras[key] = value if key == "inner" else int(value)
            elif i == 0:
                seed = int(item)
            else:
                raise InvalidParameterError(f"unexpected field {item!r} in {text!r}")
        except ValueError:
            raise InvalidParameterError(f"bad field {item!r} in {text!r}") from None
    try:
        trace = generate_synthetic(kind, pages, repeats, seed, **extras)
    except ValueError as exc:
        if isinstance(exc, InvalidParameterError):
            raise
        raise InvalidParameterError(f"unknown pattern kind {kind!r}") from None
    return AccessTrace(trace.accesses, trace.page_size_bytes, trace.original_pages, name=text)
