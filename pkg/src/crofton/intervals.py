"""Canonical finite unions of open intervals on the real line.

This is the 1-D workhorse: every trace of a set along a line is reduced to
this normal form, and all downstream quantities (measures, hit counts) are
read off it.  The normal form is deliberately insensitive to 1-D null sets:
degenerate intervals are dropped and intervals touching at a single point
are merged, so two traces that differ in a null set canonicalize to the
same value.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

INF = math.inf

#: raw interval type: any (a, b) pair, endpoints possibly infinite
Pair = tuple[float, float]


def canonicalize_pairs(raw: Iterable[Sequence[float]]) -> tuple[Pair, ...]:
    """Sort, drop degenerate intervals and merge overlapping/touching ones.

    The output satisfies  a_i < b_i  and  b_i < a_{i+1}  strictly.
    Total measure is preserved (single points carry no measure).
    Idempotent, and exact: endpoints are only compared and copied.
    """
    items = sorted((float(a), float(b)) for a, b in raw if a < b)
    if not items:
        return ()
    out = [items[0]]
    for a, b in items[1:]:
        la, lb = out[-1]
        if a <= lb:  # overlap, or touching at a single (null) point
            if b > lb:
                out[-1] = (la, b)
        else:
            out.append((a, b))
    return tuple(out)


def complement_pairs(pairs: Sequence[Pair]) -> tuple[Pair, ...]:
    """Complement within (-inf, inf) of an already-canonical pair list."""
    out = []
    prev = -INF
    for a, b in pairs:
        if prev < a:
            out.append((prev, a))
        prev = b
    if prev < INF:
        out.append((prev, INF))
    return tuple(out)


def intersect_pairs(x: Sequence[Pair], y: Sequence[Pair]) -> tuple[Pair, ...]:
    """Intersection of two canonical pair lists (linear two-pointer merge)."""
    out = []
    i = j = 0
    while i < len(x) and j < len(y):
        a = x[i][0] if x[i][0] > y[j][0] else y[j][0]
        b = x[i][1] if x[i][1] < y[j][1] else y[j][1]
        if a < b:
            out.append((a, b))
        if x[i][1] <= y[j][1]:
            i += 1
        else:
            j += 1
    return tuple(out)


def union_pairs(x: Sequence[Pair], y: Sequence[Pair]) -> tuple[Pair, ...]:
    return canonicalize_pairs(tuple(x) + tuple(y))


def subtract_pairs(x: Sequence[Pair], y: Sequence[Pair]) -> tuple[Pair, ...]:
    return intersect_pairs(x, complement_pairs(y))


def measure_pairs(pairs: Sequence[Pair]) -> float:
    total = 0.0
    for a, b in pairs:
        total += b - a  # inf - finite == inf, propagates correctly
    return total


def point_in_pairs(t: float, pairs: Sequence[Pair], starts: Sequence[float] | None = None) -> bool:
    """True iff t lies strictly inside one of the canonical intervals."""
    if starts is None:
        starts = [p[0] for p in pairs]
    j = bisect_right(starts, t) - 1
    if j < 0:
        return False
    a, b = pairs[j]
    return a < t < b


@dataclass(frozen=True)
class IntervalSet:
    """A canonical finite union of disjoint open intervals.

    ``pairs`` is sorted, pairwise disjoint and non-adjacent; every interval
    is non-degenerate.  Endpoints may be +-inf.  Instances are immutable and
    safe to share between workers.
    """

    pairs: tuple[Pair, ...] = ()

    @classmethod
    def from_raw(cls, raw: Iterable[Sequence[float]]) -> "IntervalSet":
        return cls(canonicalize_pairs(raw))

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls(())

    @classmethod
    def full_line(cls) -> "IntervalSet":
        return cls(((-INF, INF),))

    def __iter__(self) -> Iterator[Pair]:
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def is_empty(self) -> bool:
        return not self.pairs

    def measure(self) -> float:
        return measure_pairs(self.pairs)

    def contains(self, t: float) -> bool:
        return point_in_pairs(t, self.pairs)

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(union_pairs(self.pairs, other.pairs))

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(intersect_pairs(self.pairs, other.pairs))

    def subtract(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(subtract_pairs(self.pairs, other.pairs))

    def complement(self) -> "IntervalSet":
        return IntervalSet(complement_pairs(self.pairs))

    def endpoints(self) -> list[float]:
        """All finite endpoints, in increasing order."""
        out = []
        for a, b in self.pairs:
            if math.isfinite(a):
                out.append(a)
            if math.isfinite(b):
                out.append(b)
        return out


def canonicalize(raw: Iterable[Sequence[float]]) -> IntervalSet:
    """Public normal-form constructor for raw (possibly messy) interval lists."""
    return IntervalSet.from_raw(raw)


def interval_boolean(a: IntervalSet, b: IntervalSet, op: str) -> IntervalSet:
    """Exact set operation on two canonical interval sets.

    ``op`` is one of ``"union"``, ``"intersect"``, ``"subtract"``.
    """
    if op == "union":
        return a.union(b)
    if op == "intersect":
        return a.intersect(b)
    if op == "subtract":
        return a.subtract(b)
    raise ValueError(f"unknown interval operation {op!r}")


def measure(s: IntervalSet) -> float:
    """Total length of the interval set; inf when unbounded."""
    return s.measure()
