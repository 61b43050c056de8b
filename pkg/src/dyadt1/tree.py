"""Finite dyadic tree over the unit root interval [0, 1).

An interval is identified by (level, index): level 0 is the root, and
(l, k) covers [k 2^-l, (k+1) 2^-l). Children of (l, k) are (l+1, 2k)
(the left half) and (l+1, 2k+1) (the right half). All measures are exact
powers of two, so containment and measure arithmetic are integer-exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .errors import BadParams, LeafHasNoChildren, OutOfTree


@dataclass(frozen=True, order=True)
class DyadicInterval:
    level: int
    index: int

    def __post_init__(self):
        if self.level < 0:
            raise OutOfTree(f"negative level {self.level}")
        if not 0 <= self.index < (1 << self.level):
            raise OutOfTree(f"index {self.index} out of range at level {self.level}")

    @property
    def measure(self) -> float:
        """|I| = 2^(-level); exact in binary floating point."""
        return 2.0 ** (-self.level)

    def parent(self) -> "DyadicInterval":
        if self.level == 0:
            raise OutOfTree("root has no parent")
        return DyadicInterval(self.level - 1, self.index >> 1)

    def left(self) -> "DyadicInterval":
        return DyadicInterval(self.level + 1, 2 * self.index)

    def right(self) -> "DyadicInterval":
        return DyadicInterval(self.level + 1, 2 * self.index + 1)

    def as_json(self) -> list:
        return [self.level, self.index]


ROOT = DyadicInterval(0, 0)


def ancestor(interval: DyadicInterval, k: int) -> DyadicInterval:
    """The interval k levels above `interval`; ancestor(I, 0) is I itself."""
    if k < 0:
        raise BadParams("ancestor order must be >= 0")
    if k > interval.level:
        raise OutOfTree(f"interval at level {interval.level} has no ancestor {k} levels up")
    return DyadicInterval(interval.level - k, interval.index >> k)


def contains(outer: DyadicInterval, inner: DyadicInterval) -> bool:
    """True iff inner is a subset of outer (reflexive)."""
    if inner.level < outer.level:
        return False
    return (inner.index >> (inner.level - outer.level)) == outer.index


def tree_distance(a: DyadicInterval, b: DyadicInterval) -> int:
    """Number of edges on the shortest path between a and b in the binary tree."""
    la, ia = a.level, a.index
    lb, ib = b.level, b.index
    dist = 0
    if la > lb:
        dist += la - lb
        ia >>= la - lb
    elif lb > la:
        dist += lb - la
        ib >>= lb - la
    while ia != ib:
        ia >>= 1
        ib >>= 1
        dist += 2
    return dist


@dataclass(frozen=True)
class TreeConfig:
    """Finite truncation: leaves live exactly at level `depth`."""

    depth: int

    def __post_init__(self):
        if self.depth < 1:
            raise BadParams(f"depth must be >= 1, got {self.depth}")

    @property
    def n_leaves(self) -> int:
        return 1 << self.depth

    def require_member(self, interval: DyadicInterval) -> None:
        if interval.level > self.depth:
            raise OutOfTree(
                f"interval at level {interval.level} exceeds tree depth {self.depth}"
            )

    def children(self, interval: DyadicInterval) -> tuple[DyadicInterval, DyadicInterval]:
        """(left half, right half) of a non-leaf interval."""
        self.require_member(interval)
        if interval.level >= self.depth:
            raise LeafHasNoChildren(f"{interval} is a leaf at depth {self.depth}")
        return interval.left(), interval.right()

    def intervals(self) -> Iterator[DyadicInterval]:
        """All intervals, breadth first (level ascending, index ascending)."""
        for level in range(self.depth + 1):
            for index in range(1 << level):
                yield DyadicInterval(level, index)

    def internal(self) -> Iterator[DyadicInterval]:
        """Intervals that carry Haar functions (levels 0 .. depth-1), breadth first."""
        for level in range(self.depth):
            for index in range(1 << level):
                yield DyadicInterval(level, index)

    def leaves(self) -> Iterator[DyadicInterval]:
        for index in range(self.n_leaves):
            yield DyadicInterval(self.depth, index)

    def leaf_range(self, interval: DyadicInterval) -> tuple[int, int]:
        """Half-open range of leaf indices covered by `interval`."""
        self.require_member(interval)
        shift = self.depth - interval.level
        return interval.index << shift, (interval.index + 1) << shift

    def n_internal(self) -> int:
        return (1 << self.depth) - 1
