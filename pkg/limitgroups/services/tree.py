"""Cayley tree of a free group and its boundary.

Vertices of the tree are reduced words; the free group acts on the left.
Boundary points are eventually periodic rays ``prefix * period^inf``; the
only rays this library ever needs are translates of axis endpoints, so the
representation is exact.

A :class:`Cylinder` is the shadow of an oriented edge: the rays whose
geodesic from ``base`` continues through the edge labelled ``direction``.
When ``direction`` points back toward the identity the shadow is the
complement of the cylinder of ``base``. Images and complements of shadows
are again shadows, and every set predicate below is a prefix comparison.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Set, Tuple

from limitgroups.services.errors import MalformedLetterError, RankMismatchError
from limitgroups.services.words import (
    FreeWord,
    cyclic_decompose,
    format_word,
    reduce,
    smallest_period,
)


# ---------------------------------------------------------------------------
# Boundary rays
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundaryRay:
    """Normalized ``prefix * period * period * ...``.

    Build with :func:`make_ray`; normalized rays compare equal iff they
    denote the same boundary point.
    """

    prefix: Tuple[int, ...]
    period: Tuple[int, ...]
    rank: int

    def letter(self, index: int) -> int:
        if index < len(self.prefix):
            return self.prefix[index]
        return self.period[(index - len(self.prefix)) % len(self.period)]

    def head(self, depth: int) -> Tuple[int, ...]:
        return tuple(self.letter(i) for i in range(depth))

    def __str__(self) -> str:
        prefix = format_word(FreeWord(self.prefix, self.rank)) if self.prefix else ""
        period = format_word(FreeWord(self.period, self.rank))
        return f"{prefix}|({period})^inf"


def make_ray(prefix: Tuple[int, ...], period: Tuple[int, ...], rank: int) -> BoundaryRay:
    """Normalize a ray given by a reduced prefix and a cyclically reduced period."""
    if not period:
        raise MalformedLetterError("a boundary ray needs a nonempty period")
    if len(period) > 1 and period[0] == -period[-1]:
        raise MalformedLetterError(f"period {period} is not cyclically reduced")
    prefix = reduce(prefix, rank).letters
    period = tuple(period)
    if reduce(period, rank).letters != period:
        raise MalformedLetterError(f"period {period} is not reduced")
    while prefix and prefix[-1] == -period[0]:
        prefix = prefix[:-1]
        period = period[1:] + period[:1]
    period = period[: smallest_period(period)]
    while prefix and prefix[-1] == period[-1]:
        prefix = prefix[:-1]
        period = period[-1:] + period[:-1]
    return BoundaryRay(prefix, period, rank)


def translate_ray(g: FreeWord, r: BoundaryRay) -> BoundaryRay:
    if g.rank != r.rank:
        raise RankMismatchError(f"cannot translate a rank-{r.rank} ray by a rank-{g.rank} word")
    return make_ray(g.letters + r.prefix, r.period, r.rank)


# ---------------------------------------------------------------------------
# Axes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AxisDesc:
    """Axis of ``conjugator * core * conjugator^-1``."""

    conjugator: FreeWord
    core: FreeWord

    @property
    def translation_length(self) -> int:
        return len(self.core)

    def vertex(self, index: int) -> Tuple[int, ...]:
        """Vertex at signed position ``index`` along the axis; index 0 is the projection of 1."""
        core = self.core.letters
        if index >= 0:
            step = tuple(core[i % len(core)] for i in range(index))
        else:
            inv = tuple(-x for x in reversed(core))
            step = tuple(inv[i % len(inv)] for i in range(-index))
        return self.conjugator.letters + step

    def vertices_between(self, low: int, high: int) -> Set[Tuple[int, ...]]:
        return {self.vertex(i) for i in range(low, high + 1)}

    def vertices_within(self, radius: int) -> Set[Tuple[int, ...]]:
        """Axis vertices at distance at most ``radius`` from the identity."""
        offset = radius - len(self.conjugator)
        if offset < 0:
            return set()
        return self.vertices_between(-offset, offset)

    def contains_vertex(self, v: FreeWord) -> bool:
        rel = reduce(tuple(-x for x in reversed(self.conjugator.letters)) + v.letters, v.rank).letters
        core = self.core.letters
        inv = tuple(-x for x in reversed(core))
        forward = all(rel[i] == core[i % len(core)] for i in range(len(rel)))
        backward = all(rel[i] == inv[i % len(inv)] for i in range(len(rel)))
        return forward or backward


def axis_of(w: FreeWord) -> AxisDesc:
    decomp = cyclic_decompose(w)
    return AxisDesc(conjugator=decomp.conjugator, core=decomp.core)


def endpoints(w: FreeWord) -> Tuple[BoundaryRay, BoundaryRay]:
    """Attracting and repelling fixed points ``(w+, w-)`` of ``w`` on the boundary."""
    axis = axis_of(w)
    core = axis.core.letters
    plus = make_ray(axis.conjugator.letters, core, w.rank)
    minus = make_ray(axis.conjugator.letters, tuple(-x for x in reversed(core)), w.rank)
    return plus, minus


@dataclass(frozen=True)
class Overlap:
    """Common part of two axes: a finite number of edges or the whole line."""

    infinite: bool
    length: Optional[int] = None

    @classmethod
    def finite(cls, length: int) -> "Overlap":
        return cls(infinite=False, length=length)

    @classmethod
    def whole_line(cls) -> "Overlap":
        return cls(infinite=True, length=None)

    def __str__(self) -> str:
        return "Infinite" if self.infinite else f"Finite({self.length})"


def axis_overlap(a: FreeWord, b: FreeWord) -> Overlap:
    """Length of ``axis(a) & axis(b)``.

    Windows of axis positions grow by one period per step, starting wide
    enough to contain a common vertex if there is one. The common part of
    two geodesics in a tree is connected, so once a step adds no common
    vertex the overlap is final. A common segment at least as long as the
    sum of both translation lengths forces ``[a, b] = 1`` in a free action,
    which is reported as ``Infinite``.
    """
    if a.rank != b.rank:
        raise RankMismatchError("axes of words from different ranks")
    axis_a, axis_b = axis_of(a), axis_of(b)
    la, lb = axis_a.translation_length, axis_b.translation_length
    step = max(la, lb)
    radius = len(axis_a.conjugator) + len(axis_b.conjugator) + step
    previous = -1
    quiet_steps = 0
    while True:
        common = axis_a.vertices_between(-radius, radius) & axis_b.vertices_between(-radius, radius)
        edges = max(len(common) - 1, 0)
        if edges >= la + lb:
            return Overlap.whole_line()
        if len(common) == previous:
            quiet_steps += 1
            if quiet_steps >= 2:
                return Overlap.finite(edges)
        else:
            quiet_steps = 0
        previous = len(common)
        radius += step


# ---------------------------------------------------------------------------
# Cylinders
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Cylinder:
    """Shadow of the oriented edge from vertex ``base`` along letter ``direction``."""

    base: Tuple[int, ...]
    direction: int
    rank: int

    @property
    def inward(self) -> bool:
        return bool(self.base) and self.direction == -self.base[-1]

    @property
    def word(self) -> Tuple[int, ...]:
        """``s`` for the cylinder of rays starting with ``s``; ``t`` for the complement of that of ``t``."""
        return self.base if self.inward else self.base + (self.direction,)

    def __str__(self) -> str:
        base = format_word(FreeWord(self.base, self.rank))
        letter = format_word(FreeWord((self.direction,), self.rank))
        return f"Cyl({base}; {letter})"

    def as_dict(self) -> dict:
        return {
            "base": format_word(FreeWord(self.base, self.rank)),
            "direction": self.direction,
            "text": str(self),
        }


_RANK_ONE_ENDS = {1: BoundaryRay((), (1,), 1), -1: BoundaryRay((), (-1,), 1)}


def make_cylinder(base: Tuple[int, ...], direction: int, rank: int) -> Cylinder:
    """Validate and normalize a shadow; rank one collapses to the two ends."""
    if direction == 0 or abs(direction) > rank:
        raise MalformedLetterError(f"direction {direction} is not a letter of rank {rank}")
    reduced = reduce(base, rank).letters
    if reduced != tuple(base):
        raise MalformedLetterError(f"cylinder base {tuple(base)} is not reduced")
    cyl = Cylinder(reduced, direction, rank)
    if rank == 1:
        for sign, ray in _RANK_ONE_ENDS.items():
            if _contains(cyl, ray):
                return Cylinder((), sign, 1)
    return cyl


def cylinder_around(ray: BoundaryRay, depth: int) -> Cylinder:
    """The outward cylinder of rays sharing the first ``depth`` letters of ``ray``."""
    if depth < 1:
        raise ValueError("cylinder depth must be at least 1")
    head = ray.head(depth)
    return make_cylinder(head[:-1], head[-1], ray.rank)


def complement(c: Cylinder) -> Cylinder:
    """Shadow of the reversed edge, i.e. the set complement."""
    far = reduce(c.base + (c.direction,), c.rank).letters
    return make_cylinder(far, -c.direction, c.rank)


def cylinder_image(g: FreeWord, c: Cylinder) -> Cylinder:
    if g.rank != c.rank:
        raise RankMismatchError("cylinder and word ranks differ")
    make_cylinder(c.base, c.direction, c.rank)
    moved = reduce(g.letters + c.base, c.rank).letters
    return make_cylinder(moved, c.direction, c.rank)


def _contains(c: Cylinder, r: BoundaryRay) -> bool:
    word = c.word
    starts = r.head(len(word)) == word
    return not starts if c.inward else starts


def _is_prefix(short: Tuple[int, ...], long: Tuple[int, ...]) -> bool:
    return len(short) <= len(long) and long[: len(short)] == short


def _ends(c: Cylinder) -> Set[int]:
    return {sign for sign, ray in _RANK_ONE_ENDS.items() if _contains(c, ray)}


def cylinder_contains(c: Cylinder, r: BoundaryRay) -> bool:
    if c.rank != r.rank:
        raise RankMismatchError("cylinder and ray ranks differ")
    return _contains(c, r)


def cylinder_subset(c1: Cylinder, c2: Cylinder) -> bool:
    """Exact test of ``c1 <= c2``."""
    if c1.rank != c2.rank:
        raise RankMismatchError("cylinder ranks differ")
    if c1.rank == 1:
        return _ends(c1) <= _ends(c2)
    s, t = c1.word, c2.word
    if not c1.inward and not c2.inward:
        return _is_prefix(t, s)
    if not c1.inward and c2.inward:
        return not _is_prefix(s, t) and not _is_prefix(t, s)
    if c1.inward and not c2.inward:
        return False
    return _is_prefix(s, t)


def cylinder_disjoint(c1: Cylinder, c2: Cylinder) -> bool:
    if c1.rank != c2.rank:
        raise RankMismatchError("cylinder ranks differ")
    if c1.rank == 1:
        return not (_ends(c1) & _ends(c2))
    s, t = c1.word, c2.word
    if not c1.inward and not c2.inward:
        return not _is_prefix(s, t) and not _is_prefix(t, s)
    if c1.inward and c2.inward:
        return False
    outward, inward = (s, t) if not c1.inward else (t, s)
    return _is_prefix(inward, outward)


def pairwise_disjoint(cylinders: List[Cylinder]) -> bool:
    return all(
        cylinder_disjoint(cylinders[i], cylinders[j])
        for i in range(len(cylinders))
        for j in range(i + 1, len(cylinders))
    )
