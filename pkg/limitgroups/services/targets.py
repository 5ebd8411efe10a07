"""Concrete target groups for the folding families.

``SL2ModPk`` is the finite congruence quotient ``SL2(Z/p^k)``, ``SL2Int``
the exact integer group; ``TrivialGroup`` and ``FreeTarget`` close the list.
Homomorphisms are :class:`HomInstance` objects that verify every source
relator at construction.
"""
from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from sympy import isprime

from limitgroups.config.settings import AppConfig
from limitgroups.services.construct import AMALGAM, DoubleSpec
from limitgroups.services.errors import (
    CapExceededError,
    HypothesisError,
    InvariantError,
    MissingImageError,
    RankMismatchError,
)
from limitgroups.services.surface import SurfacePresentation
from limitgroups.services.words import FreeWord, Presentation, free_presentation
from limitgroups.utils.rng import make_rng

logger = logging.getLogger("LIMITGROUPS")


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Mat2ModPk:
    """``(a b; c d)`` with entries in ``[0, p^k)`` and determinant 1."""

    a: int
    b: int
    c: int
    d: int
    p: int
    k: int

    def __post_init__(self) -> None:
        q = self.modulus
        for name in "abcd":
            object.__setattr__(self, name, getattr(self, name) % q)
        if (self.a * self.d - self.b * self.c) % q != 1:
            raise ValueError(f"determinant of {self.entries} is not 1 mod {q}")

    @property
    def modulus(self) -> int:
        return self.p**self.k

    @property
    def entries(self) -> Tuple[int, int, int, int]:
        return self.a, self.b, self.c, self.d

    def __mul__(self, other: "Mat2ModPk") -> "Mat2ModPk":
        if (self.p, self.k) != (other.p, other.k):
            raise RankMismatchError("matrices over different moduli")
        return Mat2ModPk(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            self.p,
            self.k,
        )

    def inverse(self) -> "Mat2ModPk":
        return Mat2ModPk(self.d, -self.b, -self.c, self.a, self.p, self.k)

    def __str__(self) -> str:
        return f"({self.a} {self.b}; {self.c} {self.d}) mod {self.modulus}"


@dataclass(frozen=True)
class Mat2Int:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self) -> None:
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant of {self.entries} is not 1")

    @property
    def entries(self) -> Tuple[int, int, int, int]:
        return self.a, self.b, self.c, self.d

    def __mul__(self, other: "Mat2Int") -> "Mat2Int":
        return Mat2Int(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "Mat2Int":
        return Mat2Int(self.d, -self.b, -self.c, self.a)

    def reduce_mod(self, p: int, k: int) -> Mat2ModPk:
        return Mat2ModPk(self.a, self.b, self.c, self.d, p, k)

    def __str__(self) -> str:
        return f"({self.a} {self.b}; {self.c} {self.d})"


# ---------------------------------------------------------------------------
# Groups
# ---------------------------------------------------------------------------


class TargetGroup(ABC):
    name: str = "group"

    @abstractmethod
    def identity(self):
        ...

    @abstractmethod
    def multiply(self, x, y):
        ...

    @abstractmethod
    def invert(self, x):
        ...

    def equal(self, x, y) -> bool:
        return x == y

    def is_identity(self, x) -> bool:
        return self.equal(x, self.identity())

    @property
    def order(self) -> Optional[int]:
        """``None`` for infinite groups."""
        return None

    def elements(self) -> List:
        raise CapExceededError(f"{self.name} is not enumerable")

    def product(self, items: Iterable):
        out = self.identity()
        for x in items:
            out = self.multiply(out, x)
        return out

    def power(self, x, n: int):
        base = x if n >= 0 else self.invert(x)
        out = self.identity()
        for _ in range(abs(n)):
            out = self.multiply(out, base)
        return out

    def commutes(self, x, y) -> bool:
        return self.equal(self.multiply(x, y), self.multiply(y, x))

    def axiom_failures(self, triples: Iterable[Tuple]) -> int:
        failures = 0
        e = self.identity()
        for x, y, z in triples:
            if not self.equal(self.multiply(self.multiply(x, y), z), self.multiply(x, self.multiply(y, z))):
                failures += 1
            if not (self.equal(self.multiply(x, e), x) and self.equal(self.multiply(e, x), x)):
                failures += 1
            if not self.is_identity(self.multiply(x, self.invert(x))):
                failures += 1
        return failures


def group_order(p: int, k: int) -> int:
    """``|SL2(Z/p^k)| = p^(3k) (1 - p^-2)``."""
    return p ** (3 * k) - p ** (3 * k - 2)


class SL2ModPk(TargetGroup):
    def __init__(self, p: int, k: int) -> None:
        if not isprime(p):
            raise ValueError(f"p = {p} is not prime")
        if k < 1:
            raise ValueError(f"k must be positive, got {k}")
        if p**k > AppConfig.MODULUS_CAP:
            raise CapExceededError(f"modulus {p}^{k} exceeds the cap {AppConfig.MODULUS_CAP}")
        self.p, self.k = p, k
        self.q = p**k
        self.name = f"SL2(Z/{self.q})"
        self._elements: Optional[List[Mat2ModPk]] = None

    def matrix(self, a: int, b: int, c: int, d: int) -> Mat2ModPk:
        return Mat2ModPk(a, b, c, d, self.p, self.k)

    def identity(self) -> Mat2ModPk:
        return self.matrix(1, 0, 0, 1)

    def multiply(self, x: Mat2ModPk, y: Mat2ModPk) -> Mat2ModPk:
        return x * y

    def invert(self, x: Mat2ModPk) -> Mat2ModPk:
        return x.inverse()

    @property
    def order(self) -> int:
        return group_order(self.p, self.k)

    @property
    def enumerable(self) -> bool:
        return self.order <= AppConfig.ENUMERATION_CAP

    def elements(self) -> List[Mat2ModPk]:
        """All elements, sorted by entries."""
        if not self.enumerable:
            raise CapExceededError(f"|{self.name}| = {self.order} exceeds the enumeration cap")
        if self._elements is None:
            q = self.q
            b, c, d = np.meshgrid(np.arange(q), np.arange(q), np.arange(q), indexing="ij")
            found: List[Mat2ModPk] = []
            for a in range(q):
                mask = (a * d - b * c) % q == 1
                for bb, cc, dd in zip(b[mask], c[mask], d[mask]):
                    found.append(self.matrix(a, int(bb), int(cc), int(dd)))
            if len(found) != self.order:
                raise InvariantError(f"enumerated {len(found)} elements of {self.name}, expected {self.order}")
            self._elements = found
        return list(self._elements)


class SL2Int(TargetGroup):
    name = "SL2(Z)"

    def identity(self) -> Mat2Int:
        return Mat2Int(1, 0, 0, 1)

    def multiply(self, x: Mat2Int, y: Mat2Int) -> Mat2Int:
        return x * y

    def invert(self, x: Mat2Int) -> Mat2Int:
        return x.inverse()


class TrivialGroup(TargetGroup):
    name = "1"

    def identity(self) -> tuple:
        return ()

    def multiply(self, x, y) -> tuple:
        return ()

    def invert(self, x) -> tuple:
        return ()

    @property
    def order(self) -> int:
        return 1

    def elements(self) -> List[tuple]:
        return [()]


class FreeTarget(TargetGroup):
    def __init__(self, rank: int) -> None:
        self.rank = rank
        self.name = f"F_{rank}"

    def identity(self) -> FreeWord:
        return FreeWord((), self.rank)

    def multiply(self, x: FreeWord, y: FreeWord) -> FreeWord:
        return x * y

    def invert(self, x: FreeWord) -> FreeWord:
        return x.inverse()


def sl2_modpk_ops(p: int, k: int) -> SL2ModPk:
    return SL2ModPk(p, k)


# ---------------------------------------------------------------------------
# Subgroups
# ---------------------------------------------------------------------------


def _sort_key(x) -> tuple:
    return tuple(x.entries) if hasattr(x, "entries") else (x,)


def _structured_commutant(group: SL2ModPk, m: Mat2ModPk) -> List[Mat2ModPk]:
    """``{l I + u M}`` with determinant 1; exact when ``M`` is not scalar mod ``p``."""
    q = group.q
    if m.b % group.p == 0 and m.c % group.p == 0 and (m.a - m.d) % group.p == 0:
        raise CapExceededError(f"{m} is scalar mod {group.p}; its commutant needs enumeration")
    trace, det = (m.a + m.d) % q, 1
    lam, mu = np.meshgrid(np.arange(q, dtype=np.int64), np.arange(q, dtype=np.int64), indexing="ij")
    mask = (lam * lam + lam * mu * trace + mu * mu * det) % q == 1
    out = [
        group.matrix(int(l) + int(u) * m.a, int(u) * m.b, int(u) * m.c, int(l) + int(u) * m.d)
        for l, u in zip(lam[mask], mu[mask])
    ]
    return sorted(out, key=_sort_key)


def commutant(g_list: Sequence, group: TargetGroup) -> List:
    """Elements commuting with every element of ``g_list``."""
    order = group.order
    if order is not None and order <= AppConfig.ENUMERATION_CAP:
        return [x for x in group.elements() if all(group.commutes(x, g) for g in g_list)]
    if isinstance(group, SL2ModPk):
        nontrivial = [g for g in g_list if not group.is_identity(g)]
        if not nontrivial:
            raise CapExceededError(f"commutant of the identity is all of {group.name}")
        base = _structured_commutant(group, nontrivial[0])
        return [x for x in base if all(group.commutes(x, g) for g in nontrivial[1:])]
    raise CapExceededError(f"cannot compute commutants in {group.name}")


def cyclic_closure(c, group: TargetGroup) -> List:
    """``[1, c, c^2, ...]`` up to the order of ``c``."""
    cap = group.order if group.order is not None else AppConfig.ENUMERATION_CAP
    powers = [group.identity()]
    current = c
    while not group.is_identity(current):
        powers.append(current)
        if len(powers) > cap:
            raise CapExceededError(f"order of {c} exceeds {cap}")
        current = group.multiply(current, c)
    return powers


def cyclic_tail_holds(c, group: TargetGroup, start: int) -> bool:
    """``{c^n : n >= start} = <c>``."""
    closure = cyclic_closure(c, group)
    tail = [group.power(c, start + i) for i in range(len(closure))]
    return set(tail) == set(closure)


def closure(gens: Sequence, group: TargetGroup) -> List:
    """Breadth-first closure of ``gens`` under multiplication by generators and inverses."""
    if group.order is not None and group.order > AppConfig.ENUMERATION_CAP:
        raise CapExceededError(f"|{group.name}| = {group.order} exceeds the enumeration cap")
    steps = list(gens) + [group.invert(g) for g in gens]
    start = group.identity()
    seen = {start}
    frontier = deque([start])
    while frontier:
        x = frontier.popleft()
        for s in steps:
            y = group.multiply(x, s)
            if y not in seen:
                seen.add(y)
                frontier.append(y)
                if len(seen) > AppConfig.ENUMERATION_CAP:
                    raise CapExceededError("closure exceeds the enumeration cap")
    return sorted(seen, key=_sort_key)


def surjectivity_mod(group: SL2ModPk, gens: Sequence[Mat2ModPk]) -> bool:
    return len(closure(gens, group)) == group.order


# ---------------------------------------------------------------------------
# Homomorphisms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HomInstance:
    """Homomorphism from a finitely presented group, checked on its relators."""

    source: Presentation
    group: TargetGroup
    images: Tuple

    def __post_init__(self) -> None:
        if len(self.images) != self.source.rank:
            raise MissingImageError(f"expected {self.source.rank} generator images, got {len(self.images)}")
        for rel in self.source.relators:
            if not self.group.is_identity(self.evaluate(rel)):
                raise InvariantError(f"relator {self.source.format(rel)} does not map to the identity")

    def evaluate(self, w: FreeWord):
        if w.rank != self.source.rank:
            raise RankMismatchError(f"word of rank {w.rank} is not in the source of rank {self.source.rank}")
        inverses: Dict[int, object] = {}
        out = self.group.identity()
        for x in w.letters:
            image = self.images[abs(x) - 1]
            if x < 0:
                if abs(x) not in inverses:
                    inverses[abs(x)] = self.group.invert(image)
                image = inverses[abs(x)]
            out = self.group.multiply(out, image)
        return out

    def image_closure(self) -> List:
        return closure(list(self.images), self.group)


def h_k_family(spec: DoubleSpec, phi: HomInstance, k_elt) -> HomInstance:
    """Extend ``phi`` on ``F_n`` to the double: mirror generators go to ``k phi(x) k^-1``, ``t`` to ``phi(fold t) k``."""
    group = phi.group
    if phi.source.rank != spec.rank:
        raise RankMismatchError(f"phi is defined on rank {phi.source.rank}, the double has vertex rank {spec.rank}")
    phi_c = phi.evaluate(spec.edge)
    if not group.commutes(k_elt, phi_c):
        raise HypothesisError(f"{k_elt} does not commute with phi(c) = {phi_c}")
    first = list(phi.images)
    if spec.kind == AMALGAM:
        k_inv = group.invert(k_elt)
        second = [group.multiply(group.multiply(k_elt, x), k_inv) for x in first]
        images = tuple(first + second)
    else:
        t_fold = phi.evaluate(spec.fold[spec.rank])
        images = tuple(first + [group.multiply(t_fold, k_elt)])
    return HomInstance(spec.presentation, group, images)


def rho_gh(pres: SurfacePresentation, x_images: Sequence, g, h, group: TargetGroup) -> HomInstance:
    """Surface homomorphism ``a -> x``, ``b -> g h^-1``, ``b' -> y'``, ``c -> g x g^-1``.

    ``x_images`` lists the images of ``x1, x1', ..., xr, xr', y'``.
    """
    if len(x_images) != pres.target_rank:
        raise MissingImageError(f"expected {pres.target_rank} fold-target images, got {len(x_images)}")
    fold_target = HomInstance(pres.target, group, tuple(x_images))
    y = fold_target.evaluate(pres.y)
    y_prime = x_images[-1]
    if not group.commutes(g, y):
        raise HypothesisError("g does not commute with y")
    if not group.commutes(h, y_prime):
        raise HypothesisError("h does not commute with y'")
    g_inv = group.invert(g)
    images: List = [None] * pres.rank
    for i in range(1, pres.r + 1):
        x, x_prime = x_images[2 * i - 2], x_images[2 * i - 1]
        images[pres.a(i) - 1] = x
        images[pres.a_prime(i) - 1] = x_prime
        images[pres.c(i) - 1] = group.multiply(group.multiply(g, x), g_inv)
        images[pres.c_prime(i) - 1] = group.multiply(group.multiply(g, x_prime), g_inv)
    images[pres.b - 1] = group.multiply(g, group.invert(h))
    images[pres.b_prime - 1] = y_prime
    return HomInstance(pres.presentation, group, tuple(images))


def injectivity_on_ball(hom: HomInstance, elements: Sequence[FreeWord]) -> List[FreeWord]:
    """Elements sent to the identity, in input order."""
    return [w for w in elements if hom.group.is_identity(hom.evaluate(w))]


def free_hom(rank: int, images: Sequence, group: TargetGroup) -> HomInstance:
    return HomInstance(free_presentation(rank), group, tuple(images))


def free_word_hom(source: Presentation, images: Sequence[FreeWord], target_rank: int) -> HomInstance:
    """A homomorphism into ``F_target_rank`` given by words."""
    for img in images:
        if img.rank != target_rank:
            raise RankMismatchError("image words must live in the target rank")
    return HomInstance(source, FreeTarget(target_rank), tuple(images))


# ---------------------------------------------------------------------------
# Free pairs and generating pairs
# ---------------------------------------------------------------------------


def shortest_relation(a: Mat2Int, b: Mat2Int, length: int) -> Optional[int]:
    """Length of the shortest nontrivial reduced word in ``a, b`` equal to 1, if it is ``<= length``."""
    if length > AppConfig.FREE_PAIR_LENGTH_CAP:
        raise CapExceededError(f"free pair length cap {AppConfig.FREE_PAIR_LENGTH_CAP} exceeded: {length}")
    gens = {1: a, -1: a.inverse(), 2: b, -2: b.inverse()}
    one = Mat2Int(1, 0, 0, 1)
    best: Optional[int] = None
    stack: List[Tuple[int, Mat2Int, int]] = [(x, gens[x], 1) for x in (1, -1, 2, -2)]
    while stack:
        last, value, depth = stack.pop()
        if value == one:
            best = depth if best is None else min(best, depth)
            continue
        if depth >= (length if best is None else best - 1):
            continue
        for x in (1, -1, 2, -2):
            if x != -last:
                stack.append((x, value * gens[x], depth + 1))
    return best


def free_pair_check(a: Mat2Int, b: Mat2Int, length: int) -> bool:
    """No nontrivial reduced word of length ``<= length`` in ``a, b`` is the identity."""
    return shortest_relation(a, b, length) is None


def search_generating_pair(
    group: SL2ModPk,
    seed: Optional[int] = None,
    accept: Optional[Callable[[Mat2ModPk, Mat2ModPk], bool]] = None,
    attempts: int = 200,
) -> Tuple[Mat2ModPk, Mat2ModPk]:
    """First seeded random pair that generates ``group`` and passes ``accept``."""
    rng = make_rng(seed)
    elements = group.elements()
    for attempt in range(attempts):
        i, j = (int(v) for v in rng.integers(0, len(elements), size=2))
        a, b = elements[i], elements[j]
        if not surjectivity_mod(group, [a, b]):
            continue
        if accept is not None and not accept(a, b):
            continue
        logger.info("generating pair for %s found after %s draws", group.name, attempt + 1)
        return a, b
    raise CapExceededError(f"no accepted generating pair of {group.name} in {attempts} draws")
