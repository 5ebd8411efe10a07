"""Generalized doubles of free groups and their eventually faithful folding families.

A double is described by a :class:`DoubleSpec`: the presentation of
``F_n *_<c=c'> F_n'`` (amalgam) or ``F_n *_<c>`` with ``t c t^-1 = c`` (HNN)
together with its folding epimorphism onto ``F_n``. Composing the fold with
the Dehn twist along ``c`` gives the family ``twist_then_fold(spec, m)``,
whose eventual faithfulness is certified element by element through the
symbolic ping-pong engine.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from tqdm import tqdm

from limitgroups.config.settings import AppConfig
from limitgroups.services.errors import (
    CapExceededError,
    HypothesisError,
    PatternError,
    RankMismatchError,
    TrivialWordError,
    UnknownNameError,
)
from limitgroups.services.surface import fold_images, make_presentation
from limitgroups.services.symbolic import Fixed, Item, Power, SymbolicOnset, certified_onset
from limitgroups.services.words import (
    FreeWord,
    Presentation,
    apply_hom,
    commutator,
    commutes,
    default_names,
    embed,
    format_word,
    generator,
    identity,
    in_cyclic_subgroup,
    invert,
    multiply,
    parse_word,
    power,
    primitive_root,
    words_up_to,
)

logger = logging.getLogger("LIMITGROUPS")

AMALGAM = "amalgam"
HNN = "hnn"


# ---------------------------------------------------------------------------
# Doubles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DoubleSpec:
    """One-edge splitting of a double over the cyclic edge group ``<c>``.

    ``attachment`` is ``c'`` (the mirror copy, amalgam) or the word that
    ``t c t^-1`` equals (HNN). ``fold`` lists the images of the source
    generators in ``F_rank``.
    """

    kind: str
    rank: int
    edge: FreeWord
    attachment: FreeWord
    presentation: Presentation
    fold: Tuple[FreeWord, ...]

    @property
    def source_rank(self) -> int:
        return self.presentation.rank

    @property
    def fold_images(self) -> Dict[int, FreeWord]:
        return {i + 1: img for i, img in enumerate(self.fold)}

    def fold_word(self, w: FreeWord) -> FreeWord:
        return apply_hom(self.fold_images, w, self.rank)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "rank": self.rank,
            "c": self.presentation.format(embed(self.edge, self.source_rank)),
            "presentation": self.presentation.as_dict(),
            "fold": {
                name: format_word(img)
                for name, img in zip(self.presentation.names, self.fold)
            },
        }


def _check_edge(n: int, c: FreeWord) -> None:
    if c.rank != n:
        raise RankMismatchError(f"edge word has rank {c.rank}, expected {n}")
    if c.is_trivial:
        raise TrivialWordError("edge word c must be nontrivial")
    root, exp = primitive_root(c)
    if exp > 1:
        raise HypothesisError(
            f"edge word is a proper power: c = ({root})^{exp}",
            [f"root {root}"],
        )


def double_of_free(n: int, c: FreeWord) -> DoubleSpec:
    """``F_n *_<c = c'> F_n'``; generators ``x1..xn, x1'..xn'``."""
    _check_edge(n, c)
    names = default_names(n) + tuple(f"x{i}'" for i in range(1, n + 1))
    mirror = embed(c, 2 * n, shift=n)
    relator = embed(c, 2 * n) * invert(mirror)
    fold = tuple(generator(i, n) for i in range(1, n + 1)) * 2
    return DoubleSpec(
        kind=AMALGAM,
        rank=n,
        edge=c,
        attachment=mirror,
        presentation=Presentation(rank=2 * n, relators=(relator,), names=names),
        fold=fold,
    )


def hnn_of_free(n: int, c: FreeWord) -> DoubleSpec:
    """``F_n *_<c>`` with stable letter ``t`` centralizing ``c``; the fold sends ``t`` to 1."""
    _check_edge(n, c)
    names = default_names(n) + ("t",)
    c_up = embed(c, n + 1)
    t = generator(n + 1, n + 1)
    relator = commutator(t, c_up)
    fold = tuple(generator(i, n) for i in range(1, n + 1)) + (identity(n),)
    return DoubleSpec(
        kind=HNN,
        rank=n,
        edge=c,
        attachment=c_up,
        presentation=Presentation(rank=n + 1, relators=(relator,), names=names),
        fold=fold,
    )


def spec_from_dict(data: Mapping) -> DoubleSpec:
    """``{"kind": "amalgam"|"hnn", "rank": n, "c": "[x1,x2]"}``."""
    kind = str(data.get("kind", AMALGAM)).lower()
    try:
        rank = int(data["rank"])
        c = parse_word(str(data["c"]), rank)
    except KeyError as exc:
        raise PatternError(f"double description is missing {exc.args[0]!r}") from None
    if kind == AMALGAM:
        return double_of_free(rank, c)
    if kind == HNN:
        return hnn_of_free(rank, c)
    raise UnknownNameError(f"unknown double kind {kind!r}")


def twist_then_fold(spec: DoubleSpec, m: int) -> Dict[int, FreeWord]:
    """Generator images of ``fold o twist_c^m`` into ``F_rank``."""
    n = spec.rank
    c_m = power(spec.edge, m)
    images = spec.fold_images
    if spec.kind == AMALGAM:
        for i in range(n + 1, 2 * n + 1):
            images[i] = multiply(invert(c_m), images[i], c_m)
    else:
        images[n + 1] = images[n + 1] * invert(c_m)
    return images


def _relators_hold(images: Mapping[int, FreeWord], relators: Sequence[FreeWord], rank: int) -> bool:
    return all(apply_hom(images, rel, rank).is_trivial for rel in relators)


# ---------------------------------------------------------------------------
# Normal forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AmalgamNormalForm:
    """Reduced form in a double.

    Amalgam: ``sides[i]`` is 0 for the first copy and 1 for the mirror copy,
    and consecutive syllables sit in different copies. HNN: ``sides[i]`` is
    the stable-letter exponent in front of syllable ``i`` (0 for the first).
    """

    kind: str
    syllables: Tuple[FreeWord, ...]
    sides: Tuple[int, ...]

    @property
    def length(self) -> int:
        return sum(len(s) for s in self.syllables) + sum(1 for s in self.sides[1:] if self.kind == HNN)

    def word(self, spec: DoubleSpec) -> FreeWord:
        r = spec.source_rank
        if spec.kind == AMALGAM:
            return multiply(identity(r), *(embed(s, r, shift=spec.rank * side) for s, side in zip(self.syllables, self.sides)))
        t = generator(spec.rank + 1, r)
        factors = [identity(r)]
        for s, e in zip(self.syllables, self.sides):
            if e:
                factors.append(power(t, e))
            factors.append(embed(s, r))
        return multiply(*factors)

    def format(self, spec: DoubleSpec) -> str:
        return spec.presentation.format(self.word(spec))


def _amalgam_forms(spec: DoubleSpec, syllables: int, length: int) -> Iterator[AmalgamNormalForm]:
    pool = words_up_to(spec.rank, length)
    outside = [w for w in pool if not in_cyclic_subgroup(w, spec.edge)]
    for k in range(1, syllables + 1):
        candidates = pool if k == 1 else outside
        for first in (0, 1):
            sides = tuple((first + i) % 2 for i in range(k))
            for combo in itertools.product(candidates, repeat=k):
                if sum(len(w) for w in combo) <= length:
                    yield AmalgamNormalForm(AMALGAM, tuple(combo), sides)


def _hnn_forms(spec: DoubleSpec, syllables: int, length: int) -> Iterator[AmalgamNormalForm]:
    pool = [identity(spec.rank)] + words_up_to(spec.rank, length)
    for k in range(0, syllables):
        for signs in itertools.product((1, -1), repeat=k):
            budget = length - k
            for combo in itertools.product(pool, repeat=k + 1):
                if sum(len(w) for w in combo) > budget:
                    continue
                if k == 0 and combo[0].is_trivial:
                    continue
                pinched = any(
                    signs[i] == -signs[i + 1] and in_cyclic_subgroup(combo[i + 1], spec.edge)
                    for i in range(k - 1)
                )
                if not pinched:
                    yield AmalgamNormalForm(HNN, tuple(combo), (0,) + signs)


def enumerate_reduced(spec: DoubleSpec, syllables: int, length: int) -> List[AmalgamNormalForm]:
    """Provably nontrivial reduced forms with at most ``syllables`` vertex syllables and ``length`` letters."""
    if syllables > AppConfig.SYLLABLE_CAP:
        raise CapExceededError(f"syllable cap {AppConfig.SYLLABLE_CAP} exceeded: {syllables}")
    if length > AppConfig.FORM_LENGTH_CAP:
        raise CapExceededError(f"form length cap {AppConfig.FORM_LENGTH_CAP} exceeded: {length}")
    source = _amalgam_forms if spec.kind == AMALGAM else _hnn_forms
    return list(source(spec, syllables, length))


# ---------------------------------------------------------------------------
# Certified onsets
# ---------------------------------------------------------------------------


def _conjugated(root: FreeWord, exp: int, inner: FreeWord) -> List[Item]:
    return [Power(root, exp), Fixed(inner), Power(root, -exp)]


def double_items(spec: DoubleSpec, w: FreeWord) -> Tuple[Item, ...]:
    """Symbolic ``m -> twist_then_fold(spec, m)(w)``."""
    root, exp = primitive_root(spec.edge)
    n = spec.rank
    items: List[Item] = []
    for x in w.letters:
        index, sign = abs(x), (1 if x > 0 else -1)
        if index <= n:
            items.append(Fixed(generator(index, n) if sign > 0 else invert(generator(index, n))))
        elif spec.kind == AMALGAM:
            letter = generator(index - n, n)
            items += _conjugated(root, -exp, letter if sign > 0 else invert(letter))
        else:
            items.append(Power(root, -exp * sign))
    return tuple(items)


def double_onset_certified(spec: DoubleSpec, w: FreeWord) -> SymbolicOnset:
    """Onset from which ``twist_then_fold(spec, m)`` never kills ``w``; ``w`` must be nontrivial in the double."""
    if w.rank != spec.source_rank:
        raise RankMismatchError(f"word of rank {w.rank} is not in the double of rank {spec.source_rank}")
    return certified_onset(double_items(spec, w))


@dataclass(frozen=True)
class ExtensionFamily:
    """``m -> (x_i -> x_i, x_(n+1) -> a^m b a^-m)`` from ``F_(n+1)`` onto ``F_n``."""

    rank: int
    a: FreeWord
    b: FreeWord

    def images(self, m: int) -> Dict[int, FreeWord]:
        images = {i: generator(i, self.rank) for i in range(1, self.rank + 1)}
        a_m = power(self.a, m)
        images[self.rank + 1] = multiply(a_m, self.b, invert(a_m))
        return images

    def apply(self, w: FreeWord, m: int) -> FreeWord:
        return apply_hom(self.images(m), w, self.rank)


def extend_rank(n: int, a: FreeWord, b: FreeWord) -> ExtensionFamily:
    if a.rank != n or b.rank != n:
        raise RankMismatchError(f"a and b must lie in F_{n}")
    if a.is_trivial:
        raise TrivialWordError("a must be nontrivial")
    if commutes(a, b):
        raise HypothesisError(f"b = {b} commutes with a = {a}")
    return ExtensionFamily(rank=n, a=a, b=b)


def extension_items(family: ExtensionFamily, w: FreeWord) -> Tuple[Item, ...]:
    root, exp = primitive_root(family.a)
    n = family.rank
    items: List[Item] = []
    for x in w.letters:
        if abs(x) <= n:
            items.append(Fixed(FreeWord((x,), n)))
        else:
            inner = family.b if x > 0 else invert(family.b)
            items += _conjugated(root, exp, inner)
    return tuple(items)


def extension_onset_certified(family: ExtensionFamily, w: FreeWord) -> SymbolicOnset:
    if w.rank != family.rank + 1:
        raise RankMismatchError(f"word of rank {w.rank} is not in F_{family.rank + 1}")
    if w.is_trivial:
        raise TrivialWordError("onset of the identity is undefined")
    return certified_onset(extension_items(family, w))


# ---------------------------------------------------------------------------
# Construction-sequence catalog
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WitnessStep:
    """One epimorphism of a construction sequence, given by generator images."""

    kind: str
    source: Presentation
    images: Tuple[FreeWord, ...]
    target_rank: int

    def replay(self) -> bool:
        images = {i + 1: img for i, img in enumerate(self.images)}
        if len(self.images) != self.source.rank:
            return False
        return _relators_hold(images, self.source.relators, self.target_rank)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    presentation: Presentation
    d_lower: int
    witness: Tuple[WitnessStep, ...] = ()
    note: str = ""

    def replay(self) -> bool:
        """Each step's images kill its relators, the chain starts here and ends in a free group of rank ``d_lower``."""
        if not self.witness:
            return not self.presentation.relators and self.presentation.rank == self.d_lower
        if self.witness[0].source != self.presentation:
            return False
        for prev, step in zip(self.witness, self.witness[1:]):
            if prev.target_rank != step.source.rank:
                return False
        return all(step.replay() for step in self.witness) and self.witness[-1].target_rank == self.d_lower

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "presentation": self.presentation.as_dict(),
            "d_lower_bound": self.d_lower,
            "witness": [
                {"kind": s.kind, "source_rank": s.source.rank, "target_rank": s.target_rank}
                for s in self.witness
            ],
            "note": self.note,
        }


def _double_entry(name: str, spec: DoubleSpec, note: str) -> CatalogEntry:
    step = WitnessStep(spec.kind, spec.presentation, spec.fold, spec.rank)
    return CatalogEntry(name, spec.presentation, spec.rank, (step,), note)


def _surface_entry(r: int) -> CatalogEntry:
    pres = make_presentation(r)
    images = fold_images(pres)
    step = WitnessStep("fold", pres.presentation, tuple(images[i] for i in range(1, pres.rank + 1)), pres.target_rank)
    return CatalogEntry(
        f"Sigma_{pres.genus}",
        pres.presentation,
        pres.genus,
        (step,),
        "d equals the genus; the fold realizes it",
    )


_CATALOG: Optional[Tuple[CatalogEntry, ...]] = None


def catalog() -> List[CatalogEntry]:
    global _CATALOG
    if _CATALOG is None:
        entries = [
            CatalogEntry(f"F_{n}", Presentation(rank=n), n, (), "free; empty sequence")
            for n in (1, 2, 3)
        ]
        entries += [_surface_entry(r) for r in (1, 2, 3)]
        x1, x2 = generator(1, 2), generator(2, 2)
        entries.append(_double_entry("double_F2_comm", double_of_free(2, commutator(x1, x2)), "tightness unknown"))
        y1, y2 = generator(1, 3), generator(2, 3)
        entries.append(_double_entry("double_F3_comm", double_of_free(3, commutator(y1, y2)), "tightness unknown"))
        entries.append(_double_entry("hnn_F2_comm", hnn_of_free(2, commutator(x1, x2)), "tightness unknown"))
        _CATALOG = tuple(entries)
    return list(_CATALOG)


def catalog_entry(name: str) -> CatalogEntry:
    for entry in catalog():
        if entry.name == name:
            return entry
    raise UnknownNameError(f"no catalog entry named {name!r}")


def catalog_d(name: str) -> int:
    return catalog_entry(name).d_lower


# ---------------------------------------------------------------------------
# Residual freeness
# ---------------------------------------------------------------------------

HomFamily = Callable[[int], Mapping[int, FreeWord]]


def separate_set(
    family: HomFamily,
    elements: Sequence[FreeWord],
    budget: int,
    target_rank: Optional[int] = None,
) -> Optional[int]:
    """Least index ``m <= budget`` whose homomorphism kills none of ``elements``."""
    if not elements:
        return 0
    for m in range(budget + 1):
        images = family(m)
        if all(not apply_hom(images, w, target_rank).is_trivial for w in elements):
            return m
    return None


def f2xf2_presentation() -> Presentation:
    g = [generator(i, 4) for i in range(1, 5)]
    relators = tuple(commutator(g[i], g[j]) for i in (0, 1) for j in (2, 3))
    return Presentation(rank=4, relators=relators, names=("x1", "x2", "x1'", "x2'"))


def f2xf2_elements(w: FreeWord, w_prime: FreeWord) -> List[FreeWord]:
    """``(w,1), (w',1), ([w,w'],1), (1,w)`` in the product presentation."""
    return [embed(w, 4), embed(w_prime, 4), embed(commutator(w, w_prime), 4), embed(w, 4, shift=2)]


@dataclass
class F2xF2Scan:
    cap: int
    assignments: int = 0
    separating: int = 0
    collapse_consistent: bool = True
    examples: List[Tuple[str, ...]] = field(default_factory=list)

    @property
    def nonseparable(self) -> bool:
        return self.separating == 0

    def as_dict(self) -> dict:
        return {
            "cap": self.cap,
            "assignments": self.assignments,
            "separating": self.separating,
            "collapse_consistent": self.collapse_consistent,
            "nonseparable": self.nonseparable,
            "separating_examples": [list(e) for e in self.examples],
        }


def _share_root(u: FreeWord, v: FreeWord) -> bool:
    if u.is_trivial or v.is_trivial:
        return True
    root = primitive_root(v)[0]
    return primitive_root(u)[0] in (root, invert(root))


def f2xf2_scan(w: FreeWord, w_prime: FreeWord, cap: int, progress: bool = False) -> F2xF2Scan:
    """Exhaust ``(A, B, C, D)`` in ``F_2`` with lengths ``<= cap`` satisfying the product relations."""
    if w.rank != 2 or w_prime.rank != 2:
        raise RankMismatchError("w and w' must be words in F_2")
    if commutes(w, w_prime):
        raise HypothesisError("w and w' commute")
    if cap > AppConfig.IMAGE_LENGTH_CAP:
        raise CapExceededError(f"image length cap {AppConfig.IMAGE_LENGTH_CAP} exceeded: {cap}")
    pool = words_up_to(2, cap, include_identity=True)
    scan = F2xF2Scan(cap=cap)
    for a, b in tqdm(list(itertools.product(pool, repeat=2)), disable=not progress, desc="f2xf2"):
        left = {1: a, 2: b}
        wa = apply_hom(left, w, 2)
        wpa = apply_hom(left, w_prime, 2)
        left_dead = wa.is_trivial or wpa.is_trivial or commutator(wa, wpa).is_trivial
        shared = _share_root(wa, wpa)
        central = [x for x in pool if commutes(x, a) and commutes(x, b)]
        for c, d in itertools.product(central, repeat=2):
            scan.assignments += 1
            right_alive = not apply_hom({1: c, 2: d}, w, 2).is_trivial
            if right_alive and not shared:
                scan.collapse_consistent = False
            if right_alive and not left_dead:
                scan.separating += 1
                if len(scan.examples) < 5:
                    scan.examples.append(tuple(str(x) for x in (a, b, c, d)))
    logger.info("f2xf2 scan: %s assignments, %s separating", scan.assignments, scan.separating)
    return scan


def f2xf2_nonseparable(w: FreeWord, w_prime: FreeWord, cap: int) -> bool:
    return f2xf2_scan(w, w_prime, cap).nonseparable
