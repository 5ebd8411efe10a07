"""Closed surface group of genus ``2r+1`` split along the curve ``b``.

Generators, in index order::

    a1, a1', ..., ar, ar', b, b', c1, c1', ..., cr, cr'

The relator is ``[a1,a1']...[ar,ar'] [b',b] [cr',cr]...[c1',c1]`` with
``[x,y] = x y x^-1 y^-1``. The c-block runs from ``r`` down to ``1`` so that
the folding map ``a_i, c_i -> x_i``, ``a_i', c_i' -> x_i'``, ``b -> 1``,
``b' -> y'`` kills the relator for every ``r``; for ``r = 1`` this is the
usual ``[a1,a1'][b',b][c1',c1]``.

The word problem is solved with Dehn's algorithm, which is exact for
surface relators of genus at least two.
"""
from __future__ import annotations

import functools
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from tqdm import tqdm

from limitgroups.config.settings import AppConfig
from limitgroups.services.errors import (
    CapExceededError,
    HypothesisError,
    InvariantError,
    TrivialWordError,
)
from limitgroups.services.symbolic import Fixed, Item, Power, SymbolicOnset, certified_onset
from limitgroups.services.words import (
    FreeWord,
    Presentation,
    apply_hom,
    are_conjugate,
    commutator,
    commutes,
    conjugate,
    format_word,
    generator,
    identity,
    invert,
    is_proper_power,
    iter_reduced_words,
    multiply,
    power,
)

logger = logging.getLogger("LIMITGROUPS")


# ---------------------------------------------------------------------------
# Presentation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SurfacePresentation:
    r: int
    relator: FreeWord
    alpha: FreeWord
    beta: FreeWord
    y: FreeWord
    y_prime: FreeWord
    names: Tuple[str, ...]
    target_names: Tuple[str, ...]

    @property
    def genus(self) -> int:
        return 2 * self.r + 1

    @property
    def rank(self) -> int:
        return 4 * self.r + 2

    @property
    def target_rank(self) -> int:
        return 2 * self.r + 1

    # index helpers
    def a(self, i: int) -> int:
        return 2 * i - 1

    def a_prime(self, i: int) -> int:
        return 2 * i

    @property
    def b(self) -> int:
        return 2 * self.r + 1

    @property
    def b_prime(self) -> int:
        return 2 * self.r + 2

    def c(self, i: int) -> int:
        return 2 * self.r + 2 * i + 1

    def c_prime(self, i: int) -> int:
        return 2 * self.r + 2 * i + 2

    @property
    def upper_generators(self) -> Tuple[int, ...]:
        return tuple(range(1, 2 * self.r + 1)) + (self.b_prime,)

    @property
    def lower_generators(self) -> Tuple[int, ...]:
        return tuple(range(2 * self.r + 3, 4 * self.r + 3))

    @property
    def presentation(self) -> Presentation:
        return Presentation(rank=self.rank, relators=(self.relator,), names=self.names)

    @property
    def target(self) -> Presentation:
        return Presentation(rank=self.target_rank, relators=(), names=self.target_names)

    def gen(self, name: str) -> FreeWord:
        return self.presentation.gen(name)

    def word(self, text: str) -> FreeWord:
        return self.presentation.word(text)

    def element(self, w: Union[str, FreeWord]) -> "SurfaceWord":
        return surface_word(self, self.word(w) if isinstance(w, str) else w)

    def format(self, w: FreeWord) -> str:
        return format_word(w, self.names)

    def format_target(self, w: FreeWord) -> str:
        return format_word(w, self.target_names)

    def as_dict(self) -> dict:
        return {
            "r": self.r,
            "genus": self.genus,
            "generators": list(self.names),
            "relator": self.format(self.relator),
            "alpha": self.format(self.alpha),
            "beta": self.format(self.beta),
            "fold_target": list(self.target_names),
            "y": self.format_target(self.y),
        }


@functools.lru_cache(maxsize=None)
def make_presentation(r: int) -> SurfacePresentation:
    if r < 1:
        raise ValueError(f"r must be at least 1, got {r}")
    rank = 4 * r + 2
    names: List[str] = []
    for i in range(1, r + 1):
        names += [f"a{i}", f"a{i}'"]
    names += ["b", "b'"]
    for i in range(1, r + 1):
        names += [f"c{i}", f"c{i}'"]
    target_names: List[str] = []
    for i in range(1, r + 1):
        target_names += [f"x{i}", f"x{i}'"]
    target_names.append("y'")

    def g(index: int) -> FreeWord:
        return generator(index, rank)

    b, b_prime = g(2 * r + 1), g(2 * r + 2)
    a_block = multiply(identity(rank), *(commutator(g(2 * i - 1), g(2 * i)) for i in range(1, r + 1)))
    c_block = multiply(
        identity(rank),
        *(commutator(g(2 * r + 2 * i + 2), g(2 * r + 2 * i + 1)) for i in range(r, 0, -1)),
    )
    relator = multiply(a_block, commutator(b_prime, b), c_block)

    t_rank = 2 * r + 1
    x_block = multiply(
        identity(t_rank),
        *(commutator(generator(2 * i - 1, t_rank), generator(2 * i, t_rank)) for i in range(1, r + 1)),
    )
    y_prime = generator(t_rank, t_rank)
    return SurfacePresentation(
        r=r,
        relator=relator,
        alpha=a_block * b_prime,
        beta=b_prime,
        y=x_block * y_prime,
        y_prime=y_prime,
        names=tuple(names),
        target_names=tuple(target_names),
    )


# ---------------------------------------------------------------------------
# Dehn's algorithm
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def _dehn_table(r: int) -> Tuple[int, Dict[Tuple[int, ...], Tuple[int, ...]]]:
    """Map every window of ``len(R)//2 + 1`` letters of a cyclic permutation of ``R^+-1`` to its shorter complement."""
    pres = make_presentation(r)
    rel = pres.relator.letters
    size = len(rel)
    window = size // 2 + 1
    table: Dict[Tuple[int, ...], Tuple[int, ...]] = {}
    for word in (rel, invert(pres.relator).letters):
        for shift in range(size):
            cyc = word[shift:] + word[:shift]
            head, rest = cyc[:window], cyc[window:]
            table[head] = tuple(-x for x in reversed(rest))
    return window, table


def _free_reduce(letters: Iterable[int]) -> List[int]:
    stack: List[int] = []
    for x in letters:
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return stack


def dehn_reduce(pres: SurfacePresentation, w: FreeWord) -> FreeWord:
    window, table = _dehn_table(pres.r)
    letters = _free_reduce(w.letters)
    changed = True
    while changed:
        changed = False
        for i in range(len(letters) - window + 1):
            replacement = table.get(tuple(letters[i : i + window]))
            if replacement is not None:
                letters = _free_reduce(letters[:i] + list(replacement) + letters[i + window :])
                changed = True
                break
    return FreeWord(tuple(letters), w.rank)


@dataclass(frozen=True)
class SurfaceWord:
    presentation: SurfacePresentation
    word: FreeWord
    canonical: FreeWord

    @property
    def is_trivial(self) -> bool:
        return self.canonical.is_trivial

    def __mul__(self, other: "SurfaceWord") -> "SurfaceWord":
        return surface_word(self.presentation, self.word * other.word)

    def inverse(self) -> "SurfaceWord":
        return surface_word(self.presentation, invert(self.word))

    def __str__(self) -> str:
        return self.presentation.format(self.canonical)


def surface_word(pres: SurfacePresentation, w: FreeWord) -> SurfaceWord:
    if w.rank != pres.rank:
        raise ValueError(f"word of rank {w.rank} is not a word in the {pres.rank} surface generators")
    return SurfaceWord(pres, w, dehn_reduce(pres, w))


SurfaceInput = Union[SurfaceWord, FreeWord]


def _split(w: SurfaceInput, pres: Optional[SurfacePresentation]) -> Tuple[SurfacePresentation, FreeWord]:
    if isinstance(w, SurfaceWord):
        return w.presentation, w.word
    if pres is None:
        raise ValueError("a bare FreeWord needs an explicit presentation")
    return pres, w


def dehn_is_trivial(w: SurfaceInput, pres: Optional[SurfacePresentation] = None) -> bool:
    pres, word = _split(w, pres)
    return dehn_reduce(pres, word).is_trivial


def equal_in_group(u: SurfaceWord, v: SurfaceWord) -> bool:
    return dehn_is_trivial(u.word * invert(v.word), u.presentation)


def abelianize(w: SurfaceInput, pres: Optional[SurfacePresentation] = None) -> Tuple[int, ...]:
    """Exponent-sum vector; the relator is a product of commutators so this is ``H_1``."""
    pres, word = _split(w, pres)
    sums = [0] * pres.rank
    for x in word.letters:
        sums[abs(x) - 1] += 1 if x > 0 else -1
    return tuple(sums)


# ---------------------------------------------------------------------------
# Twists and folding
# ---------------------------------------------------------------------------


def _identity_images(pres: SurfacePresentation) -> Dict[int, FreeWord]:
    return {i: generator(i, pres.rank) for i in range(1, pres.rank + 1)}


def _apply(pres: SurfacePresentation, images: Dict[int, FreeWord], w: FreeWord) -> SurfaceWord:
    return surface_word(pres, apply_hom(images, w, pres.rank))


def sigma_images(pres: SurfacePresentation, inverse: bool = False) -> Dict[int, FreeWord]:
    alpha = invert(pres.alpha) if inverse else pres.alpha
    images = _identity_images(pres)
    images[pres.b] = alpha * images[pres.b]
    for index in pres.lower_generators:
        images[index] = conjugate(images[index], alpha)
    return images


def tau_images(pres: SurfacePresentation, inverse: bool = False) -> Dict[int, FreeWord]:
    images = _identity_images(pres)
    beta = pres.beta if inverse else invert(pres.beta)
    images[pres.b] = images[pres.b] * beta
    return images


def delta_images(pres: SurfacePresentation, n: int) -> Dict[int, FreeWord]:
    """Closed form of ``(sigma o tau)^n``: ``b -> a^n b beta^-n``, ``c -> a^n c a^-n``."""
    alpha_n = power(pres.alpha, n)
    images = _identity_images(pres)
    images[pres.b] = multiply(alpha_n, images[pres.b], power(pres.beta, -n))
    for index in pres.lower_generators:
        images[index] = conjugate(images[index], alpha_n)
    return images


def twist_sigma(w: SurfaceInput, pres: Optional[SurfacePresentation] = None) -> SurfaceWord:
    pres, word = _split(w, pres)
    return _apply(pres, sigma_images(pres), word)


def twist_tau(w: SurfaceInput, pres: Optional[SurfacePresentation] = None) -> SurfaceWord:
    pres, word = _split(w, pres)
    return _apply(pres, tau_images(pres), word)


def twist_sigma_inv(w: SurfaceInput, pres: Optional[SurfacePresentation] = None) -> SurfaceWord:
    pres, word = _split(w, pres)
    return _apply(pres, sigma_images(pres, inverse=True), word)


def twist_tau_inv(w: SurfaceInput, pres: Optional[SurfacePresentation] = None) -> SurfaceWord:
    pres, word = _split(w, pres)
    return _apply(pres, tau_images(pres, inverse=True), word)


def delta_pow(w: SurfaceInput, n: int, pres: Optional[SurfacePresentation] = None) -> SurfaceWord:
    pres, word = _split(w, pres)
    return _apply(pres, delta_images(pres, n), word)


def fold_images(pres: SurfacePresentation) -> Dict[int, FreeWord]:
    t = pres.target_rank
    images: Dict[int, FreeWord] = {}
    for i in range(1, pres.r + 1):
        images[pres.a(i)] = images[pres.c(i)] = generator(2 * i - 1, t)
        images[pres.a_prime(i)] = images[pres.c_prime(i)] = generator(2 * i, t)
    images[pres.b] = identity(t)
    images[pres.b_prime] = pres.y_prime
    return images


def fold(w: SurfaceInput, pres: Optional[SurfacePresentation] = None) -> FreeWord:
    pres, word = _split(w, pres)
    return apply_hom(fold_images(pres), word, pres.target_rank)


def f_n(w: SurfaceInput, n: int, pres: Optional[SurfacePresentation] = None) -> FreeWord:
    """``fold(delta^n(w))``."""
    pres, word = _split(w, pres)
    return fold(apply_hom(delta_images(pres, n), word, pres.rank), pres)


def rho_images(pres: SurfacePresentation, n: int) -> Dict[int, FreeWord]:
    """Generator images of the ``(g, h) = (y^n, y'^n)`` assignment into the fold target."""
    t = pres.target_rank
    g, h = power(pres.y, n), power(pres.y_prime, n)
    images: Dict[int, FreeWord] = {}
    for i in range(1, pres.r + 1):
        x, x_prime = generator(2 * i - 1, t), generator(2 * i, t)
        images[pres.a(i)] = x
        images[pres.a_prime(i)] = x_prime
        images[pres.c(i)] = conjugate(x, g)
        images[pres.c_prime(i)] = conjugate(x_prime, g)
    images[pres.b] = g * invert(h)
    images[pres.b_prime] = pres.y_prime
    return images


def rho_power_symbolic(w: SurfaceInput, n: int, pres: Optional[SurfacePresentation] = None) -> FreeWord:
    pres, word = _split(w, pres)
    return apply_hom(rho_images(pres, n), word, pres.target_rank)


# ---------------------------------------------------------------------------
# Balls
# ---------------------------------------------------------------------------


def _invariants(pres: SurfacePresentation, w: FreeWord) -> tuple:
    return (abelianize(w, pres),) + tuple(f_n(w, n, pres).letters for n in range(3))


@functools.lru_cache(maxsize=16)
def _ball(r: int, radius: int) -> Tuple[SurfaceWord, ...]:
    pres = make_presentation(r)
    buckets: Dict[tuple, List[SurfaceWord]] = {}
    kept: List[SurfaceWord] = []
    for length in range(1, radius + 1):
        for word in iter_reduced_words(pres.rank, length):
            element = surface_word(pres, word)
            if element.is_trivial or len(element.canonical) > radius:
                continue
            bucket = buckets.setdefault(_invariants(pres, word), [])
            if any(equal_in_group(element, other) for other in bucket):
                continue
            bucket.append(element)
            kept.append(element)
    return tuple(kept)


def ball(radius: int, r: int = 1) -> List[SurfaceWord]:
    """Pairwise distinct nontrivial elements of canonical length ``<= radius`` in shortlex order."""
    if radius > AppConfig.BALL_RADIUS_CAP:
        raise CapExceededError(f"ball radius {radius} exceeds the cap {AppConfig.BALL_RADIUS_CAP}")
    if radius < 1:
        return []
    return list(_ball(r, radius))


# ---------------------------------------------------------------------------
# Half-surface decomposition and onsets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HalfSurfaceDecomposition:
    """``b^e0 p0 b^e1 p1 ... p(L-1) b^eL`` in written order.

    Upper pieces use only ``a_i, a_i', b'``; lower pieces only ``c_i, c_i'``.
    """

    exponents: Tuple[int, ...]
    pieces: Tuple[FreeWord, ...]
    types: Tuple[str, ...]

    def reconstruct(self, pres: SurfacePresentation) -> FreeWord:
        b = generator(pres.b, pres.rank)
        factors = [power(b, self.exponents[0])]
        for piece, e in zip(self.pieces, self.exponents[1:]):
            factors += [piece, power(b, e)]
        return multiply(*factors)

    def as_dict(self, pres: SurfacePresentation) -> dict:
        return {
            "exponents": list(self.exponents),
            "pieces": [pres.format(p) for p in self.pieces],
            "types": list(self.types),
        }


def decompose(w: SurfaceWord) -> HalfSurfaceDecomposition:
    """Greedy split of the canonical form into b-powers and maximal one-half runs."""
    if w.is_trivial:
        raise TrivialWordError("decompose needs a nontrivial element")
    pres = w.presentation
    upper = set(pres.upper_generators)
    exponents: List[int] = [0]
    pieces: List[List[int]] = []
    types: List[str] = []
    for x in w.canonical.letters:
        if abs(x) == pres.b:
            exponents[-1] += 1 if x > 0 else -1
            continue
        kind = "upper" if abs(x) in upper else "lower"
        if pieces and exponents[-1] == 0 and types[-1] == kind:
            pieces[-1].append(x)
            continue
        pieces.append([x])
        types.append(kind)
        exponents.append(0)
    fixed_pieces = tuple(FreeWord(tuple(p), pres.rank) for p in pieces)
    return HalfSurfaceDecomposition(tuple(exponents), fixed_pieces, tuple(types))


def symbolic_f_n(w: SurfaceWord) -> Tuple[Item, ...]:
    """Product of fixed words and powers of ``y``, ``y'`` equal to ``f_n(w)`` for every ``n``."""
    pres = w.presentation
    dec = decompose(w)
    y, y_prime = pres.y, pres.y_prime
    items: List[Item] = []

    def b_power(k: int) -> List[Item]:
        unit = [Power(y, 1), Power(y_prime, -1)] if k > 0 else [Power(y_prime, 1), Power(y, -1)]
        return unit * abs(k)

    items += b_power(dec.exponents[0])
    for piece, kind, e in zip(dec.pieces, dec.types, dec.exponents[1:]):
        folded = fold(piece, pres)
        if kind == "upper":
            items.append(Fixed(folded))
        else:
            items += [Power(y, 1), Fixed(folded), Power(y, -1)]
        items += b_power(e)
    return tuple(items)


def onset_empirical(w: SurfaceWord, window: int, cap: Optional[int] = None) -> int:
    """Least ``n0`` with ``f_m(w) != 1`` for every ``m`` in ``[n0, n0 + window]``."""
    if w.is_trivial:
        raise TrivialWordError("onset of the identity is undefined")
    cap = AppConfig.ONSET_SEARCH_CAP if cap is None else cap
    pres = w.presentation
    run_start = 0
    for m in range(0, cap + window + 1):
        if f_n(w.word, m, pres).is_trivial:
            run_start = m + 1
        elif m - run_start >= window:
            return run_start
    raise CapExceededError(f"no clean window of {window} parameters before {cap + window}")


def onset_certificate(w: SurfaceWord) -> SymbolicOnset:
    if w.is_trivial:
        raise TrivialWordError("certified onset of the identity is undefined")
    try:
        return certified_onset(symbolic_f_n(w))
    except HypothesisError as exc:
        raise InvariantError(f"folding hypotheses failed for {w}: {exc}") from exc


def onset_certified(w: SurfaceWord) -> int:
    """``N0`` with ``f_n(w) != 1`` for all ``n >= N0``."""
    return onset_certificate(w).onset


def check_fold_hypotheses(pres: SurfacePresentation, radius: int = 2) -> List[str]:
    """Instance checks behind the folding argument, over the fold-target ball of ``radius``."""
    y, yp = pres.y, pres.y_prime
    problems = []
    if is_proper_power(y):
        problems.append("y is a proper power")
    if is_proper_power(yp):
        problems.append("y' is a proper power")
    if are_conjugate(y, yp) or are_conjugate(y, invert(yp)):
        problems.append("y is conjugate to y'^+-1")
    for length in range(0, radius + 1):
        for x in iter_reduced_words(pres.target_rank, length):
            if commutes(conjugate(y, x), yp):
                problems.append(f"[x y x^-1, y'] = 1 for x = {pres.format_target(x)}")
            if commutes(conjugate(yp, x), y):
                problems.append(f"[x y' x^-1, y] = 1 for x = {pres.format_target(x)}")
    return problems


def twist_audit(pres: SurfacePresentation, words: Sequence[FreeWord], progress: bool = False) -> Dict[str, int]:
    """Failure counts of the twist identities over generators plus ``words``."""
    failures = {"commute": 0, "sigma_inverse": 0, "tau_inverse": 0, "relator": 0, "delta": 0}
    gens = [generator(i, pres.rank) for i in range(1, pres.rank + 1)]
    for w in tqdm(gens + list(words), disable=not progress, desc="twist audit"):
        st = twist_sigma(twist_tau(w, pres).word, pres)
        ts = twist_tau(twist_sigma(w, pres).word, pres)
        if not dehn_is_trivial(st.word * invert(ts.word), pres):
            failures["commute"] += 1
        if not dehn_is_trivial(twist_sigma_inv(twist_sigma(w, pres).word, pres).word * invert(w), pres):
            failures["sigma_inverse"] += 1
        if not dehn_is_trivial(twist_tau_inv(twist_tau(w, pres).word, pres).word * invert(w), pres):
            failures["tau_inverse"] += 1
        if not dehn_is_trivial(st.word * invert(delta_pow(w, 1, pres).word), pres):
            failures["delta"] += 1
    for images in (sigma_images(pres), tau_images(pres)):
        if not dehn_is_trivial(apply_hom(images, pres.relator, pres.rank), pres):
            failures["relator"] += 1
    return failures
