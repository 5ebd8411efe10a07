"""Exact arithmetic in finite-rank free groups.

Letters are signed 1-based generator indices: ``+i`` is the i-th free
generator and ``-i`` its inverse. A :class:`FreeWord` always holds a freely
reduced letter sequence, so equality of group elements is tuple equality.
Named alphabets (``a1'``, ``y'`` ...) only exist at the presentation level,
see :class:`Presentation`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from limitgroups.services.errors import (
    MalformedLetterError,
    MissingImageError,
    RankMismatchError,
    TrivialWordError,
    UnknownNameError,
)

Letter = int


def _check_letters(letters: Iterable[int], rank: int) -> None:
    if rank < 1:
        raise MalformedLetterError(f"rank must be positive, got {rank}")
    for letter in letters:
        if letter == 0 or abs(letter) > rank:
            raise MalformedLetterError(f"letter {letter} is not valid in rank {rank}")


@dataclass(frozen=True)
class FreeWord:
    """A reduced word in the free group of the given rank."""

    letters: Tuple[int, ...]
    rank: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "letters", tuple(self.letters))
        _check_letters(self.letters, self.rank)
        for left, right in zip(self.letters, self.letters[1:]):
            if left == -right:
                raise MalformedLetterError(
                    f"letters {self.letters} are not freely reduced; use reduce()"
                )

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return FreeWord(self.letters[item], self.rank)
        return self.letters[item]

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        return concat(self, other)

    def __pow__(self, exponent: int) -> "FreeWord":
        return power(self, exponent)

    def __str__(self) -> str:
        return format_word(self)

    @property
    def is_trivial(self) -> bool:
        return not self.letters

    def inverse(self) -> "FreeWord":
        return invert(self)


@dataclass(frozen=True)
class CyclicDecomp:
    """``original = conjugator * core * conjugator^-1`` with a cyclically reduced core."""

    conjugator: FreeWord
    core: FreeWord


# ---------------------------------------------------------------------------
# Core operations
# ---------------------------------------------------------------------------


def reduce(letters: Iterable[int], rank: int) -> FreeWord:
    letters = list(letters)
    _check_letters(letters, rank)
    stack: List[int] = []
    for letter in letters:
        if stack and stack[-1] == -letter:
            stack.pop()
        else:
            stack.append(letter)
    return FreeWord(tuple(stack), rank)


def identity(rank: int) -> FreeWord:
    return FreeWord((), rank)


def generator(index: int, rank: int) -> FreeWord:
    return FreeWord((index,), rank)


def _same_rank(*words: FreeWord) -> int:
    ranks = {w.rank for w in words}
    if len(ranks) != 1:
        raise RankMismatchError(f"words live in free groups of different ranks {sorted(ranks)}")
    return ranks.pop()


def concat(u: FreeWord, v: FreeWord) -> FreeWord:
    rank = _same_rank(u, v)
    left = list(u.letters)
    right = v.letters
    i = 0
    while left and i < len(right) and left[-1] == -right[i]:
        left.pop()
        i += 1
    return FreeWord(tuple(left) + right[i:], rank)


def multiply(*words: FreeWord) -> FreeWord:
    """Product of one or more words, left to right."""
    if not words:
        raise ValueError("multiply() needs at least one word")
    result = words[0]
    for word in words[1:]:
        result = concat(result, word)
    return result


def invert(w: FreeWord) -> FreeWord:
    return FreeWord(tuple(-letter for letter in reversed(w.letters)), w.rank)


def conjugate(w: FreeWord, u: FreeWord) -> FreeWord:
    """Return ``u * w * u^-1``."""
    return concat(concat(u, w), invert(u))


def power(w: FreeWord, exponent: int) -> FreeWord:
    if exponent == 0 or w.is_trivial:
        return identity(w.rank)
    base = w if exponent > 0 else invert(w)
    count = abs(exponent)
    decomp = cyclic_decompose(base)
    core = decomp.core.letters * count
    return conjugate(FreeWord(core, w.rank), decomp.conjugator)


def commutator(a: FreeWord, b: FreeWord) -> FreeWord:
    """``[a, b] = a b a^-1 b^-1``."""
    return multiply(a, b, invert(a), invert(b))


def commutes(a: FreeWord, b: FreeWord) -> bool:
    return commutator(a, b).is_trivial


def cyclic_decompose(w: FreeWord) -> CyclicDecomp:
    if w.is_trivial:
        raise TrivialWordError("cyclic_decompose needs a nontrivial word")
    letters = w.letters
    i, j = 0, len(letters) - 1
    while i < j and letters[i] == -letters[j]:
        i += 1
        j -= 1
    return CyclicDecomp(
        conjugator=FreeWord(letters[:i], w.rank),
        core=FreeWord(letters[i : j + 1], w.rank),
    )


def is_cyclically_reduced(w: FreeWord) -> bool:
    return len(w) < 2 or w.letters[0] != -w.letters[-1]


def smallest_period(letters: Tuple[int, ...]) -> int:
    n = len(letters)
    for d in range(1, n + 1):
        if n % d == 0 and letters[:d] * (n // d) == letters:
            return d
    return n


def primitive_root(w: FreeWord) -> Tuple[FreeWord, int]:
    """Return ``(root, exponent)`` with ``w = root**exponent`` and root not a proper power."""
    decomp = cyclic_decompose(w)
    core = decomp.core.letters
    period = smallest_period(core)
    root = conjugate(FreeWord(core[:period], w.rank), decomp.conjugator)
    return root, len(core) // period


def cyclic_exponent(w: FreeWord, c: FreeWord) -> Optional[int]:
    """Return ``e`` with ``w = c**e`` or ``None`` when ``w`` is not in ``<c>``."""
    _same_rank(w, c)
    if w.is_trivial:
        return 0
    if c.is_trivial:
        return None
    w_root, w_exp = primitive_root(w)
    c_root, c_exp = primitive_root(c)
    if w_root == c_root:
        signed = w_exp
    elif w_root == invert(c_root):
        signed = -w_exp
    else:
        return None
    if signed % c_exp:
        return None
    return signed // c_exp


def in_cyclic_subgroup(w: FreeWord, c: FreeWord) -> bool:
    return cyclic_exponent(w, c) is not None


def are_conjugate(a: FreeWord, b: FreeWord) -> bool:
    _same_rank(a, b)
    if a.is_trivial or b.is_trivial:
        return a.is_trivial and b.is_trivial
    core_a = cyclic_decompose(a).core.letters
    core_b = cyclic_decompose(b).core.letters
    if len(core_a) != len(core_b):
        return False
    doubled = core_a + core_a
    n = len(core_b)
    return any(doubled[i : i + n] == core_b for i in range(len(core_a)))


def is_proper_power(w: FreeWord) -> bool:
    return not w.is_trivial and primitive_root(w)[1] > 1


def apply_hom(
    images: Mapping[int, FreeWord],
    w: FreeWord,
    target_rank: Optional[int] = None,
) -> FreeWord:
    """Evaluate the homomorphism ``x_i -> images[i]`` on ``w``."""
    ranks = {img.rank for img in images.values()}
    if target_rank is not None:
        ranks.add(target_rank)
    if len(ranks) > 1:
        raise RankMismatchError(f"homomorphism images have mixed ranks {sorted(ranks)}")
    if not ranks:
        raise MissingImageError("homomorphism has no images and no target rank")
    rank = ranks.pop()
    stack: List[int] = []
    for letter in w.letters:
        image = images.get(abs(letter))
        if image is None:
            raise MissingImageError(f"no image for generator {abs(letter)}")
        seq = image.letters if letter > 0 else tuple(-x for x in reversed(image.letters))
        for x in seq:
            if stack and stack[-1] == -x:
                stack.pop()
            else:
                stack.append(x)
    return FreeWord(tuple(stack), rank)


def embed(w: FreeWord, rank: int, shift: int = 0) -> FreeWord:
    """Reinterpret ``w`` in a larger rank, optionally shifting generator indices."""
    return FreeWord(tuple(x + shift if x > 0 else x - shift for x in w.letters), rank)


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------


def alphabet(rank: int) -> List[int]:
    """Letters in enumeration order ``x1, x1^-1, x2, x2^-1, ...``."""
    return [s * i for i in range(1, rank + 1) for s in (1, -1)]


def letter_key(letter: int) -> Tuple[int, int]:
    return abs(letter), 0 if letter > 0 else 1


def shortlex_key(w: FreeWord) -> Tuple[int, Tuple[Tuple[int, int], ...]]:
    return len(w), tuple(letter_key(x) for x in w.letters)


def iter_reduced_words(rank: int, length: int) -> Iterator[FreeWord]:
    """All reduced words of exactly ``length`` letters, in shortlex order."""
    letters = alphabet(rank)

    def extend(prefix: Tuple[int, ...]) -> Iterator[Tuple[int, ...]]:
        if len(prefix) == length:
            yield prefix
            return
        for letter in letters:
            if prefix and prefix[-1] == -letter:
                continue
            yield from extend(prefix + (letter,))

    for seq in extend(()):
        yield FreeWord(seq, rank)


def words_up_to(rank: int, max_length: int, include_identity: bool = False) -> List[FreeWord]:
    start = 0 if include_identity else 1
    return [
        w for length in range(start, max_length + 1) for w in iter_reduced_words(rank, length)
    ]


# ---------------------------------------------------------------------------
# Text form
# ---------------------------------------------------------------------------

_DEFAULT_NAME = re.compile(r"x(\d+)")


def default_names(rank: int) -> Tuple[str, ...]:
    return tuple(f"x{i}" for i in range(1, rank + 1))


def format_word(w: FreeWord, names: Optional[Sequence[str]] = None) -> str:
    """Printer for the text form: ``x1*x2^-1``; the identity prints as ``1``."""
    if w.is_trivial:
        return "1"
    names = names or default_names(w.rank)
    parts = []
    for letter in w.letters:
        name = names[abs(letter) - 1]
        parts.append(name if letter > 0 else f"{name}^-1")
    return "*".join(parts)


class _WordParser:
    def __init__(self, text: str, names: Optional[Sequence[str]]) -> None:
        self.text = text
        self.pos = 0
        self.names = sorted(
            ((name, i + 1) for i, name in enumerate(names or ())),
            key=lambda item: -len(item[0]),
        )

    def error(self, message: str) -> MalformedLetterError:
        return MalformedLetterError(f"{message} at position {self.pos} in {self.text!r}")

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, char: str) -> None:
        if self.peek() != char:
            raise self.error(f"expected {char!r}")
        self.pos += 1

    def parse(self) -> List[int]:
        letters = self.expr()
        if self.peek():
            raise self.error("unexpected character")
        return letters

    def expr(self) -> List[int]:
        letters: List[int] = []
        while self.peek() and self.peek() not in ",])":
            if self.peek() == "*":
                self.pos += 1
                continue
            letters.extend(self.factor())
        return letters

    def factor(self) -> List[int]:
        letters = self.atom()
        if self.peek() == "^":
            self.pos += 1
            self.skip()
            match = re.compile(r"[+-]?\d+").match(self.text, self.pos)
            if not match:
                raise self.error("expected an integer exponent")
            self.pos = match.end()
            exponent = int(match.group())
            base = letters if exponent >= 0 else [-x for x in reversed(letters)]
            letters = base * abs(exponent)
        return letters

    def atom(self) -> List[int]:
        char = self.peek()
        if char == "[":
            self.pos += 1
            a = self.expr()
            self.expect(",")
            b = self.expr()
            self.expect("]")
            inv_a = [-x for x in reversed(a)]
            inv_b = [-x for x in reversed(b)]
            return a + b + inv_a + inv_b
        if char == "(":
            self.pos += 1
            inner = self.expr()
            self.expect(")")
            return inner
        for name, index in self.names:
            if self.text.startswith(name, self.pos):
                self.pos += len(name)
                return [index]
        if not self.names:
            match = _DEFAULT_NAME.match(self.text, self.pos)
            if match:
                self.pos = match.end()
                index = int(match.group(1))
                if index == 0:
                    raise self.error("generator x0 does not exist")
                return [index]
        if char == "1":
            self.pos += 1
            return []
        raise self.error("unknown generator")


def parse_word(
    text: str,
    rank: Optional[int] = None,
    names: Optional[Sequence[str]] = None,
) -> FreeWord:
    """Parse the text form.

    Accepts juxtaposition or ``*``, integer powers ``x1^3``, parentheses,
    commutator brackets ``[u,v]`` and ``1`` for the identity.
    """
    letters = _WordParser(text, names).parse()
    if rank is None:
        rank = len(names) if names else max((abs(x) for x in letters), default=1)
    return reduce(letters, rank)


# ---------------------------------------------------------------------------
# Presentation metadata
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Presentation:
    """Generators (by name) and relators of a finitely presented group."""

    rank: int
    relators: Tuple[FreeWord, ...] = ()
    names: Tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        names = tuple(self.names) or default_names(self.rank)
        if len(names) != self.rank:
            raise ValueError(f"expected {self.rank} generator names, got {len(names)}")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "relators", tuple(self.relators))
        for rel in self.relators:
            _same_rank(rel, identity(self.rank))

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name) + 1
        except ValueError:
            raise UnknownNameError(f"unknown generator {name!r}") from None

    def gen(self, name: str) -> FreeWord:
        return generator(self.index_of(name), self.rank)

    def word(self, text: str) -> FreeWord:
        return parse_word(text, self.rank, self.names)

    def format(self, w: FreeWord) -> str:
        return format_word(w, self.names)

    def as_dict(self) -> Dict[str, object]:
        return {
            "rank": self.rank,
            "generators": list(self.names),
            "relators": [self.format(rel) for rel in self.relators],
        }


def free_presentation(rank: int, names: Optional[Sequence[str]] = None) -> Presentation:
    return Presentation(rank=rank, relators=(), names=tuple(names or default_names(rank)))


def product_of_powers(pairs: Iterable[Tuple[FreeWord, int]]) -> FreeWord:
    """Reduce ``w1**e1 * w2**e2 * ...`` for a nonempty sequence of pairs."""
    pairs = list(pairs)
    if not pairs:
        raise ValueError("product_of_powers needs at least one factor")
    return multiply(*(power(w, e) for w, e in pairs))

