"""Products of fixed words and powers ``root^(slope*n + offset)`` depending on ``n``.

Families such as ``f_n(w)`` or a Dehn twist ``m -> fold(tau^m(w))`` evaluate
to such a product for every parameter value. After normalization the product
is a relaxed general Baumslag pattern, so one ping-pong certificate bounds
the parameter from which the product is never trivial.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

from limitgroups.services.baumslag import (
    GeneralBaumslagInstance,
    PingPongCertificate,
    USlot,
    ZSlot,
    certify_general,
    eval_conjugated,
    eval_general,
)
from limitgroups.services.errors import InvariantError, PatternError
from limitgroups.services.words import (
    FreeWord,
    cyclic_exponent,
    format_word,
    identity,
    invert,
    letter_key,
    power,
    primitive_root,
    product_of_powers,
)

logger = logging.getLogger("LIMITGROUPS")


@dataclass(frozen=True)
class Fixed:
    word: FreeWord

    def __str__(self) -> str:
        return format_word(self.word)


@dataclass(frozen=True)
class Power:
    """``root^(slope*n + offset)``."""

    root: FreeWord
    slope: int
    offset: int = 0

    def exponent(self, n: int) -> int:
        return self.slope * n + self.offset

    def __str__(self) -> str:
        return f"({format_word(self.root)})^({self.slope}n{self.offset:+d})"


Item = Union[Fixed, Power]


def evaluate(items: Sequence[Item], n: int) -> FreeWord:
    if not items:
        raise PatternError("empty symbolic product")
    return product_of_powers(
        (item.word, 1) if isinstance(item, Fixed) else (item.root, item.exponent(n)) for item in items
    )


def _canonical_power(item: Power) -> Item:
    if item.root.is_trivial:
        return Fixed(identity(item.root.rank))
    root, exp = primitive_root(item.root)
    slope, offset = item.slope * exp, item.offset * exp
    flipped = invert(root)
    if tuple(letter_key(x) for x in flipped.letters) < tuple(letter_key(x) for x in root.letters):
        root, slope, offset = flipped, -slope, -offset
    if slope == 0:
        return Fixed(power(root, offset))
    return Power(root, slope, offset)


def normalize(items: Sequence[Item]) -> Tuple[Item, ...]:
    """Merge neighbours, absorb fixed words lying in an adjacent power's cyclic group."""
    current: List[Item] = [_canonical_power(i) if isinstance(i, Power) else i for i in items]
    changed = True
    while changed:
        changed = False
        merged: List[Item] = []
        for item in current:
            if isinstance(item, Fixed) and item.word.is_trivial:
                changed = True
                continue
            if merged and isinstance(item, Fixed) and isinstance(merged[-1], Fixed):
                merged[-1] = Fixed(merged[-1].word * item.word)
                changed = True
                continue
            if merged and isinstance(item, Power) and isinstance(merged[-1], Power) and merged[-1].root == item.root:
                prev = merged.pop()
                merged.append(_canonical_power(Power(item.root, prev.slope + item.slope, prev.offset + item.offset)))
                changed = True
                continue
            merged.append(item)
        for pos, item in enumerate(merged):
            if not isinstance(item, Fixed):
                continue
            for npos in (pos + 1, pos - 1):
                if 0 <= npos < len(merged) and isinstance(merged[npos], Power):
                    neighbour = merged[npos]
                    e = cyclic_exponent(item.word, neighbour.root)
                    if e is not None:
                        merged[npos] = Power(neighbour.root, neighbour.slope, neighbour.offset + e)
                        merged[pos] = Fixed(identity(item.word.rank))
                        changed = True
                        break
            if changed:
                break
        current = merged
    return tuple(current)


@dataclass
class SymbolicOnset:
    """``onset`` such that the product is nontrivial for every ``n >= onset``."""

    onset: int
    items: Tuple[Item, ...]
    instance: Optional[GeneralBaumslagInstance] = None
    certificate: Optional[PingPongCertificate] = None

    def as_dict(self) -> dict:
        data = {
            "onset": self.onset,
            "product": " * ".join(str(i) for i in self.items) or "1",
        }
        if self.instance is not None and self.certificate is not None:
            data["certificate"] = self.certificate.as_dict(self.instance)
        return data


def to_instance(items: Sequence[Item]) -> Tuple[GeneralBaumslagInstance, List[Power]]:
    """Relaxed instance of a normalized product; returns the powers in z-slot order."""
    z_list: List[FreeWord] = []
    u_list: List[FreeWord] = []
    pattern: list = []
    powers: List[Power] = []
    for item in items:
        if isinstance(item, Fixed):
            if item.word not in u_list:
                u_list.append(item.word)
            pattern.append(USlot(u_list.index(item.word) + 1))
            continue
        if item.root not in z_list:
            z_list.append(item.root)
        if pattern and isinstance(pattern[-1], ZSlot):
            pattern.append(USlot(0))
        pattern.append(ZSlot(z_list.index(item.root) + 1, 1 if item.slope > 0 else -1))
        powers.append(item)
    inst = GeneralBaumslagInstance(z_list=tuple(z_list), u_list=tuple(u_list), pattern=tuple(pattern), relaxed=True)
    return inst, powers


def slot_exponents(powers: Sequence[Power], n: int) -> List[int]:
    """Per z-slot exponents ``t`` with ``sign * t = slope * n + offset``."""
    return [p.exponent(n) * (1 if p.slope > 0 else -1) for p in powers]


def certified_onset(items: Sequence[Item]) -> SymbolicOnset:
    normal = normalize(items)
    powers = [i for i in normal if isinstance(i, Power)]
    if not powers:
        word = normal[0].word if normal else None
        if word is None or word.is_trivial:
            raise InvariantError("symbolic product is the identity for every parameter")
        return SymbolicOnset(onset=1, items=normal)
    inst, powers = to_instance(normal)
    cert = certify_general(inst)
    onset = max(1, max(math.ceil((cert.N + abs(p.offset)) / abs(p.slope)) for p in powers))
    check = eval_general(inst, slot_exponents(powers, onset))
    if check != evaluate(normal, onset):
        raise InvariantError("symbolic instance does not reproduce its product")
    logger.debug("symbolic onset %s from N=%s", onset, cert.N)
    return SymbolicOnset(onset=onset, items=normal, instance=inst, certificate=cert)


def conjugated_items(a: FreeWord, b: FreeWord, ls: Sequence[int], ws: Sequence[FreeWord]) -> Tuple[Item, ...]:
    """Symbolic form of ``w_m b^-k a^l_m b^k ... w_1 b^-k a^l_1 b^k w_0`` in ``k``."""
    if len(ws) != len(ls) + 1:
        raise PatternError(f"expected {len(ls) + 1} words w_0..w_m, got {len(ws)}")
    root, exp = primitive_root(b)
    items: List[Item] = [Fixed(ws[0])]
    for l, w in zip(ls, ws[1:]):
        items = [Fixed(w), Power(root, -exp), Fixed(power(a, l)), Power(root, exp)] + items
    return tuple(items)


def certify_conjugated(a: FreeWord, b: FreeWord, ls: Sequence[int], ws: Sequence[FreeWord]) -> SymbolicOnset:
    """``k0`` such that the conjugated-powers word is nontrivial for every ``k >= k0``."""
    eval_conjugated(a, b, ls, ws, 0)
    return certified_onset(conjugated_items(a, b, ls, ws))
