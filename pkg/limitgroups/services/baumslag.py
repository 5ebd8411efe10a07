"""Baumslag-type nontriviality: evaluation, exhaustive sweeps and ping-pong certificates.

A pattern is written left to right as alternating u-slots and z-slots, e.g.
``u1 z1 u1 z2^-1`` stands for ``u1 * z1^t1 * u1 * z2^-t2``. Internally the
pattern is read right to left (``w_1`` is the rightmost slot) and padded with
``u0 = 1`` on the right when it ends in a z-slot.

Certificates are verified with cylinder algebra only:

* (C1) ``z_j^(e*N) * (boundary - V_j^-e) <= V_j^e`` plus ``z_j^e * V_j^e <= V_j^e``,
  which together give the inclusion for every exponent ``>= N``;
* (C2) ``u_i * V_j^e <= V_(i,j)^e`` and the disjointness family;
* an exact propagation of two start points through the pattern; the
  propagated region never contains both start points, so the word moves one
  of them and cannot be trivial.
"""
from __future__ import annotations

import itertools
import logging
import re
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

from limitgroups.config.settings import AppConfig
from limitgroups.services.errors import (
    CapExceededError,
    HypothesisError,
    PatternError,
    TrivialWordError,
)
from limitgroups.services.tree import (
    BoundaryRay,
    Cylinder,
    complement,
    cylinder_around,
    cylinder_contains,
    cylinder_disjoint,
    cylinder_image,
    cylinder_subset,
    endpoints,
    make_ray,
    pairwise_disjoint,
    translate_ray,
)
from limitgroups.services.words import (
    FreeWord,
    commutes,
    conjugate,
    cyclic_decompose,
    format_word,
    identity,
    invert,
    multiply,
    parse_word,
    power,
)

logger = logging.getLogger("LIMITGROUPS")


# ---------------------------------------------------------------------------
# Instances and patterns
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BaumslagInstance:
    """``a0 z^k0 a1 z^k1 ... an z^kn`` with ``[z, a_i] != 1`` for ``i >= 1``."""

    coefficients: Tuple[FreeWord, ...]
    z: FreeWord

    def __post_init__(self) -> None:
        object.__setattr__(self, "coefficients", tuple(self.coefficients))
        if len(self.coefficients) < 2:
            raise PatternError("a Baumslag instance needs coefficients a0..an with n >= 1")

    @property
    def n(self) -> int:
        return len(self.coefficients) - 1

    @property
    def rank(self) -> int:
        return self.z.rank

    def as_dict(self) -> dict:
        return {
            "kind": "basic",
            "rank": self.rank,
            "z": format_word(self.z),
            "a": [format_word(a) for a in self.coefficients],
        }


@dataclass(frozen=True)
class USlot:
    index: int  # 0 is the identity u0

    def __str__(self) -> str:
        return f"u{self.index}"


@dataclass(frozen=True)
class ZSlot:
    index: int
    sign: int = 1

    def __str__(self) -> str:
        return f"z{self.index}" if self.sign > 0 else f"z{self.index}^-1"


Slot = Union[USlot, ZSlot]

_SLOT = re.compile(r"\s*([uz])(\d+)(\^[+-]?1)?\s*\*?")


def parse_pattern(text: str) -> Tuple[Slot, ...]:
    """Parse ``"u1 z1 u1 z2^-1"`` into slots (written order)."""
    slots: List[Slot] = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        match = _SLOT.match(text, pos)
        if not match or match.end() == pos:
            raise PatternError(f"cannot parse pattern {text!r} at position {pos}")
        kind, index, exponent = match.group(1), int(match.group(2)), match.group(3)
        if kind == "u":
            if exponent:
                raise PatternError("u-slots take no exponent")
            slots.append(USlot(index))
        else:
            slots.append(ZSlot(index, -1 if exponent and "-" in exponent else 1))
        pos = match.end()
    return tuple(slots)


def format_pattern(slots: Sequence[Slot]) -> str:
    return " ".join(str(s) for s in slots)


@dataclass(frozen=True)
class GeneralBaumslagInstance:
    z_list: Tuple[FreeWord, ...]
    u_list: Tuple[FreeWord, ...]
    pattern: Tuple[Slot, ...]
    relaxed: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "z_list", tuple(self.z_list))
        object.__setattr__(self, "u_list", tuple(self.u_list))
        pattern = self.pattern
        if isinstance(pattern, str):
            pattern = parse_pattern(pattern)
        object.__setattr__(self, "pattern", tuple(pattern))
        if not self.z_list:
            raise PatternError("the z-list must not be empty")
        ranks = {w.rank for w in self.z_list + self.u_list}
        if len(ranks) != 1:
            raise PatternError(f"instance words have mixed ranks {sorted(ranks)}")

    @property
    def rank(self) -> int:
        return self.z_list[0].rank

    def u_word(self, index: int) -> FreeWord:
        return identity(self.rank) if index == 0 else self.u_list[index - 1]

    def z_word(self, index: int) -> FreeWord:
        return self.z_list[index - 1]

    @property
    def z_slot_count(self) -> int:
        return sum(1 for s in self.pattern if isinstance(s, ZSlot))

    def as_dict(self) -> dict:
        return {
            "kind": "general",
            "rank": self.rank,
            "z": [format_word(z) for z in self.z_list],
            "u": [format_word(u) for u in self.u_list],
            "pattern": format_pattern(self.pattern),
            "relaxed": self.relaxed,
        }


def instance_from_dict(data: dict) -> Union[BaumslagInstance, GeneralBaumslagInstance]:
    """Read the instance file format used by ``baumslag certify``."""
    rank = data.get("rank")
    if "a" in data:
        texts = [str(data["z"])] + [str(a) for a in data["a"]]
        if rank is None:
            rank = max(parse_word(t).rank for t in texts)
        return BaumslagInstance(
            coefficients=tuple(parse_word(t, rank) for t in texts[1:]),
            z=parse_word(texts[0], rank),
        )
    if "z" not in data or "pattern" not in data:
        raise PatternError("instance needs 'a' and 'z' (basic) or 'z', 'u' and 'pattern' (general)")
    texts = [str(t) for t in data["z"]] + [str(t) for t in data.get("u", [])]
    if rank is None:
        rank = max(parse_word(t).rank for t in texts)
    return GeneralBaumslagInstance(
        z_list=tuple(parse_word(t, rank) for t in data["z"]),
        u_list=tuple(parse_word(t, rank) for t in data.get("u", [])),
        pattern=parse_pattern(str(data["pattern"])),
        relaxed=bool(data.get("relaxed", False)),
    )


def _validate_indices(inst: GeneralBaumslagInstance) -> None:
    for slot in inst.pattern:
        if isinstance(slot, USlot) and not 0 <= slot.index <= len(inst.u_list):
            raise PatternError(f"{slot} does not name a u-word (have {len(inst.u_list)})")
        if isinstance(slot, ZSlot):
            if not 1 <= slot.index <= len(inst.z_list):
                raise PatternError(f"{slot} does not name a z-word (have {len(inst.z_list)})")
            if slot.sign not in (1, -1):
                raise PatternError(f"{slot} has sign {slot.sign}")


def lemma_slots(inst: GeneralBaumslagInstance) -> List[Slot]:
    """Slots ``w_1 .. w_n`` (rightmost first), padded and checked against the side conditions."""
    _validate_indices(inst)
    written = list(inst.pattern)
    if not written:
        raise PatternError("empty pattern")
    for left, right in zip(written, written[1:]):
        if type(left) is type(right):
            raise PatternError(f"pattern must alternate u- and z-slots: {format_pattern(written)}")
    if isinstance(written[-1], ZSlot):
        written.append(USlot(0))
    slots = list(reversed(written))
    n = len(slots)
    for pos, slot in enumerate(slots, start=1):
        if isinstance(slot, USlot) and slot.index == 0:
            if n < 2:
                raise PatternError("a pattern consisting of u0 alone is the identity")
            if 1 < pos < n and slots[pos - 2].index == slots[pos].index:
                raise PatternError(
                    f"interior u0 between equal z-indices z{slots[pos].index} in "
                    f"{format_pattern(inst.pattern)}"
                )
    return slots


def _adjacencies(inst: GeneralBaumslagInstance) -> List[Tuple[Optional[int], int, int]]:
    """``(k, i, j)`` for every written occurrence ``z_k u_i z_j``; ``k`` is ``None`` at the left end."""
    written = list(inst.pattern)
    found = []
    for pos, slot in enumerate(written):
        if not isinstance(slot, USlot) or pos + 1 >= len(written):
            continue
        j = written[pos + 1].index
        k = written[pos - 1].index if pos > 0 else None
        found.append((k, slot.index, j))
    return found


# ---------------------------------------------------------------------------
# Basic lemma
# ---------------------------------------------------------------------------


def check_basic_hypotheses(inst: BaumslagInstance) -> List[str]:
    violations = []
    if inst.z.is_trivial:
        violations.append("z is trivial")
    for i, a in enumerate(inst.coefficients[1:], start=1):
        if commutes(inst.z, a):
            violations.append(f"[z, a{i}] = [{format_word(inst.z)}, {format_word(a)}] = 1")
    return violations


def _require_basic(inst: BaumslagInstance) -> None:
    violations = check_basic_hypotheses(inst)
    if violations:
        raise HypothesisError("Baumslag hypotheses fail: " + "; ".join(violations), violations)


def eval_basic(inst: BaumslagInstance, exponents: Sequence[int]) -> FreeWord:
    if len(exponents) != inst.n + 1:
        raise PatternError(f"expected {inst.n + 1} exponents, got {len(exponents)}")
    factors = []
    for a, k in zip(inst.coefficients, exponents):
        factors.append(a)
        factors.append(power(inst.z, k))
    return multiply(*factors)


def _exponent_values(low: int, window: int) -> List[int]:
    return [sign * v for v in range(low, low + window + 1) for sign in (1, -1)]


def _empirical_min(
    evaluate: Callable[[Tuple[int, ...]], FreeWord],
    slots: int,
    window: int,
    cap: int,
) -> Optional[int]:
    if window < 0 or cap < 1:
        raise ValueError("window must be >= 0 and cap >= 1")
    for low in range(1, cap + 1):
        values = _exponent_values(low, window)
        if all(not evaluate(t).is_trivial for t in itertools.product(values, repeat=slots)):
            return low
        logger.debug("exponent window starting at %s has a trivial word", low)
    return None


def empirical_min_N(inst: BaumslagInstance, window: int, cap: int) -> Optional[int]:
    """Least ``N <= cap`` with every tuple ``N <= |k_i| <= N + window`` nontrivial."""
    _require_basic(inst)
    return _empirical_min(lambda t: eval_basic(inst, t), inst.n + 1, window, cap)


def basic_to_general(inst: BaumslagInstance) -> GeneralBaumslagInstance:
    """Conjugate by ``a0`` and read the basic word as a relaxed general pattern.

    ``a0 z^k0 a1 ... an z^kn`` is conjugate to ``z^k0 a1 z^k1 ... an z^kn a0``,
    which is the pattern ``z1 u1 z1 u2 ... z1 u(n+1)`` over ``u = (a1, .., an, a0)``.
    """
    a = inst.coefficients
    u_list = tuple(a[1:]) + (a[0],)
    pattern: List[Slot] = []
    for i in range(1, len(u_list) + 1):
        pattern.append(ZSlot(1))
        pattern.append(USlot(i))
    return GeneralBaumslagInstance(z_list=(inst.z,), u_list=u_list, pattern=tuple(pattern), relaxed=True)


def certify_basic(inst: BaumslagInstance) -> "PingPongCertificate":
    _require_basic(inst)
    cert = certify_general(basic_to_general(inst))
    cert.notes.append("basic instance conjugated by a0 and certified as a relaxed pattern")
    return cert


def verify_basic(cert: "PingPongCertificate", inst: BaumslagInstance) -> bool:
    return verify_certificate(cert, basic_to_general(inst))


# ---------------------------------------------------------------------------
# Conjugated powers
# ---------------------------------------------------------------------------


def eval_conjugated(
    a: FreeWord,
    b: FreeWord,
    ls: Sequence[int],
    ws: Sequence[FreeWord],
    k: int,
) -> FreeWord:
    """``w_m b^-k a^l_m b^k w_(m-1) ... w_1 b^-k a^l_1 b^k w_0``."""
    m = len(ls)
    if m < 1:
        raise PatternError("need at least one exponent l_1")
    if len(ws) != m + 1:
        raise PatternError(f"expected {m + 1} words w_0..w_m, got {len(ws)}")
    if any(l == 0 for l in ls):
        raise PatternError("exponents l_i must be nonzero")
    if commutes(a, b):
        raise HypothesisError(f"[a, b] = 1 for a={format_word(a)}, b={format_word(b)}")
    for i, w in enumerate(ws):
        if w.is_trivial:
            raise TrivialWordError(f"w_{i} is trivial")
    bk, b_k = power(b, k), power(b, -k)
    factors = [ws[0]]
    for l, w in zip(ls, ws[1:]):
        factors = [w, b_k, power(a, l), bk] + factors
    return multiply(*factors)


# ---------------------------------------------------------------------------
# General lemma
# ---------------------------------------------------------------------------


def check_general_hypotheses(inst: GeneralBaumslagInstance) -> List[str]:
    """Violated commutator conditions, full or relaxed per ``inst.relaxed``."""
    violations: List[str] = []
    fmt = format_word

    def check_pair(i: int, j: int) -> None:
        u, z = inst.u_word(i), inst.z_word(j)
        if commutes(u, z):
            violations.append(f"[u{i}, z{j}] = [{fmt(u)}, {fmt(z)}] = 1")

    def check_triple(i: int, j: int, k: int) -> None:
        u, zj, zk = inst.u_word(i), inst.z_word(j), inst.z_word(k)
        if commutes(conjugate(zj, u), zk):
            violations.append(f"[u{i} z{j} u{i}^-1, z{k}] = 1 (u{i}={fmt(u)}, z{j}={fmt(zj)}, z{k}={fmt(zk)})")

    for j, z in enumerate(inst.z_list, start=1):
        if z.is_trivial:
            violations.append(f"z{j} is trivial")
    if violations:
        return violations

    if not inst.relaxed:
        l, m = len(inst.z_list), len(inst.u_list)
        for i in range(1, m + 1):
            for j in range(1, l + 1):
                check_pair(i, j)
        for i in range(0, m + 1):
            for j in range(1, l + 1):
                for k in range(1, l + 1):
                    if j != k:
                        check_triple(i, j, k)
        return violations

    _validate_indices(inst)
    seen: Set[Tuple[Optional[int], int, int]] = set()
    for k, i, j in _adjacencies(inst):
        if (k, i, j) in seen:
            continue
        seen.add((k, i, j))
        if i > 0:
            check_pair(i, j)
        if k is not None and (i > 0 or j != k):
            check_triple(i, j, k)
    return violations


def _require_general(inst: GeneralBaumslagInstance) -> None:
    violations = check_general_hypotheses(inst)
    if violations:
        mode = "relaxed" if inst.relaxed else "full"
        raise HypothesisError(f"{mode} hypotheses fail: " + "; ".join(violations), violations)


def eval_general(inst: GeneralBaumslagInstance, exponents: Sequence[int]) -> FreeWord:
    """Reduced word of the written pattern with one exponent per z-slot."""
    lemma_slots(inst)
    if len(exponents) != inst.z_slot_count:
        raise PatternError(f"expected {inst.z_slot_count} exponents, got {len(exponents)}")
    factors = [identity(inst.rank)]
    t_iter = iter(exponents)
    for slot in inst.pattern:
        if isinstance(slot, USlot):
            factors.append(inst.u_word(slot.index))
        else:
            factors.append(power(inst.z_word(slot.index), slot.sign * next(t_iter)))
    return multiply(*factors)


def empirical_min_general(inst: GeneralBaumslagInstance, window: int, cap: int) -> Optional[int]:
    _require_general(inst)
    return _empirical_min(lambda t: eval_general(inst, t), inst.z_slot_count, window, cap)


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------


@dataclass
class PingPongCertificate:
    """Machine-checkable proof that a pattern word is nontrivial for all ``|t_i| >= N``.

    ``method`` is ``"ping-pong"`` or ``"direct"`` (short patterns decided by a
    direct argument, carrying no cylinders).
    """

    N: int
    method: str = "ping-pong"
    depth: int = 0
    z_cylinders: Dict[Tuple[int, int], Cylinder] = field(default_factory=dict)
    u_cylinders: Dict[Tuple[int, int, int], Cylinder] = field(default_factory=dict)
    start: Optional[Tuple[BoundaryRay, BoundaryRay]] = None
    notes: List[str] = field(default_factory=list)

    def cylinder_rows(self) -> List[dict]:
        rows = []
        for (j, sign), cyl in sorted(self.z_cylinders.items()):
            rows.append({"role": f"V_{j}^{'+' if sign > 0 else '-'}", **cyl.as_dict()})
        for (i, j, sign), cyl in sorted(self.u_cylinders.items()):
            rows.append({"role": f"V_{i},{j}^{'+' if sign > 0 else '-'}", **cyl.as_dict()})
        return rows

    def as_dict(self, inst: Optional[GeneralBaumslagInstance] = None) -> dict:
        data: dict = {
            "N": self.N,
            "method": self.method,
            "depth": self.depth,
            "cylinders": self.cylinder_rows(),
            "start": [str(p) for p in self.start] if self.start else [],
            "notes": list(self.notes),
        }
        if inst is not None:
            data["instance"] = inst.as_dict()
            data["checks"] = certificate_checks(self, inst)
        return data


def _is_direct_case(slots: List[Slot]) -> bool:
    n = len(slots)
    return n == 1 or (n <= 3 and slots[0] == USlot(0))


def _direct_argument(inst: GeneralBaumslagInstance, slots: List[Slot]) -> Tuple[bool, str]:
    """Decide the short patterns the ping-pong argument leaves out."""
    n = len(slots)
    if n == 1:
        word = inst.u_word(slots[0].index)
        return (not word.is_trivial, f"single word {format_word(word)}")
    z = inst.z_word(slots[1].index)
    if n == 2:
        return (not z.is_trivial, "a nonzero power of a nontrivial z")
    u = inst.u_word(slots[2].index)
    if u.is_trivial:
        return (not z.is_trivial, "u is trivial, word is a nonzero power of z")
    return (not commutes(u, z), "u z^t with [u, z] != 1 is never trivial")


def _anchor_pairs(inst: GeneralBaumslagInstance) -> List[Tuple[BoundaryRay, BoundaryRay]]:
    pairs = []
    for z in inst.z_list:
        plus, minus = endpoints(z)
        pairs.append((plus, minus))
    rank = inst.rank
    for i in range(1, rank + 1):
        pairs.append((make_ray((), (i,), rank), make_ray((), (-i,), rank)))
    for i in range(1, rank + 1):
        for j in range(i + 1, rank + 1):
            for si in (1, -1):
                for sj in (1, -1):
                    pairs.append((make_ray((), (si * i,), rank), make_ray((), (sj * j,), rank)))
    return pairs


def _start_candidates(
    inst: GeneralBaumslagInstance, slots: List[Slot]
) -> List[Tuple[BoundaryRay, BoundaryRay]]:
    first = inst.u_word(slots[0].index)
    candidates = []
    for p, q in _anchor_pairs(inst):
        candidates.append((p, q))
        if not first.is_trivial:
            back = invert(first)
            candidates.append((translate_ray(back, p), translate_ray(back, q)))
    return candidates


def _propagate(
    inst: GeneralBaumslagInstance,
    slots: List[Slot],
    z_cyl: Dict[Tuple[int, int], Cylinder],
    z_ends: Dict[int, Tuple[BoundaryRay, BoundaryRay]],
    start: Tuple[BoundaryRay, BoundaryRay],
) -> bool:
    """Push the start points through ``w_1, ..., w_n`` and run the end check."""
    points: Optional[Tuple[BoundaryRay, BoundaryRay]] = start
    regions: Set[Cylinder] = set()
    for slot in slots:
        if isinstance(slot, USlot):
            u = inst.u_word(slot.index)
            if points is not None:
                points = (translate_ray(u, points[0]), translate_ray(u, points[1]))
            else:
                regions = {cylinder_image(u, r) for r in regions}
            continue
        plus_cyl, minus_cyl = z_cyl[(slot.index, 1)], z_cyl[(slot.index, -1)]
        if points is not None:
            if set(points) == set(z_ends[slot.index]):
                continue
            if any(cylinder_contains(c, p) for p in points for c in (plus_cyl, minus_cyl)):
                return False
            points = None
        elif not all(
            cylinder_disjoint(r, plus_cyl) and cylinder_disjoint(r, minus_cyl) for r in regions
        ):
            return False
        regions = {plus_cyl, minus_cyl}
    p1, p2 = start
    if points is not None:
        return points != start
    return all(not (cylinder_contains(r, p1) and cylinder_contains(r, p2)) for r in regions)


def _u_cylinder_keys(inst: GeneralBaumslagInstance) -> List[Tuple[int, int, int]]:
    if inst.relaxed:
        pairs = sorted({(i, j) for _, i, j in _adjacencies(inst) if i > 0})
    else:
        pairs = [(i, j) for i in range(1, len(inst.u_list) + 1) for j in range(1, len(inst.z_list) + 1)]
    return [(i, j, s) for i, j in pairs for s in (1, -1)]


def _z_indices(inst: GeneralBaumslagInstance) -> List[int]:
    if inst.relaxed:
        return sorted({s.index for s in inst.pattern if isinstance(s, ZSlot)})
    return list(range(1, len(inst.z_list) + 1))


def _disjointness_family(inst: GeneralBaumslagInstance, cert: PingPongCertificate) -> bool:
    z_idx = _z_indices(inst)
    family = [cert.z_cylinders[(j, s)] for j in z_idx for s in (1, -1)]
    if not pairwise_disjoint(family):
        return False
    if inst.relaxed:
        triples = {(k, i, j) for k, i, j in _adjacencies(inst) if i > 0 and k is not None}
    else:
        triples = {
            (k, i, j)
            for i in range(1, len(inst.u_list) + 1)
            for j in z_idx
            for k in z_idx
        }
    for k, i, j in triples:
        for s in (1, -1):
            image = cert.u_cylinders[(i, j, s)]
            if not all(cylinder_disjoint(image, cert.z_cylinders[(k, t)]) for t in (1, -1)):
                return False
    return True


def _c1_holds(z: FreeWord, sign: int, exponent: int, near: Cylinder, far: Cylinder) -> bool:
    moved = cylinder_image(power(z, sign * exponent), complement(far))
    return cylinder_subset(moved, near)


def certificate_checks(cert: PingPongCertificate, inst: GeneralBaumslagInstance) -> Dict[str, bool]:
    """Every condition ``verify_certificate`` needs, by name."""
    checks: Dict[str, bool] = {"N_positive": cert.N >= 1}
    try:
        slots = lemma_slots(inst)
    except PatternError:
        checks["pattern"] = False
        return checks
    checks["hypotheses"] = not check_general_hypotheses(inst)
    if cert.method == "direct":
        checks["direct_case"] = _is_direct_case(slots)
        checks["direct_argument"] = _is_direct_case(slots) and _direct_argument(inst, slots)[0]
        return checks

    z_idx = _z_indices(inst)
    needed_z = [(j, s) for j in z_idx for s in (1, -1)]
    needed_u = _u_cylinder_keys(inst)
    checks["cylinders_present"] = all(k in cert.z_cylinders for k in needed_z) and all(
        k in cert.u_cylinders for k in needed_u
    )
    if not checks["cylinders_present"] or cert.start is None:
        checks["start_points"] = cert.start is not None
        return checks

    z_ends = {j: endpoints(inst.z_word(j)) for j in z_idx}
    neighbourhoods = monotone = c1 = True
    for j in z_idx:
        plus, minus = z_ends[j]
        z = inst.z_word(j)
        for s, end in ((1, plus), (-1, minus)):
            near, far = cert.z_cylinders[(j, s)], cert.z_cylinders[(j, -s)]
            neighbourhoods &= cylinder_contains(near, end)
            monotone &= cylinder_subset(cylinder_image(power(z, s), near), near)
            c1 &= cert.N >= 1 and _c1_holds(z, s, cert.N, near, far)
    checks["neighbourhoods"] = neighbourhoods
    checks["monotone"] = monotone
    checks["C1"] = c1
    checks["C2"] = all(
        cylinder_subset(cylinder_image(inst.u_word(i), cert.z_cylinders[(j, s)]), cert.u_cylinders[(i, j, s)])
        for i, j, s in needed_u
    )
    checks["disjoint"] = _disjointness_family(inst, cert)
    checks["propagation"] = _propagate(inst, slots, cert.z_cylinders, z_ends, cert.start)
    return checks


def verify_certificate(cert: PingPongCertificate, inst: GeneralBaumslagInstance) -> bool:
    return all(certificate_checks(cert, inst).values())


def _minimal_exponent(
    inst: GeneralBaumslagInstance, z_cyl: Dict[Tuple[int, int], Cylinder], z_idx: Iterable[int], cap: int
) -> Optional[int]:
    best = 1
    for j in z_idx:
        z = inst.z_word(j)
        for s in (1, -1):
            near, far = z_cyl[(j, s)], z_cyl[(j, -s)]
            if not cylinder_subset(cylinder_image(power(z, s), near), near):
                return None
            t = next((t for t in range(1, cap + 1) if _c1_holds(z, s, t, near, far)), None)
            if t is None:
                return None
            best = max(best, t)
    return best


def certify_general(inst: GeneralBaumslagInstance) -> PingPongCertificate:
    """Search a cylinder depth and the least exponent ``N`` at that depth."""
    _require_general(inst)
    slots = lemma_slots(inst)
    if _is_direct_case(slots):
        ok, reason = _direct_argument(inst, slots)
        if not ok:
            raise HypothesisError(f"short pattern is trivial: {reason}", [reason])
        return PingPongCertificate(N=1, method="direct", notes=[reason])

    z_idx = _z_indices(inst)
    z_ends = {j: endpoints(inst.z_word(j)) for j in z_idx}
    u_keys = _u_cylinder_keys(inst)
    depth0 = 1 + max(
        [len(u) for u in inst.u_list] + [len(cyclic_decompose(inst.z_word(j)).conjugator) for j in z_idx]
    )
    candidates = _start_candidates(inst, slots)
    for depth in range(depth0, AppConfig.CYLINDER_DEPTH_CAP + 1):
        z_cyl = {}
        for j in z_idx:
            plus, minus = z_ends[j]
            z_cyl[(j, 1)] = cylinder_around(plus, depth)
            z_cyl[(j, -1)] = cylinder_around(minus, depth)
        u_cyl = {(i, j, s): cylinder_image(inst.u_word(i), z_cyl[(j, s)]) for i, j, s in u_keys}
        cert = PingPongCertificate(N=1, depth=depth, z_cylinders=z_cyl, u_cylinders=u_cyl)
        if not _disjointness_family(inst, cert):
            continue
        n_value = _minimal_exponent(inst, z_cyl, z_idx, AppConfig.EXPONENT_CAP)
        if n_value is None:
            continue
        start = next((p for p in candidates if _propagate(inst, slots, z_cyl, z_ends, p)), None)
        if start is None:
            continue
        cert.N = n_value
        cert.start = start
        cert.notes.append(f"cylinders of depth {depth}; least exponent satisfying C1 is {n_value}")
        logger.debug("certified %s with N=%s at depth %s", format_pattern(inst.pattern), n_value, depth)
        return cert
    raise CapExceededError(
        f"no certificate up to cylinder depth {AppConfig.CYLINDER_DEPTH_CAP} "
        f"and exponent {AppConfig.EXPONENT_CAP}"
    )


# ---------------------------------------------------------------------------
# Schottky pairs
# ---------------------------------------------------------------------------


def schottky_certificate(a: FreeWord, b: FreeWord) -> PingPongCertificate:
    """Certificate that alternating products of ``a^t``, ``b^s`` with ``|t|, |s| >= N`` are nontrivial.

    Equivalently ``<a^N, b^N>`` is free of rank two.
    """
    if commutes(a, b):
        raise HypothesisError(f"[a, b] = 1 for a={format_word(a)}, b={format_word(b)}")
    inst = GeneralBaumslagInstance(z_list=(a, b), u_list=(), pattern=(ZSlot(1), USlot(0), ZSlot(2)))
    cert = certify_general(inst)
    cert.start = None
    cert.notes.append("schottky pair: four pairwise disjoint cylinders")
    return cert


def verify_schottky(cert: PingPongCertificate, a: FreeWord, b: FreeWord) -> bool:
    if cert.N < 1:
        return False
    inst = GeneralBaumslagInstance(z_list=(a, b), u_list=(), pattern=(ZSlot(1), USlot(0), ZSlot(2)))
    family = [cert.z_cylinders.get((j, s)) for j in (1, 2) for s in (1, -1)]
    if any(c is None for c in family) or not pairwise_disjoint(family):
        return False
    for j in (1, 2):
        z = inst.z_word(j)
        plus, minus = endpoints(z)
        for s, end in ((1, plus), (-1, minus)):
            near, far = cert.z_cylinders[(j, s)], cert.z_cylinders[(j, -s)]
            if not cylinder_contains(near, end):
                return False
            if not cylinder_subset(cylinder_image(power(z, s), near), near):
                return False
            if not _c1_holds(z, s, cert.N, near, far):
                return False
    return True


def alternating_word(a: FreeWord, b: FreeWord, exponents: Sequence[int], start_with_a: bool = True) -> FreeWord:
    factors = [identity(a.rank)]
    bases = itertools.cycle((a, b) if start_with_a else (b, a))
    for base, e in zip(bases, exponents):
        factors.append(power(base, e))
    return multiply(*factors)
