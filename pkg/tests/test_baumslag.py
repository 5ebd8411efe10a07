"""Baumslag words: hypotheses, exhaustive sweeps and ping-pong certificates."""
from __future__ import annotations

import dataclasses

import pytest

from limitgroups.services.baumslag import (
    BaumslagInstance,
    GeneralBaumslagInstance,
    USlot,
    ZSlot,
    alternating_word,
    certificate_checks,
    certify_basic,
    certify_general,
    check_basic_hypotheses,
    check_general_hypotheses,
    empirical_min_N,
    empirical_min_general,
    eval_basic,
    eval_conjugated,
    eval_general,
    format_pattern,
    instance_from_dict,
    lemma_slots,
    parse_pattern,
    schottky_certificate,
    verify_basic,
    verify_certificate,
    verify_schottky,
)
from limitgroups.services.errors import HypothesisError, PatternError, TrivialWordError
from limitgroups.services.words import FreeWord, parse_word


def _w(text: str) -> FreeWord:
    return parse_word(text, 2)


def _basic(z: str = "x1", a=("x2", "x2")) -> BaumslagInstance:
    return BaumslagInstance(coefficients=tuple(_w(t) for t in a), z=_w(z))


def _general(pattern: str, z=("x1", "x2"), u=("x1*x2",), relaxed: bool = False) -> GeneralBaumslagInstance:
    return GeneralBaumslagInstance(
        z_list=tuple(_w(t) for t in z),
        u_list=tuple(_w(t) for t in u),
        pattern=pattern,
        relaxed=relaxed,
    )


def _sample_exponents(rng, count: int, low: int, spread: int):
    values = rng.integers(low, low + spread + 1, size=count)
    signs = rng.choice([1, -1], size=count)
    return tuple(int(v) * int(s) for v, s in zip(values, signs))


# ---------------------------------------------------------------------------
# Patterns and instance files
# ---------------------------------------------------------------------------


class TestPatterns:
    def test_parse_and_format(self):
        slots = parse_pattern("u1 z1 u1 z2^-1")
        assert slots == (USlot(1), ZSlot(1), USlot(1), ZSlot(2, -1))
        assert format_pattern(slots) == "u1 z1 u1 z2^-1"

    @pytest.mark.parametrize("text", ["u1 q2", "u1^-1 z1", "z"])
    def test_parse_errors(self, text):
        with pytest.raises(PatternError):
            parse_pattern(text)

    def test_lemma_slots_pad_and_reverse(self):
        inst = _general("u1 z1", z=("x1",), u=("x2",))
        assert lemma_slots(inst) == [USlot(0), ZSlot(1), USlot(1)]

    def test_interior_identity_between_equal_indices(self):
        inst = _general("z1 u0 z1", z=("x1",), u=())
        with pytest.raises(PatternError):
            lemma_slots(inst)

    def test_non_alternating(self):
        with pytest.raises(PatternError):
            lemma_slots(_general("u1 u1 z1"))

    def test_unknown_slot_index(self):
        with pytest.raises(PatternError):
            lemma_slots(_general("u2 z1"))
        with pytest.raises(PatternError):
            lemma_slots(_general("u1 z3"))

    def test_instance_from_dict(self):
        basic = instance_from_dict({"z": "x1", "a": ["x2", "x2^-1*x1"]})
        assert isinstance(basic, BaumslagInstance)
        assert basic.rank == 2 and basic.n == 1
        general = instance_from_dict({"z": ["x1", "x2"], "u": ["x1*x2"], "pattern": "u1 z1 u1 z2", "relaxed": True})
        assert isinstance(general, GeneralBaumslagInstance)
        assert general.relaxed
        assert general.as_dict()["pattern"] == "u1 z1 u1 z2"

    def test_instance_from_dict_missing_keys(self):
        with pytest.raises(PatternError):
            instance_from_dict({"z": ["x1"]})

    def test_basic_needs_two_coefficients(self):
        with pytest.raises(PatternError):
            BaumslagInstance(coefficients=(_w("x2"),), z=_w("x1"))


# ---------------------------------------------------------------------------
# Basic words
# ---------------------------------------------------------------------------


class TestBasic:
    def test_eval(self):
        word = eval_basic(_basic(), (2, -1))
        assert word.letters == (2, 1, 1, 2, -1)

    def test_eval_wrong_arity(self):
        with pytest.raises(PatternError):
            eval_basic(_basic(), (1,))

    def test_hypotheses(self):
        assert check_basic_hypotheses(_basic()) == []
        bad = _basic(a=("x2", "x1^2"))
        assert len(check_basic_hypotheses(bad)) == 1

    def test_commuting_coefficient_rejected(self):
        bad = _basic(a=("x2", "x1"))
        with pytest.raises(HypothesisError) as excinfo:
            certify_basic(bad)
        assert excinfo.value.violations
        with pytest.raises(HypothesisError):
            empirical_min_N(bad, window=1, cap=3)

    def test_certified_exponent(self):
        inst = _basic()
        cert = certify_basic(inst)
        assert cert.N == 3
        assert verify_basic(cert, inst)

    def test_larger_power_needs_smaller_exponent(self):
        cert = certify_basic(_basic(z="x1^3"))
        assert cert.N == 1

    def test_empirical_never_exceeds_certified(self):
        inst = _basic()
        empirical = empirical_min_N(inst, window=1, cap=4)
        assert empirical is not None
        assert empirical <= certify_basic(inst).N

    def test_soundness_sampling(self, rng):
        inst = _basic(a=("x2", "x1*x2", "x2^-1"))
        cert = certify_basic(inst)
        for _ in range(300):
            exps = _sample_exponents(rng, inst.n + 1, cert.N, 20)
            assert not eval_basic(inst, exps).is_trivial

    def test_lowered_exponent_rejected(self):
        inst = _basic()
        cert = certify_basic(inst)
        lowered = dataclasses.replace(cert, N=cert.N - 1)
        assert not verify_basic(lowered, inst)

    def test_overlapping_cylinders_rejected(self):
        inst = _basic()
        cert = certify_basic(inst)
        tampered = dict(cert.z_cylinders)
        tampered[(1, -1)] = tampered[(1, 1)]
        assert not verify_basic(dataclasses.replace(cert, z_cylinders=tampered), inst)


# ---------------------------------------------------------------------------
# Conjugated powers
# ---------------------------------------------------------------------------


class TestConjugated:
    def test_eval(self):
        word = eval_conjugated(_w("x1"), _w("x2"), [1], [_w("x1"), _w("x1")], 1)
        assert word.letters == (1, -2, 1, 2, 1)

    def test_commuting_pair(self):
        with pytest.raises(HypothesisError):
            eval_conjugated(_w("x1"), _w("x1^2"), [1], [_w("x2"), _w("x2")], 1)

    def test_bad_inputs(self):
        with pytest.raises(TrivialWordError):
            eval_conjugated(_w("x1"), _w("x2"), [1], [_w("1"), _w("x1")], 1)
        with pytest.raises(PatternError):
            eval_conjugated(_w("x1"), _w("x2"), [1], [_w("x1")], 1)
        with pytest.raises(PatternError):
            eval_conjugated(_w("x1"), _w("x2"), [0], [_w("x1"), _w("x1")], 1)


# ---------------------------------------------------------------------------
# General patterns
# ---------------------------------------------------------------------------


class TestGeneral:
    def test_eval(self):
        inst = _general("u1 z1 u1 z2")
        assert eval_general(inst, (2, 2)).letters == (1, 2, 1, 1, 1, 2, 2, 2)

    def test_eval_signed_slot(self):
        inst = _general("u1 z2^-1", u=("x1",))
        assert eval_general(inst, (3,)).letters == (1, -2, -2, -2)

    def test_full_hypotheses_hold(self):
        assert check_general_hypotheses(_general("u1 z1 u1 z2")) == []

    def test_relaxed_versus_full(self):
        full = _general("u1 z2", u=("x1",))
        relaxed = _general("u1 z2", u=("x1",), relaxed=True)
        assert check_general_hypotheses(full)
        assert check_general_hypotheses(relaxed) == []
        with pytest.raises(HypothesisError):
            certify_general(full)

    def test_certificate_and_checks(self):
        inst = _general("u1 z1 u1 z2")
        cert = certify_general(inst)
        assert cert.method == "ping-pong"
        checks = certificate_checks(cert, inst)
        assert all(checks.values()), checks
        data = cert.as_dict(inst)
        assert data["N"] == cert.N
        assert data["cylinders"]

    def test_general_soundness_sampling(self, rng):
        inst = _general("u1 z1 u1 z2")
        cert = certify_general(inst)
        for _ in range(300):
            assert not eval_general(inst, _sample_exponents(rng, 2, cert.N, 20)).is_trivial

    def test_empirical_general(self):
        inst = _general("u1 z1 u1 z2")
        found = empirical_min_general(inst, window=0, cap=3)
        assert found is not None
        assert found <= certify_general(inst).N

    def test_direct_case(self):
        inst = _general("z1", z=("x1",), u=())
        cert = certify_general(inst)
        assert cert.method == "direct"
        assert cert.N == 1
        assert verify_certificate(cert, inst)

    def test_bad_window(self):
        with pytest.raises(ValueError):
            empirical_min_general(_general("u1 z1 u1 z2"), window=-1, cap=3)


@pytest.mark.slow
@pytest.mark.parametrize(
    "inst",
    [
        _basic(a=("x2", "x2", "x2")),
        _basic(z="x1^3", a=("x2", "x2")),
        _basic(a=("x2", "x1*x2", "x2^-1")),
        _general("u1 z1 u1 z2"),
        _general("u1 z2", u=("x1",), relaxed=True),
    ],
)
def test_certificates_survive_ten_thousand_samples(inst, rng):
    if isinstance(inst, BaumslagInstance):
        cert, slots = certify_basic(inst), inst.n + 1
        evaluate = lambda t: eval_basic(inst, t)  # noqa: E731
        verify = verify_basic
    else:
        cert, slots = certify_general(inst), inst.z_slot_count
        evaluate = lambda t: eval_general(inst, t)  # noqa: E731
        verify = verify_certificate
    assert verify(cert, inst)
    assert not verify(dataclasses.replace(cert, N=cert.N - 1), inst)
    for _ in range(10_000):
        assert not evaluate(_sample_exponents(rng, slots, cert.N, 30)).is_trivial


# ---------------------------------------------------------------------------
# Schottky pairs
# ---------------------------------------------------------------------------


class TestSchottky:
    def test_generators(self):
        a, b = _w("x1"), _w("x2")
        cert = schottky_certificate(a, b)
        assert cert.N == 1
        assert verify_schottky(cert, a, b)

    def test_alternating_words(self, rng):
        a, b = _w("x1*x2"), _w("x2^2*x1^-1")
        cert = schottky_certificate(a, b)
        assert verify_schottky(cert, a, b)
        for _ in range(200):
            count = int(rng.integers(1, 6))
            exps = _sample_exponents(rng, count, cert.N, 5)
            assert not alternating_word(a, b, exps).is_trivial

    def test_commuting_pair(self):
        with pytest.raises(HypothesisError):
            schottky_certificate(_w("x1"), _w("x1^-2"))

    def test_lowered_exponent(self):
        a, b = _w("x1"), _w("x2")
        cert = schottky_certificate(a, b)
        assert not verify_schottky(dataclasses.replace(cert, N=0), a, b)
