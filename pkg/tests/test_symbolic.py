"""Symbolic products in a parameter n and their certified onsets."""
from __future__ import annotations

import pytest

from limitgroups.services.baumslag import USlot, ZSlot, eval_conjugated
from limitgroups.services.errors import HypothesisError, InvariantError, PatternError
from limitgroups.services.symbolic import (
    Fixed,
    Power,
    certified_onset,
    certify_conjugated,
    conjugated_items,
    evaluate,
    normalize,
    slot_exponents,
    to_instance,
)
from limitgroups.services.words import FreeWord, parse_word


def _w(text: str) -> FreeWord:
    return parse_word(text, 2)


class TestEvaluate:
    def test_fixed_and_power(self):
        items = [Fixed(_w("x2")), Power(_w("x1"), 2, -1)]
        assert evaluate(items, 3).letters == (2, 1, 1, 1, 1, 1)

    def test_empty_product(self):
        with pytest.raises(PatternError):
            evaluate([], 1)


class TestNormalize:
    def test_root_extraction(self):
        (item,) = normalize([Power(_w("x1^2"), 1, 1), Fixed(_w("x2"))])[:1]
        assert item == Power(_w("x1"), 2, 2)

    def test_inverse_root_flipped(self):
        assert normalize([Power(_w("x1^-1"), 1, 0)]) == (Power(_w("x1"), -1, 0),)

    def test_absorb_fixed_power(self):
        normal = normalize([Fixed(_w("x1")), Power(_w("x1"), 1, 0), Fixed(_w("x2"))])
        assert normal == (Power(_w("x1"), 1, 1), Fixed(_w("x2")))

    def test_merge_neighbours(self):
        normal = normalize([Power(_w("x1"), 1, 0), Power(_w("x1"), 2, 1), Fixed(_w("x2")), Fixed(_w("x2"))])
        assert normal == (Power(_w("x1"), 3, 1), Fixed(_w("x2^2")))

    def test_cancelling_powers_vanish(self):
        assert normalize([Power(_w("x1"), 1, 0), Power(_w("x1"), -1, 0)]) == ()

    def test_value_preserved(self):
        items = [Fixed(_w("x1*x2")), Power(_w("x2"), 1, -2), Fixed(_w("x2^3")), Power(_w("x1^2"), -1, 1)]
        normal = normalize(items)
        for n in range(-3, 8):
            assert evaluate(normal, n) == evaluate(items, n)


class TestInstances:
    def test_adjacent_powers_get_identity_slot(self):
        inst, powers = to_instance((Power(_w("x1"), 1, 0), Power(_w("x2"), -1, 2)))
        assert inst.pattern == (ZSlot(1, 1), USlot(0), ZSlot(2, -1))
        assert inst.relaxed
        assert slot_exponents(powers, 3) == [3, 1]


class TestCertifiedOnset:
    def test_identity_product(self):
        with pytest.raises(InvariantError):
            certified_onset([Power(_w("x1"), 1, 0), Power(_w("x1"), -1, 0)])

    def test_constant_product(self):
        result = certified_onset([Fixed(_w("x1")), Fixed(_w("x2"))])
        assert result.onset == 1
        assert result.certificate is None

    def test_onset_is_sound(self):
        items = [Fixed(_w("x2")), Power(_w("x1"), 1, 0), Fixed(_w("x2")), Power(_w("x1"), 2, -3)]
        result = certified_onset(items)
        for n in range(result.onset, result.onset + 25):
            assert not evaluate(items, n).is_trivial
        assert result.as_dict()["certificate"]["checks"]


class TestConjugatedPowers:
    def test_items_match_direct_evaluation(self):
        a, b = _w("x1"), _w("x2")
        ls, ws = [1, -2], [_w("x1"), _w("x2*x1"), _w("x1^-1")]
        items = conjugated_items(a, b, ls, ws)
        for k in range(0, 6):
            assert evaluate(items, k) == eval_conjugated(a, b, ls, ws, k)

    def test_certified_threshold(self):
        a, b = _w("x1"), _w("x2")
        ls, ws = [1], [_w("x1"), _w("x1")]
        result = certify_conjugated(a, b, ls, ws)
        assert result.onset >= 1
        for k in range(result.onset, result.onset + 15):
            assert not eval_conjugated(a, b, ls, ws, k).is_trivial

    def test_commuting_pair_rejected(self):
        with pytest.raises(HypothesisError):
            certify_conjugated(_w("x1"), _w("x1^3"), [1], [_w("x2"), _w("x2")])
