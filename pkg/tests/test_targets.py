"""Target groups: SL2 congruence quotients, SL2(Z), homomorphisms and free pairs."""
from __future__ import annotations

import itertools

import pytest

from limitgroups.services.construct import enumerate_reduced, hnn_of_free
from limitgroups.services.errors import (
    CapExceededError,
    HypothesisError,
    InvariantError,
    MissingImageError,
    RankMismatchError,
)
from limitgroups.services.surface import make_presentation
from limitgroups.services.targets import (
    HomInstance,
    Mat2Int,
    Mat2ModPk,
    SL2Int,
    SL2ModPk,
    TrivialGroup,
    _structured_commutant,
    closure,
    commutant,
    cyclic_closure,
    cyclic_tail_holds,
    free_hom,
    free_pair_check,
    free_word_hom,
    group_order,
    h_k_family,
    injectivity_on_ball,
    rho_gh,
    search_generating_pair,
    shortest_relation,
    sl2_modpk_ops,
    surjectivity_mod,
)
from limitgroups.services.words import free_presentation, generator, parse_word, words_up_to


@pytest.fixture(scope="module")
def sl2_5():
    return SL2ModPk(5, 1)


def _unipotents(group):
    return group.matrix(1, 1, 0, 1), group.matrix(1, 0, 1, 1)


# ---------------------------------------------------------------------------
# Groups
# ---------------------------------------------------------------------------


class TestMatrices:
    def test_reduction_and_inverse(self):
        m = Mat2ModPk(6, 1, 5, 1, 5, 1)
        assert m.entries == (1, 1, 0, 1)
        assert (m * m.inverse()).entries == (1, 0, 0, 1)

    def test_determinant_checked(self):
        with pytest.raises(ValueError):
            Mat2ModPk(1, 1, 1, 1, 5, 1)
        with pytest.raises(ValueError):
            Mat2Int(2, 0, 0, 1)

    def test_integer_reduction(self):
        assert Mat2Int(1, 7, 0, 1).reduce_mod(5, 1).entries == (1, 2, 0, 1)


class TestSL2ModPk:
    def test_orders(self):
        assert group_order(3, 1) == 24
        assert group_order(5, 2) == 15000
        group = sl2_modpk_ops(3, 1)
        assert group.name == "SL2(Z/3)"
        assert len(group.elements()) == 24

    def test_group_axioms(self):
        group = SL2ModPk(3, 1)
        elements = group.elements()[:8]
        assert group.axiom_failures(itertools.product(elements, repeat=3)) == 0

    def test_power(self, sl2_5):
        a, _ = _unipotents(sl2_5)
        assert sl2_5.is_identity(sl2_5.power(a, 5))
        assert sl2_5.power(a, -1) == a.inverse()

    def test_bad_parameters(self):
        with pytest.raises(ValueError):
            SL2ModPk(4, 1)
        with pytest.raises(ValueError):
            SL2ModPk(5, 0)
        with pytest.raises(CapExceededError):
            SL2ModPk(2, 10)

    def test_integer_group_not_enumerable(self):
        with pytest.raises(CapExceededError):
            SL2Int().elements()


class TestSubgroups:
    def test_commutant_of_unipotent(self):
        group = SL2ModPk(3, 1)
        a = group.matrix(1, 1, 0, 1)
        assert len(commutant([a], group)) == 6

    def test_structured_matches_enumeration(self, sl2_5):
        elements = sl2_5.elements()
        for m in elements[::7]:
            if m.b == 0 and m.c == 0 and m.a == m.d:
                continue
            brute = {x for x in elements if sl2_5.commutes(x, m)}
            assert set(_structured_commutant(sl2_5, m)) == brute

    def test_scalar_needs_enumeration(self, sl2_5):
        with pytest.raises(CapExceededError):
            _structured_commutant(sl2_5, sl2_5.matrix(4, 0, 0, 4))

    def test_cyclic_closure(self, sl2_5):
        a, _ = _unipotents(sl2_5)
        powers = cyclic_closure(a, sl2_5)
        assert len(powers) == 5
        assert powers[0] == sl2_5.identity()
        assert cyclic_tail_holds(a, sl2_5, 3)

    def test_closure(self, sl2_5):
        a, b = _unipotents(sl2_5)
        assert len(closure([a], sl2_5)) == 5
        assert len(closure([a, b], sl2_5)) == 120
        assert surjectivity_mod(sl2_5, [a, b])
        assert not surjectivity_mod(sl2_5, [a])

    @pytest.mark.slow
    def test_commutant_beyond_enumeration(self):
        group = SL2ModPk(5, 4)
        a = group.matrix(1, 1, 0, 1)
        found = commutant([a], group)
        assert len(found) == 2 * 625
        assert all(group.commutes(x, a) for x in found)


# ---------------------------------------------------------------------------
# Homomorphisms
# ---------------------------------------------------------------------------


class TestHomInstances:
    def test_free_hom_evaluates(self, sl2_5):
        a, b = _unipotents(sl2_5)
        phi = free_hom(2, [a, b], sl2_5)
        assert phi.evaluate(parse_word("x1*x2^-1", 2)) == a * b.inverse()
        assert phi.evaluate(parse_word("[x1,x2]", 2)).entries == (3, 4, 1, 0)

    def test_relator_failure(self, sl2_5, comm_double):
        a, b = _unipotents(sl2_5)
        with pytest.raises(InvariantError):
            HomInstance(comm_double.presentation, sl2_5, (a, b, b, a))

    def test_missing_images(self, sl2_5, comm_double):
        a, b = _unipotents(sl2_5)
        with pytest.raises(MissingImageError):
            HomInstance(comm_double.presentation, sl2_5, (a, b))

    def test_free_word_hom(self):
        hom = free_word_hom(free_presentation(2), [generator(1, 2), generator(1, 2)], 2)
        assert hom.group.is_identity(hom.evaluate(parse_word("x1*x2^-1", 2)))
        with pytest.raises(RankMismatchError):
            free_word_hom(free_presentation(2), [generator(1, 3), generator(1, 2)], 2)


class TestHkFamily:
    def test_every_power_of_phi_c(self, sl2_5, comm_double):
        a, b = _unipotents(sl2_5)
        phi = free_hom(2, [a, b], sl2_5)
        ks = cyclic_closure(phi.evaluate(comm_double.edge), sl2_5)
        assert len(ks) > 1
        for k in ks:
            hom = h_k_family(comm_double, phi, k)
            assert len(hom.image_closure()) == 120

    def test_identity_k_kills_the_fold_kernel(self, sl2_5, comm_double):
        a, b = _unipotents(sl2_5)
        phi = free_hom(2, [a, b], sl2_5)
        hom = h_k_family(comm_double, phi, sl2_5.identity())
        killed = injectivity_on_ball(hom, [comm_double.presentation.word("x1*x1'^-1")])
        assert len(killed) == 1

    def test_non_commuting_k(self, sl2_5, comm_double):
        a, b = _unipotents(sl2_5)
        phi = free_hom(2, [a, b], sl2_5)
        with pytest.raises(HypothesisError):
            h_k_family(comm_double, phi, a)

    def test_hnn(self, sl2_5):
        spec = hnn_of_free(2, parse_word("[x1,x2]", 2))
        a, b = _unipotents(sl2_5)
        phi = free_hom(2, [a, b], sl2_5)
        k = phi.evaluate(spec.edge)
        hom = h_k_family(spec, phi, k)
        assert hom.images[2] == k

    def test_rank_mismatch(self, sl2_5, comm_double):
        a, b = _unipotents(sl2_5)
        phi = free_hom(3, [a, b, a], sl2_5)
        with pytest.raises(RankMismatchError):
            h_k_family(comm_double, phi, sl2_5.identity())

    @pytest.mark.slow
    def test_congruence_quotient_mod_25(self, comm_double):
        group = SL2ModPk(5, 2)
        forms = [f.word(comm_double) for f in enumerate_reduced(comm_double, 2, 4)]

        def accept(a, b) -> bool:
            phi = free_hom(2, [a, b], group)
            return any(
                not injectivity_on_ball(h_k_family(comm_double, phi, k), forms)
                for k in cyclic_closure(phi.evaluate(comm_double.edge), group)
            )

        a, b = search_generating_pair(group, 20240601, accept)
        phi = free_hom(2, [a, b], group)
        for k in cyclic_closure(phi.evaluate(comm_double.edge), group):
            assert len(h_k_family(comm_double, phi, k).image_closure()) == group.order


class TestSurfaceHom:
    def test_rho_with_powers(self, sl2_5):
        pres = make_presentation(1)
        a, b = _unipotents(sl2_5)
        y = free_hom(3, [a, b, sl2_5.identity()], sl2_5).evaluate(pres.y)
        hom = rho_gh(pres, [a, b, sl2_5.identity()], sl2_5.power(y, 2), sl2_5.identity(), sl2_5)
        assert hom.evaluate(pres.gen("b")) == sl2_5.power(y, 2)
        assert hom.evaluate(pres.gen("c1")) == sl2_5.power(y, 2) * a * sl2_5.power(y, -2)

    def test_rho_hypotheses(self, sl2_5):
        pres = make_presentation(1)
        a, b = _unipotents(sl2_5)
        with pytest.raises(HypothesisError):
            rho_gh(pres, [a, b, sl2_5.identity()], a, sl2_5.identity(), sl2_5)
        with pytest.raises(MissingImageError):
            rho_gh(pres, [a, b], a, a, sl2_5)


class TestInjectivity:
    def test_trivial_group_kills_everything(self):
        hom = free_hom(2, [(), ()], TrivialGroup())
        words = words_up_to(2, 2)
        assert injectivity_on_ball(hom, words) == words

    def test_sanov_pair_is_injective(self):
        hom = free_hom(2, [Mat2Int(1, 2, 0, 1), Mat2Int(1, 0, 2, 1)], SL2Int())
        assert injectivity_on_ball(hom, words_up_to(2, 4)) == []


class TestFreePairs:
    def test_sanov_pair(self):
        assert free_pair_check(Mat2Int(1, 2, 0, 1), Mat2Int(1, 0, 2, 1), 8)

    def test_equal_pair(self):
        a = Mat2Int(1, 1, 0, 1)
        assert shortest_relation(a, a, 6) == 2
        assert not free_pair_check(a, a, 6)

    def test_cap(self):
        a = Mat2Int(1, 2, 0, 1)
        with pytest.raises(CapExceededError):
            shortest_relation(a, a, 13)


class TestGeneratingPairs:
    def test_search_is_deterministic(self, sl2_5):
        first = search_generating_pair(sl2_5, seed=7)
        assert first == search_generating_pair(sl2_5, seed=7)
        assert surjectivity_mod(sl2_5, list(first))

    def test_rejecting_everything(self, sl2_5):
        with pytest.raises(CapExceededError):
            search_generating_pair(sl2_5, seed=7, accept=lambda a, b: False, attempts=3)
