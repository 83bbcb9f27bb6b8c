"""
Unit tests for the Arthur-type decision procedures.
"""

from fractions import Fraction

import pytest
from arthurkit.config import settings
from arthurkit.engine import arthur_decider
from arthurkit.engine.core_model import (
    ArthurParameter,
    EnhancedTempered,
    ExtendedSegment,
    LData,
    LSegment,
    supercuspidal_from_chains,
)
from arthurkit.engine.ems_ops import same_up_to_exchange
from arthurkit.engine.packet_engine import pi_of
from arthurkit.engine.symbols import parse_symbol
from arthurkit.enums import GroupKind, PrefilterVerdict
from arthurkit.exceptions import InvalidInputError, NotApplicableError
from arthurkit.models import LDataDocument
from arthurkit.services.serialization import ldata_from_document, load, parse_document, read_json

H = Fraction(1, 2)
SO31 = read_json(settings.fixtures_path / "members-so31.json")


def _trivial_sp(rho, *segments):
    return LData(
        tuple(LSegment(rho, Fraction(x), Fraction(y)) for x, y in segments),
        EnhancedTempered(GroupKind.SP, ((rho, 1, 1),)),
    )


def _ladder(sc, rho, *exponents):
    return LData(tuple(LSegment(rho, -x, -x) for x in exponents), sc.rep)


@pytest.fixture()
def load_pi(fixtures_dir):
    def _load(name):
        return ldata_from_document(load(fixtures_dir / name, LDataDocument))

    return _load


class TestGoodParity:
    def test_good(self, rho):
        assert arthur_decider.is_good_parity(_trivial_sp(rho, (-1, -1)))

    def test_half_integral_segment_on_sp(self, rho):
        pi = _trivial_sp(rho, (-H, -H))
        assert not arthur_decider.is_good_parity(pi)
        with pytest.raises(InvalidInputError):
            arthur_decider.is_arthur_type(pi)
        with pytest.raises(InvalidInputError):
            arthur_decider.is_arthur_type_v2(pi)


class TestRemovals:
    def test_upper_removal(self, rho, load_pi):
        pi = load_pi("ldata-sp-chain135.json")
        lower, spec = arthur_decider.pi_rho_minus_upper(pi, rho)
        assert spec.segment == LSegment(rho, -1, -1)
        assert spec.multiplicity == 1
        assert spec.lowered == (1, 1)
        assert spec.raised == (1, 3)
        assert lower.segments == (LSegment(rho, 0, -2),)

    def test_lower_removal(self, rho, load_pi):
        pi = load_pi("ldata-sp-chain135.json")
        lower, removed = arthur_decider.pi_rho_minus_lower(pi, rho)
        assert removed == [LSegment(rho, -1, -1)]
        assert lower.segments == (LSegment(rho, 0, -2),)

    def test_rebuild_along_upper_removal(self, rho, load_pi):
        pi = load_pi("ldata-sp-chain135.json")
        lower, spec = arthur_decider.pi_rho_minus_upper(pi, rho)
        members = arthur_decider.is_arthur_type(lower).members
        candidates = arthur_decider.candidate_filter_upper(members, spec)
        assert candidates
        assert all(c.psi().multiplicity(rho, 1, 1) >= 1 for c in candidates)
        assert any(pi_of(arthur_decider.e_rho_plus(c, spec)) == pi for c in candidates)

    def test_missing_cusp(self, rho, sym2, load_pi):
        with pytest.raises(InvalidInputError):
            arthur_decider.pi_rho_minus_upper(load_pi("ldata-sp-chain135.json"), sym2)

    def test_removal_needs_a_copy(self, rho):
        with pytest.raises(InvalidInputError):
            arthur_decider.RemovalSpec(rho, LSegment(rho, -1, -1), 0)


class TestTemperedBase:
    def test_circles(self, rho, sc_sp_chain135):
        ems = arthur_decider.tempered_ems(LData((), sc_sp_chain135.rep))
        assert ems.block(rho) == (
            ExtendedSegment(0, 0, 0, -1),
            ExtendedSegment(1, 1, 0, 1),
            ExtendedSegment(2, 2, 0, -1),
        )

    def test_non_tempered(self, rho):
        with pytest.raises(InvalidInputError):
            arthur_decider.tempered_ems(_trivial_sp(rho, (-1, -1)))


class TestPrefilter:
    def test_unpaired_exponent(self, rho):
        verdict, reason = arthur_decider.prefilter_not_arthur(_trivial_sp(rho, (-2, -2)))
        assert verdict == PrefilterVerdict.DEFINITELY_NOT
        assert "Ω" in reason

    def test_unknown_for_trivial(self, rho):
        verdict, reason = arthur_decider.prefilter_not_arthur(_trivial_sp(rho, (-1, -1)))
        assert verdict == PrefilterVerdict.UNKNOWN
        assert reason is None


class TestIsArthurType:
    def test_trivial_representation(self, rho):
        decision = arthur_decider.is_arthur_type(_trivial_sp(rho, (-1, -1)))
        assert decision.arthur
        assert decision.psis == (ArthurParameter.from_triples(GroupKind.SP, [(rho, 1, 3)]),)
        assert decision.psi_max == decision.psis[0]

    def test_prefilter_answers_first(self, rho):
        decision = arthur_decider.is_arthur_type(_trivial_sp(rho, (-2, -2)))
        assert not decision.arthur
        assert decision.witness_count == 0
        assert decision.psi_max is None

    def test_without_prefilter(self, rho):
        decision = arthur_decider.is_arthur_type(_trivial_sp(rho, (-2, -2)), use_prefilter=False)
        assert not decision.arthur

    def test_tempered_input(self, rho, sc_sp_chain135):
        decision = arthur_decider.is_arthur_type(LData((), sc_sp_chain135.rep))
        assert decision.arthur
        assert len(decision.psis) == 9

    @pytest.mark.parametrize(
        "name, expected",
        [("ldata-sp-chain135.json", True), ("ldata-so31-not-arthur.json", False), ("ldata-so31-arthur.json", True)],
    )
    def test_fixtures(self, load_pi, name, expected):
        pi = load_pi(name)
        assert arthur_decider.is_arthur_type(pi).arthur is expected
        assert arthur_decider.is_arthur_type_v2(pi).arthur is expected

    def test_witnesses_reproduce_pi(self, load_pi):
        pi = load_pi("ldata-so31-arthur.json")
        decision = arthur_decider.is_arthur_type(pi)
        assert all(pi_of(member) == pi for member in decision.members)

    def test_variant_finds_same_set(self, load_pi):
        pi = load_pi("ldata-sp-chain135.json")
        first = arthur_decider.is_arthur_type(pi)
        second = arthur_decider.is_arthur_type_v2(pi)
        assert set(first.psis) == set(second.psis)
        assert first.maximal == second.maximal

    def test_rho_order_accepts_unknown_names(self, load_pi):
        pi = load_pi("ldata-sp-chain135.json")
        assert arthur_decider.is_arthur_type(pi, rho_order=["nobody", "rho"]).arthur


class TestUpperPlacements:
    @pytest.fixture()
    def tempered_so31(self, load_pi):
        return load_pi(SO31["not_arthur"]).tempered

    def test_inserted_after_the_circles(self, rho, tempered_so31):
        pi = LData((LSegment(rho, Fraction(3, 2), Fraction(-5, 2)),), tempered_so31)
        lower, spec = arthur_decider.pi_rho_minus_upper(pi, rho)
        assert lower.is_tempered
        raised = arthur_decider.e_rho_plus(arthur_decider.tempered_ems(lower), spec)
        assert raised == parse_symbol("SO:{([1/2,1/2];0,+),([3/2,3/2];0,+),([5/2,3/2];1,+),([5/2,5/2];0,+)}@rho")
        assert pi_of(raised) == pi

    def test_inserted_ahead_of_everything(self, rho, tempered_so31):
        pi = LData((LSegment(rho, -H, -H), LSegment(rho, Fraction(3, 2), Fraction(-5, 2))), tempered_so31)
        lower, spec = arthur_decider.pi_rho_minus_upper(pi, rho)
        assert spec.segment == LSegment(rho, -H, -H)
        smaller = parse_symbol("SO:{([1/2,1/2];0,+),([3/2,3/2];0,+),([5/2,3/2];1,+),([5/2,5/2];0,+)}@rho")
        raised = arthur_decider.e_rho_plus(smaller, spec)
        assert raised == parse_symbol(SO31["members"][0])
        assert pi_of(raised) == pi

    def test_missing_target_rows(self, rho, load_pi, tempered_so31):
        _, spec = arthur_decider.pi_rho_minus_upper(load_pi(SO31["not_arthur"]), rho)
        with pytest.raises(NotApplicableError):
            arthur_decider.e_rho_plus(arthur_decider.tempered_ems(LData((), tempered_so31)), spec)

    def test_single_order_budget(self, load_pi, restore_settings):
        settings.placement_budget = 1
        pi = load_pi(SO31["arthur"])
        arthur_decider.clear_caches()
        try:
            assert arthur_decider.is_arthur_type(pi).arthur
        finally:
            arthur_decider.clear_caches()


class TestRejectedCandidates:
    @pytest.fixture()
    def lower(self):
        return ldata_from_document(parse_document(SO31["lower"], LDataDocument))

    @pytest.fixture()
    def members(self):
        return [parse_symbol(symbol) for symbol in SO31["members"]]

    def test_lower_has_four_members(self, lower, members):
        decision = arthur_decider.is_arthur_type(lower)
        assert decision.arthur
        assert decision.witness_count == len(members)
        for member in members:
            assert any(same_up_to_exchange(member, found) for found in decision.members)

    def test_every_member_rejected(self, load_pi, members):
        decision = arthur_decider.is_arthur_type(load_pi(SO31["not_arthur"]), use_prefilter=False)
        assert not decision.arthur
        assert len(decision.rejected) == len(members)
        for item in decision.rejected:
            assert SO31["missing"] in item.reason
            assert any(same_up_to_exchange(item.ems, member) for member in members)
            assert str(item).endswith(item.reason)

    def test_lower_variant_reports_candidates(self, load_pi):
        decision = arthur_decider.is_arthur_type_v2(load_pi(SO31["not_arthur"]))
        assert not decision.arthur
        assert decision.rejected
        assert all(item.reason for item in decision.rejected)

    def test_positive_decision_has_none(self, load_pi):
        assert arthur_decider.is_arthur_type(load_pi(SO31["arthur"])).rejected == ()


class TestConditionA:
    def test_double_top_fails(self, rho, sc_so_three_halves):
        pi = _ladder(sc_so_three_halves, rho, Fraction(3, 2), Fraction(3, 2))
        assert not arthur_decider.condition_A(pi, sc_so_three_halves)

    def test_full_ladder_holds(self, rho, sc_so_three_halves):
        pi = _ladder(sc_so_three_halves, rho, Fraction(3, 2), H)
        assert arthur_decider.ladder_multiplicities(pi, sc_so_three_halves) == {
            rho: {Fraction(3, 2): 1, H: 1}
        }
        assert arthur_decider.condition_A(pi, sc_so_three_halves)

    @pytest.mark.parametrize("x", [H, Fraction(3, 2)])
    def test_characters_in_range_are_arthur(self, rho, sc_so_three_halves, x):
        assert arthur_decider.is_arthur_type(_ladder(sc_so_three_halves, rho, x)).arthur

    def test_character_beyond_range(self, rho, sc_so_three_halves):
        assert not arthur_decider.is_arthur_type(_ladder(sc_so_three_halves, rho, Fraction(5, 2))).arthur

    def test_other_base(self, rho, sc_so_three_halves, sc_sp_chain135):
        pi = _ladder(sc_so_three_halves, rho, H)
        with pytest.raises(InvalidInputError):
            arthur_decider.ladder_multiplicities(pi, sc_sp_chain135)


class TestReduceToCritical:
    def test_larger_alpha_rejected(self, rho, sc_so_three_halves):
        sc_prime = supercuspidal_from_chains(GroupKind.ODD_SO, {rho: (Fraction(5, 2), -1)})
        witness = arthur_decider.tempered_ems(LData((), sc_prime.rep))
        with pytest.raises(InvalidInputError):
            arthur_decider.reduce_to_critical(witness, sc_so_three_halves, sc_prime, rho)
