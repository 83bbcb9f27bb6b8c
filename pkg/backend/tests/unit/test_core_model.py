"""
Unit tests for the engine value types: cusps, parameters, L-data and supercuspidal data.
"""

from collections import Counter
from fractions import Fraction

import pytest
from arthurkit.engine.core_model import (
    ArthurParameter,
    ArthurSummand,
    CuspLabel,
    EnhancedTempered,
    ExtendedMultiSegment,
    ExtendedSegment,
    GroupType,
    LData,
    LSegment,
    SpehSymbol,
    SupercuspidalData,
    classify_parity,
    decompose_to_gp,
    diagonal_restriction,
    is_supercuspidal,
    omega,
    row_sign,
    segment_multiset,
    supercuspidal_from_chains,
    support_exponents,
)
from arthurkit.enums import Duality, GroupKind, ParityClass
from arthurkit.exceptions import InvalidInputError

SP = GroupKind.SP
SO = GroupKind.ODD_SO


def tempered(kind, entries):
    return EnhancedTempered.build(kind, entries)


# ---------------------------------------------------------------------------
# Groups and cusps
# ---------------------------------------------------------------------------


class TestGroupType:
    def test_sp_from_odd_dimension(self):
        group = GroupType.from_dual_dim(SP, 5)
        assert group.rank == 2
        assert group.label == "Sp(4)"

    def test_so_from_even_dimension(self):
        assert GroupType.from_dual_dim(SO, 4).label == "SO(5)"

    def test_wrong_parity(self):
        with pytest.raises(InvalidInputError):
            GroupType.from_dual_dim(SP, 4)
        with pytest.raises(InvalidInputError):
            GroupType.from_dual_dim(SO, 3)


class TestCuspLabel:
    def test_equality_by_name(self, rho):
        assert CuspLabel("rho", 2, Duality.SYMPLECTIC) == rho
        assert hash(CuspLabel("rho", 2, Duality.SYMPLECTIC)) == hash(rho)
        assert not CuspLabel("rho", 2, Duality.SYMPLECTIC).same_as(rho)

    def test_epsilon(self, rho, sym2):
        assert rho.epsilon(SP) == 0
        assert rho.epsilon(SO) == Fraction(1, 2)
        assert sym2.epsilon(SP) == Fraction(1, 2)
        assert sym2.epsilon(SO) == 0

    def test_non_self_dual(self):
        tau = CuspLabel("tau", 1, Duality.NON_SELF_DUAL)
        assert tau.dual().name == "tau~"
        assert tau.dual().dual().name == "tau"
        with pytest.raises(InvalidInputError):
            tau.epsilon(SP)

    def test_invalid_labels(self):
        with pytest.raises(InvalidInputError):
            CuspLabel("a b")
        with pytest.raises(InvalidInputError):
            CuspLabel("odd", 3, Duality.SYMPLECTIC)


# ---------------------------------------------------------------------------
# Arthur parameters
# ---------------------------------------------------------------------------


class TestArthurParameter:
    def test_twist_range(self, rho):
        with pytest.raises(InvalidInputError):
            ArthurSummand(rho, 1, 1, Fraction(1, 2))

    def test_dimension_parity(self, rho):
        with pytest.raises(InvalidInputError):
            ArthurParameter.from_triples(SP, [(rho, 2, 1)])

    def test_good_parity(self, rho):
        psi = ArthurParameter.from_triples(SP, [(rho, 1, 1), (rho, 3, 1), (rho, 1, 3)])
        assert psi.dual_dim == 7
        assert psi.group.rank == 3
        assert psi.is_good_parity()
        assert psi.multiplicity(rho, 1, 3) == 1

    def test_bad_parity(self, rho):
        psi = ArthurParameter.from_triples(SP, [(rho, 2, 1), (rho, 2, 1), (rho, 1, 1)])
        assert not psi.is_good_parity()
        assert psi.multiplicity(rho, 2, 1) == 2

    def test_str_groups_copies(self, rho):
        psi = ArthurParameter.from_triples(SP, [(rho, 2, 1), (rho, 2, 1), (rho, 1, 1)])
        assert str(psi) == "rho⊗S1⊗S1 + 2·rho⊗S2⊗S1"

    def test_diagonal_restriction(self, rho):
        psi = ArthurParameter.from_triples(SO, [(rho, 2, 2)])
        assert diagonal_restriction(psi) == Counter({(rho, 1): 1, (rho, 3): 1})


class TestDecomposeToGoodParity:
    def test_positive_twist_pairs(self, rho):
        psi = ArthurParameter(
            SP,
            (
                ArthurSummand(rho, 1, 1, Fraction(1, 4)),
                ArthurSummand(rho, 1, 1, Fraction(-1, 4)),
                ArthurSummand(rho, 1, 1),
            ),
        )
        result = decompose_to_gp(psi)
        assert result.speh_pos == (SpehSymbol(rho, 1, 1, Fraction(1, 4)),)
        assert result.speh_ngp == ()
        assert result.psi_gp == ArthurParameter.from_triples(SP, [(rho, 1, 1)])

    def test_bad_parity_pairs(self, rho):
        psi = ArthurParameter.from_triples(SP, [(rho, 2, 1), (rho, 2, 1), (rho, 1, 1)])
        result = decompose_to_gp(psi)
        assert result.speh_ngp == (SpehSymbol(rho, 2, 1),)
        assert result.psi_gp.is_good_parity()

    def test_unpaired_twist(self, rho):
        psi = ArthurParameter(
            SP, (ArthurSummand(rho, 1, 1, Fraction(1, 4)), ArthurSummand(rho, 1, 1, Fraction(1, 4)), ArthurSummand(rho, 1, 1))
        )
        with pytest.raises(InvalidInputError):
            decompose_to_gp(psi)

    def test_speh_pieces(self, rho):
        assert SpehSymbol(rho, 2, 3).pieces() == [(Fraction(-1), 2), (Fraction(0), 2), (Fraction(1), 2)]


# ---------------------------------------------------------------------------
# Tempered data and Langlands data
# ---------------------------------------------------------------------------


class TestEnhancedTempered:
    def test_sign_product(self, rho):
        with pytest.raises(InvalidInputError):
            tempered(SP, {(rho, 1): (1, -1)})

    def test_bad_parity_needs_even_multiplicity(self, rho):
        with pytest.raises(InvalidInputError):
            tempered(SP, {(rho, 1): (1, 1), (rho, 2): (1, 0)})
        rep = tempered(SP, {(rho, 1): (1, 1), (rho, 2): (2, 0)})
        assert rep.mult(rho, 2) == 2

    def test_bad_parity_carries_no_sign(self, rho):
        with pytest.raises(InvalidInputError):
            tempered(SP, {(rho, 1): (1, 1), (rho, 2): (2, 1)})

    def test_dual_pairs(self, rho):
        tau = CuspLabel("tau", 1, Duality.NON_SELF_DUAL)
        rep = tempered(SP, {(rho, 1): (1, 1), (tau, 1): (1, 0), (tau.dual(), 1): (1, 0)})
        assert rep.dual_dim == 3
        with pytest.raises(InvalidInputError):
            tempered(SP, {(rho, 1): (1, 1), (tau, 1): (2, 0)})

    def test_pretty(self, rho):
        rep = tempered(SP, {(rho, 1): (1, 1)})
        assert rep.pretty() == "π(0⁺)"
        assert rep.pretty(ascii_only=True) == "π(0+)"

    def test_entries_round_trip(self, sc_sp_chain135):
        rep = sc_sp_chain135.rep
        assert EnhancedTempered.build(SP, rep.entries()) == rep


class TestLData:
    def test_segment_shape(self, rho):
        segment = LSegment(rho, 0, -2)
        assert segment.length == 3
        assert segment.center == -1
        assert LSegment(rho, 0, 1).is_empty
        with pytest.raises(InvalidInputError):
            LSegment(rho, 0, 2)

    def test_negative_centers_required(self, rho):
        base = tempered(SP, {(rho, 1): (1, 1)})
        with pytest.raises(InvalidInputError):
            LData((LSegment(rho, 1, -1),), base)

    def test_pretty_orders_segments(self, rho, sc_sp_chain135):
        pi = LData((LSegment(rho, 0, -2), LSegment(rho, -1, -1)), sc_sp_chain135.rep)
        assert str(pi) == "L(Δ[-1,-1], Δ[0,-2]; π(0⁻, 1⁺, 2⁻))"
        assert pi.pretty(ascii_only=True) == "L(D[-1,-1], D[0,-2]; pi(0-, 1+, 2-))"
        assert pi.group.label == "Sp(16)"

    def test_add_segments(self, rho, sc_sp_chain135):
        pi = LData((), sc_sp_chain135.rep).add_segments([LSegment(rho, -1, -1)])
        assert not pi.is_tempered
        assert pi.rho_segments(rho) == [LSegment(rho, -1, -1)]

    def test_omega(self, rho, sc_sp_chain135):
        pi = LData((LSegment(rho, -1, -1), LSegment(rho, 0, -2)), sc_sp_chain135.rep)
        assert omega(pi)[rho] == Counter({-1: 1, 1: 2, 0: 2, 2: 2})

    def test_segment_multiset(self):
        assert segment_multiset(Fraction(3, 2), Fraction(-1, 2)) == Counter(
            {Fraction(3, 2): 1, Fraction(1, 2): 1, Fraction(-1, 2): 1}
        )


# ---------------------------------------------------------------------------
# Supercuspidal data and parity
# ---------------------------------------------------------------------------


class TestSupercuspidal:
    def test_alpha(self, rho, sc_so_three_halves, sc_sp_chain135):
        assert sc_so_three_halves.alpha(rho) == Fraction(3, 2)
        assert sc_sp_chain135.alpha(rho) == 3

    def test_symplectic_filler(self, sc_so_three_halves):
        filler = sc_so_three_halves.cusp("sym2")
        assert filler is not None
        assert filler.dim == 2
        assert filler.duality == Duality.SYMPLECTIC
        assert sc_so_three_halves.kind == SO

    def test_sp_filler_fixes_dimension(self, rho):
        sc = supercuspidal_from_chains(SP, {rho: (Fraction(2), 1)})
        assert sc.cusp("chi") is not None
        assert sc.group.kind == SP

    def test_sp_alpha_one_needs_no_filler(self, rho):
        sc = supercuspidal_from_chains(SP, {rho: (Fraction(1), 1)})
        assert sc.rep.rhos() == [rho]
        assert sc.alpha(rho) == 1

    def test_alpha_off_lattice(self, rho):
        with pytest.raises(InvalidInputError):
            supercuspidal_from_chains(SO, {rho: (Fraction(1), 1)})

    def test_s2_sign_must_be_negative(self, rho):
        with pytest.raises(InvalidInputError):
            supercuspidal_from_chains(SO, {rho: (Fraction(3, 2), 1)})

    def test_criterion(self, rho, sc_sp_chain135):
        assert is_supercuspidal(sc_sp_chain135.rep)
        positive_s2 = tempered(SO, {(rho, 2): (1, 1)})
        assert not is_supercuspidal(positive_s2)
        with pytest.raises(InvalidInputError):
            SupercuspidalData(positive_s2)


class TestClassifyParity:
    def test_good_and_critical(self, rho, sc_so_three_halves):
        pi = LData((LSegment(rho, Fraction(-3, 2), Fraction(-3, 2)),), sc_so_three_halves.rep)
        assert support_exponents(pi, sc_so_three_halves) == {rho: [Fraction(3, 2)]}
        verdict = classify_parity(pi, sc_so_three_halves)
        assert verdict.parity == ParityClass.GOOD
        assert verdict.critical

    def test_bad(self, rho, sc_so_three_halves):
        pi = LData((LSegment(rho, -1, -1),), sc_so_three_halves.rep)
        assert classify_parity(pi, sc_so_three_halves).parity == ParityClass.BAD

    def test_null(self, rho, sc_so_three_halves):
        pi = LData((LSegment(rho, Fraction(-1, 3), Fraction(-1, 3)),), sc_so_three_halves.rep)
        assert classify_parity(pi, sc_so_three_halves).parity == ParityClass.NULL

    def test_not_supported(self, rho, sc_so_three_halves, sc_sp_chain135):
        pi = LData((), sc_sp_chain135.rep)
        with pytest.raises(InvalidInputError):
            classify_parity(pi, sc_so_three_halves)


# ---------------------------------------------------------------------------
# Extended segments
# ---------------------------------------------------------------------------


class TestExtendedSegment:
    def test_dimensions(self):
        row = ExtendedSegment(3, 1, 1, 1)
        assert (row.a, row.b) == (5, 3)

    def test_eta_normalized_when_full(self):
        assert ExtendedSegment(1, 0, 1, -1).eta == 1

    def test_invalid(self):
        with pytest.raises(InvalidInputError):
            ExtendedSegment(1, 0, 2)
        with pytest.raises(InvalidInputError):
            ExtendedSegment(0, 1, 0)
        with pytest.raises(InvalidInputError):
            ExtendedSegment(1, Fraction(1, 2), 0)

    def test_replace(self):
        assert ExtendedSegment(3, 1, 1, 1).replace(l=0) == ExtendedSegment(3, 1, 0, 1)

    def test_row_sign(self):
        assert row_sign(ExtendedSegment(3, -3, 3, 1)) == 1
        assert row_sign(ExtendedSegment(0, 0, 0, -1)) == -1


class TestExtendedMultiSegment:
    def test_parameter(self, rho, sp10):
        assert sp10.psi() == ArthurParameter.from_triples(SP, [(rho, 1, 1), (rho, 1, 3), (rho, 1, 7)])
        assert sp10.group.label == "Sp(10)"
        assert len(sp10) == 3

    def test_block_access(self, rho, sp10):
        assert sp10.block(rho)[0] == ExtendedSegment(3, -3, 3, 1)
        assert sp10.cusp("rho") == rho
        assert sp10.block(CuspLabel("other")) == ()

    def test_sign_condition(self, rho):
        with pytest.raises(InvalidInputError, match="sign condition"):
            ExtendedMultiSegment.single(SP, rho, [ExtendedSegment(0, 0, 0, -1)])

    def test_order_condition(self, rho):
        with pytest.raises(InvalidInputError, match="violates"):
            ExtendedMultiSegment.single(SP, rho, [ExtendedSegment(1, 1, 0, 1), ExtendedSegment(0, 0, 0, 1)])

    def test_non_strict_allows_negative_sums(self, rho):
        rows = [ExtendedSegment(0, -1, 0, 1)]
        with pytest.raises(InvalidInputError):
            ExtendedMultiSegment.single(SP, rho, rows)
        assert len(ExtendedMultiSegment.single(SP, rho, rows, strict=False)) == 1

    def test_with_block(self, rho, sym2, sp10):
        extended = sp10.with_block(sym2, [ExtendedSegment(Fraction(1, 2), Fraction(1, 2), 0, 1)], strict=False)
        assert extended.rhos() == [rho, sym2]
