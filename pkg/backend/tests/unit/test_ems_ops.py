"""
Unit tests for operators on extended multi-segments.
"""

from collections import Counter
from fractions import Fraction

import pytest
from arthurkit.engine import ems_ops
from arthurkit.engine.core_model import ExtendedMultiSegment, ExtendedSegment
from arthurkit.engine.symbols import parse_symbol
from arthurkit.enums import GroupKind, OperatorKind, UIType
from arthurkit.exceptions import InvalidInputError, NotApplicableError, VanishingError

H = Fraction(1, 2)


@pytest.fixture()
def vanishing(rho):
    """SO block whose first row breaks the lower bound B + l ≥ 1/2."""
    return ExtendedMultiSegment.single(
        GroupKind.ODD_SO, rho, [ExtendedSegment(H, -H, 0, -1), ExtendedSegment(H, H, 0, -1)]
    )


class TestOperatorTag:
    def test_text_and_dict(self):
        tag = ems_ops.OperatorTag(OperatorKind.UI, "rho", (0, 1))
        assert str(tag) == "UI(0,1)@rho"
        assert tag.to_dict() == {"op": "UI", "rho": "rho", "indices": [0, 1]}

    def test_param(self):
        tag = ems_ops.OperatorTag(OperatorKind.UI_INVERSE, "rho", (2,), 1)
        assert str(tag) == "UIInv(2;1)@rho"
        assert tag.to_dict()["param"] == 1


class TestRowExchange:
    def test_admissible_orders(self, rho, sp10):
        rows = sp10.block(rho)
        assert len(ems_ops.admissible_orders(rows)) == 6
        assert ems_ops.admissible_orders(rows, prime=True) == [(0, 1, 2)]

    def test_exchange_nested_rows(self, rho, sp10):
        swapped = ems_ops.exchange_rows(sp10.block(rho), 0)
        assert swapped == (
            ExtendedSegment(1, -1, 1, -1),
            ExtendedSegment(3, -3, 2, -1),
            ExtendedSegment(0, 0, 0, -1),
        )

    def test_exchange_is_an_involution(self, rho, sp10):
        rows = sp10.block(rho)
        assert ems_ops.exchange_rows(ems_ops.exchange_rows(rows, 0), 0) == rows

    def test_forced_pairs_are_left_alone(self, rho, two_rows):
        rows = two_rows.block(rho)
        assert ems_ops.exchange_rows(rows, 0) == rows

    def test_out_of_range(self, rho, sp10):
        with pytest.raises(InvalidInputError):
            ems_ops.exchange_rows(sp10.block(rho), 2)

    def test_row_exchange_keeps_parameter(self, rho, sp10):
        result = ems_ops.row_exchange(sp10, rho, 1)
        assert result.psi() == sp10.psi()

    def test_canonical_form(self, rho, sp10):
        shuffled = ems_ops.row_exchange(sp10, rho, 0)
        assert ems_ops.canonical_form(shuffled) == sp10


class TestShiftAndAdd:
    def test_shift_one_row(self, rho, sp10):
        result = ems_ops.shift(sp10, rho, 2, 1)
        assert result.block(rho)[2] == ExtendedSegment(1, 1, 0, -1)

    def test_add_one_row(self, rho, sp10):
        result = ems_ops.add(sp10, rho, 2, 1)
        assert result.block(rho)[2] == ExtendedSegment(1, -1, 1, -1)

    def test_add_below_range(self, rho, sp10):
        with pytest.raises(InvalidInputError):
            ems_ops.add(sp10, rho, 2, -1)

    def test_missing_row(self, rho, sp10):
        with pytest.raises(InvalidInputError):
            ems_ops.shift(sp10, rho, 5, 1)

    def test_shift_block(self, rho, two_rows):
        result = ems_ops.shift_block(two_rows, rho, 1)
        assert [row.B for row in result.block(rho)] == [1, 2]


class TestNonvanishing:
    def test_minimal_shift(self, sp10):
        assert ems_ops.minimal_shift(sp10) == 3

    def test_example_is_nonvanishing(self, sp10):
        assert ems_ops.nonvanishing(sp10)
        ems_ops.require_nonvanishing(sp10)

    def test_shift_below_minimum(self, sp10):
        with pytest.raises(InvalidInputError):
            ems_ops.pair_criterion(sp10, 0)

    def test_larger_shift_agrees(self, sp10):
        assert ems_ops.pair_criterion(sp10, 5) == ems_ops.pair_criterion(sp10)

    def test_lower_bound_failure(self, vanishing):
        assert not ems_ops.nonvanishing(vanishing)
        with pytest.raises(VanishingError):
            ems_ops.require_nonvanishing(vanishing)

    def test_negative_B_needs_prime_order(self, rho):
        ems = ExtendedMultiSegment.single(
            GroupKind.SP, rho, [ExtendedSegment(0, 0, 0, -1), ExtendedSegment(1, -1, 1, -1)], strict=False
        )
        with pytest.raises(InvalidInputError, match="not \\(P'\\)"):
            ems_ops.nonvanishing(ems)


class TestConditionL:
    def test_two_rows_satisfy_L(self, two_rows):
        assert ems_ops.condition_L(two_rows) == two_rows

    def test_tempered_rows(self):
        ems = parse_symbol("Sp:{([0,0];0,-),([1,1];0,-),([3,3];0,+)}@rho")
        assert ems_ops.condition_L(ems) is not None


class TestUnionIntersection:
    def test_not_applicable(self, rho, two_rows):
        assert ems_ops.union_intersection(two_rows, rho, 0, 1) == (two_rows, UIType.NOT_APPLICABLE)
        assert ems_ops.union_intersection(two_rows, rho, 1, 0) == (two_rows, UIType.NOT_APPLICABLE)

    def test_ui_all_tags(self, sp10):
        for result, tag, kind in ems_ops.ui_all(sp10):
            assert tag.kind == OperatorKind.UI
            assert kind != UIType.NOT_APPLICABLE
            assert result.psi() != sp10.psi()


class TestDual:
    def test_dual_of_example(self, sp10):
        expected = parse_symbol("Sp:{([0,0];0,-),([1,1];0,-),([3,3];0,+)}@rho")
        assert ems_ops.dual(sp10) == expected

    def test_dual_is_an_involution(self, sp10):
        assert ems_ops.dual(ems_ops.dual(sp10)) == sp10

    def test_dual_needs_prime_order(self, rho, sp10):
        with pytest.raises(InvalidInputError):
            ems_ops.dual(ems_ops.row_exchange(sp10, rho, 0))

    def test_partial_dual_sign(self, rho, sp10):
        with pytest.raises(InvalidInputError):
            ems_ops.partial_dual(sp10, rho, 0, 0)

    def test_partial_dual_not_applicable(self, rho, sp10):
        with pytest.raises(NotApplicableError):
            ems_ops.partial_dual(sp10, rho, 0, 1)


class TestMoves:
    def test_example_is_absolutely_maximal(self, sp10):
        assert ems_ops.raising_moves(sp10) == []
        assert ems_ops.is_absolutely_maximal(sp10)

    def test_lowering_moves_are_nonvanishing(self, sp10):
        for result, tag in ems_ops.lowering_moves(sp10):
            assert ems_ops.nonvanishing(result)
            assert tag.rho == "rho"
            assert result.group == sp10.group

    def test_no_raising_operator_applies(self, rho, sp10):
        assert ems_ops.applicable_raising_ops(sp10) == []
        for j in range(len(sp10.block(rho))):
            assert ems_ops.ui_inverse_splits(sp10, rho, j) == []

    def test_raising_tags_match_moves(self, sp10):
        for result, _ in ems_ops.lowering_moves(sp10):
            tags = ems_ops.applicable_raising_ops(result)
            assert tags == [tag for _, tag in ems_ops.raising_moves(result)]


class TestOmega:
    def test_omega_ems(self, rho, sp10):
        assert ems_ops.omega_ems(sp10)[rho] == Counter({3: 1, 2: 1, 1: 2, 0: 3, -1: 2, -2: 1, -3: 1})

    def test_abs_omega(self, rho, sp10):
        assert ems_ops.abs_omega(sp10)[rho] == Counter({3: 1, 1: 1, 0: 1})

    def test_clear_caches(self, sp10):
        ems_ops.nonvanishing(sp10)
        ems_ops.clear_caches()
        assert ems_ops.nonvanishing(sp10)
