"""
Unit tests for the reducibility oracles.
"""

from fractions import Fraction

import pytest
from arthurkit.engine.core_model import LData, LSegment, SpehSymbol
from arthurkit.engine.oracle import (
    DefaultOracle,
    TableOracle,
    formal_induction_ldata,
    segment_linkage_points,
)
from arthurkit.exceptions import InvalidInputError, OracleMissError

F = Fraction


@pytest.fixture()
def base(sc_so_three_halves):
    return LData((), sc_so_three_halves.rep)


class TestLinkage:
    @pytest.mark.parametrize(
        "a1, a2, points",
        [
            (1, 1, {-1, 1}),
            (2, 1, {F(-3, 2), F(3, 2)}),
            (2, 2, {-2, -1, 1, 2}),
        ],
    )
    def test_points(self, a1, a2, points):
        assert segment_linkage_points(a1, a2) == frozenset(points)


class TestDefaultOracle:
    def setup_method(self):
        self.oracle = DefaultOracle()

    def test_character_over_supercuspidal(self, rho, base):
        assert self.oracle.query1(rho, 1, 1, base) == {F(3, 2), F(-3, 2)}

    def test_no_rule_for_speh(self, rho, base):
        with pytest.raises(OracleMissError):
            self.oracle.query1(rho, 2, 1, base)

    def test_no_rule_over_non_supercuspidal(self, rho, base):
        bigger = base.add_segments([LSegment(rho, F(-1, 2), F(-1, 2))])
        with pytest.raises(OracleMissError):
            self.oracle.query1(rho, 1, 1, bigger)

    def test_pairs(self, rho):
        assert self.oracle.query2(rho, (1, 1), (1, 1)) == {-1, 1}
        assert self.oracle.query2(rho, (1, 2), (1, 2)) == {-2, -1, 1, 2}

    def test_mixed_pair(self, rho):
        with pytest.raises(OracleMissError):
            self.oracle.query2(rho, (2, 2), (1, 2))


class TestTableOracle:
    def test_table_before_fallback(self, rho, base):
        oracle = TableOracle({("rho", 2, 1, base): [F(1, 2), F(-1, 2)]}, fallback=DefaultOracle())
        assert oracle.query1(rho, 2, 1, base) == {F(1, 2), F(-1, 2)}
        assert oracle.query1(rho, 1, 1, base) == {F(3, 2), F(-3, 2)}

    def test_asymmetric_points(self, base):
        with pytest.raises(InvalidInputError):
            TableOracle({("rho", 2, 1, base): [F(1, 2)]})

    def test_pair_is_mirrored(self, rho):
        oracle = TableOracle(query2={("rho", 1, 1, 2, 1): [F(1, 2)]})
        assert oracle.query2(rho, (2, 1), (1, 1)) == {F(-1, 2)}

    def test_contradicting_pairs(self):
        with pytest.raises(InvalidInputError):
            TableOracle(query2={("rho", 1, 1, 2, 1): [F(1, 2)], ("rho", 2, 1, 1, 1): [F(1, 2)]})

    def test_miss_without_fallback(self, rho, base):
        oracle = TableOracle()
        with pytest.raises(OracleMissError):
            oracle.query1(rho, 1, 1, base)
        with pytest.raises(OracleMissError):
            oracle.query2(rho, (1, 1), (1, 1))


class TestFormalInduction:
    @pytest.mark.parametrize("x", [F(-3, 2), F(3, 2)])
    def test_character_becomes_segment(self, rho, base, x):
        result = formal_induction_ldata(SpehSymbol(rho, 1, 1, x), base)
        assert result.segments == (LSegment(rho, F(-3, 2), F(-3, 2)),)
        assert result.tempered == base.tempered

    def test_bad_parity_center(self, rho, base):
        result = formal_induction_ldata(SpehSymbol(rho, 1, 1), base)
        assert result.tempered.mult(rho, 1) == 2
        assert result.tempered.eps(rho, 1) == 0

    def test_unknown_sign(self, rho, base):
        with pytest.raises(OracleMissError):
            formal_induction_ldata(SpehSymbol(rho, 4, 1), base)

    def test_known_sign_is_reused(self, rho, base):
        result = formal_induction_ldata(SpehSymbol(rho, 2, 1), base)
        assert result.tempered.mult(rho, 2) == 3
        assert result.tempered.eps(rho, 2) == -1

    def test_oracle_delegates(self, rho, base):
        speh = SpehSymbol(rho, 1, 1, F(-5, 2))
        assert DefaultOracle().ldata_of_irreducible_induction(speh, base) == formal_induction_ldata(speh, base)
