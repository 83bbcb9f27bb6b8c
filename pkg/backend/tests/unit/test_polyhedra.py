"""
Unit tests for exact Fourier-Motzkin polyhedra and hyperplane chambers.
"""

from fractions import Fraction

import pytest
from arthurkit.engine.polyhedra import Constraint, Hyperplane, System, chambers
from arthurkit.exceptions import InvalidInputError

F = Fraction


def interval(low, high):
    """low < x < high in one variable."""
    return System(1, [Constraint((F(1),), F(-low)), Constraint((F(-1),), F(high))])


class TestConstraint:
    def test_value_and_holds(self):
        c = Constraint((F(1), F(-1)), F(2))
        assert c.value((F(1), F(3))) == 0
        assert not c.holds((F(1), F(3)))
        assert Constraint(c.coeffs, c.const, strict=False).holds((F(1), F(3)))

    def test_normalized(self):
        c = Constraint((F(-2), F(4)), F(6)).normalized()
        assert c.coeffs == (F(-1), F(2))
        assert c.const == 3


class TestHyperplane:
    def test_leading_sign_is_positive(self):
        h = Hyperplane((-1, 1), F(2))
        assert h.coeffs == (1, -1)
        assert h.offset == -2
        assert str(h) == "x1-x2 = -2"

    def test_constructors(self):
        assert str(Hyperplane.pair(2, 0, 1, 1, F(1))) == "x1+x2 = 1"
        assert str(Hyperplane.coordinate(3, 2, F(3, 2))) == "x3 = 3/2"

    @pytest.mark.parametrize("coeffs", [(0, 0), (2, 0), (1, 1, 1)])
    def test_rejected_shapes(self, coeffs):
        with pytest.raises(InvalidInputError):
            Hyperplane(coeffs, F(0))

    def test_side(self):
        h = Hyperplane.coordinate(2, 0, F(1))
        assert h.side((F(2), F(0))) == 1
        assert h.side((F(1), F(5))) == 0
        assert h.side((F(0), F(0))) == -1


class TestSystem:
    def test_interval(self):
        system = interval(0, 1)
        assert system.feasible()
        assert system.witness() == (F(1, 2),)
        assert system.project((F(1),)) == (F(0), F(1))
        assert system.bounded()

    def test_half_line(self):
        system = System(1, [Constraint((F(1),), F(0))])
        assert system.witness() == (F(1),)
        assert system.project((F(1),)) == (F(0), None)
        assert not system.bounded()

    def test_infeasible(self):
        system = interval(1, 0)
        assert not system.feasible()
        assert system.witness() is None

    def test_open_point_is_empty(self):
        assert not interval(1, 1).feasible()

    def test_equality(self):
        quadrant = System(2, [Constraint((F(1), F(0)), F(0)), Constraint((F(0), F(1)), F(0))])
        segment = quadrant.with_equality((F(1), F(1)), F(1))
        assert segment.project((F(1), F(-1))) == (F(-1), F(1))
        assert segment.bounded()

    def test_restrict(self):
        system = System(2, [Constraint((F(-1), F(-1)), F(1))])
        line = system.restrict(0, F(1, 2))
        assert line.dim == 1
        assert line.project((F(1),)) == (None, F(1, 2))

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidInputError):
            System(2, [Constraint((F(1),), F(0))])


class TestChambers:
    def test_point_on_a_line(self):
        cells = chambers([Hyperplane.coordinate(1, 0, F(3, 2))], 1)
        assert [signs for signs, _ in cells] == [(1,), (-1,)]

    def test_duplicates_are_ignored(self):
        h = Hyperplane.coordinate(1, 0, F(0))
        assert len(chambers([h, h], 1)) == 2

    def test_central_arrangement(self):
        planes = [
            Hyperplane.coordinate(2, 0, F(0)),
            Hyperplane.coordinate(2, 1, F(0)),
            Hyperplane.pair(2, 0, 1, 1, F(0)),
        ]
        cells = chambers(planes, 2)
        assert len(cells) == 6
        assert not any(system.bounded() for _, system in cells)

    def test_triangle(self):
        planes = [
            Hyperplane.coordinate(2, 0, F(0)),
            Hyperplane.coordinate(2, 1, F(0)),
            Hyperplane.pair(2, 0, 1, 1, F(1)),
        ]
        cells = chambers(planes, 2)
        assert len(cells) == 7
        bounded = [signs for signs, system in cells if system.bounded()]
        assert bounded == [(1, 1, -1)]

    def test_mismatch(self):
        with pytest.raises(InvalidInputError):
            chambers([Hyperplane.coordinate(2, 0, F(0))], 1)
