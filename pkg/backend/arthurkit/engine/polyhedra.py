"""
Exact rational polyhedra for hyperplane arrangements.

A constraint ``c·x + d > 0`` (or ``≥ 0``) is a :class:`Constraint`. Feasibility,
projection onto a linear form, interior witnesses and boundedness are all
decided by Fourier-Motzkin elimination over ``Fraction``; dimensions stay
small, so the quadratic blow-up is harmless after redundancy pruning.
"""

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from ..exceptions import InvalidInputError
from .halfint import fmt

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[Fraction, ...]
    const: Fraction
    strict: bool = True

    def value(self, point: Sequence[Fraction]) -> Fraction:
        return sum((c * p for c, p in zip(self.coeffs, point, strict=True)), self.const)

    def holds(self, point: Sequence[Fraction]) -> bool:
        v = self.value(point)
        return v > 0 if self.strict else v >= 0

    def normalized(self) -> "Constraint":
        """Scale so the first non-zero coefficient has absolute value 1."""
        pivot = next((abs(c) for c in self.coeffs if c), None)
        if pivot is None or pivot == 1:
            return self
        return Constraint(tuple(c / pivot for c in self.coeffs), self.const / pivot, self.strict)


@dataclass(frozen=True)
class Hyperplane:
    """``coeffs·x = offset`` with entries in {-1, 0, 1}, at most two non-zero."""

    coeffs: tuple[int, ...]
    offset: Fraction

    def __post_init__(self):
        support = [c for c in self.coeffs if c]
        if not support or len(support) > 2 or any(c not in (-1, 1) for c in support):
            raise InvalidInputError("Reducibility hyperplanes are x_i = t or x_i ± x_j = t", coeffs=self.coeffs)
        if support[0] < 0:
            object.__setattr__(self, "coeffs", tuple(-c for c in self.coeffs))
            object.__setattr__(self, "offset", -Fraction(self.offset))
        else:
            object.__setattr__(self, "offset", Fraction(self.offset))

    @classmethod
    def coordinate(cls, dim: int, i: int, t: Fraction) -> "Hyperplane":
        coeffs = [0] * dim
        coeffs[i] = 1
        return cls(tuple(coeffs), Fraction(t))

    @classmethod
    def pair(cls, dim: int, i: int, j: int, sign: int, t: Fraction) -> "Hyperplane":
        coeffs = [0] * dim
        coeffs[i] = 1
        coeffs[j] = sign
        return cls(tuple(coeffs), Fraction(t))

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    def side(self, point: Sequence[Fraction]) -> int:
        v = sum((c * p for c, p in zip(self.coeffs, point, strict=True)), Fraction(0)) - self.offset
        return (v > 0) - (v < 0)

    def halfspace(self, sign: int) -> Constraint:
        """The open side ``sign·(coeffs·x - offset) > 0``."""
        return Constraint(tuple(Fraction(sign * c) for c in self.coeffs), Fraction(-sign) * self.offset)

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(("-" if c < 0 else ("+" if terms else "")) + f"x{i + 1}")
        return f"{''.join(terms)} = {fmt(self.offset)}"


def _prune(constraints: Iterable[Constraint]) -> list[Constraint]:
    """Keep the tightest constraint for each direction."""
    best: dict[tuple[Fraction, ...], Constraint] = {}
    for c in constraints:
        c = c.normalized()
        known = best.get(c.coeffs)
        if known is None or c.const < known.const or (c.const == known.const and c.strict and not known.strict):
            best[c.coeffs] = c
    return list(best.values())


def _eliminate(constraints: list[Constraint], k: int) -> list[Constraint]:
    positive = [c for c in constraints if c.coeffs[k] > 0]
    negative = [c for c in constraints if c.coeffs[k] < 0]
    result = [c for c in constraints if c.coeffs[k] == 0]
    for p in positive:
        for n in negative:
            lp, ln = -n.coeffs[k], p.coeffs[k]
            coeffs = tuple(lp * a + ln * b for a, b in zip(p.coeffs, n.coeffs, strict=True))
            result.append(Constraint(coeffs, lp * p.const + ln * n.const, p.strict or n.strict))
    return _prune(result)


def _constant_ok(c: Constraint) -> bool:
    return c.const > 0 if c.strict else c.const >= 0


class System:
    """A conjunction of linear constraints in ``dim`` variables."""

    def __init__(self, dim: int, constraints: Iterable[Constraint] = ()):
        self.dim = dim
        self.constraints = list(constraints)
        for c in self.constraints:
            if len(c.coeffs) != dim:
                raise InvalidInputError("Constraint dimension mismatch", expected=dim, got=len(c.coeffs))

    def with_constraints(self, extra: Iterable[Constraint]) -> "System":
        return System(self.dim, self.constraints + list(extra))

    def with_equality(self, coeffs: Sequence[Fraction], value: Fraction) -> "System":
        """Conjoin ``coeffs·x = value`` as a pair of closed half-spaces."""
        c = tuple(Fraction(a) for a in coeffs)
        return self.with_constraints(
            [
                Constraint(c, -Fraction(value), strict=False),
                Constraint(tuple(-a for a in c), Fraction(value), strict=False),
            ]
        )

    def _layers(self) -> list[list[Constraint]] | None:
        """Constraint sets after eliminating x_dim, …, x_1; None if infeasible."""
        layers = [_prune(self.constraints)]
        for k in reversed(range(self.dim)):
            layers.append(_eliminate(layers[-1], k))
        if not all(_constant_ok(c) for c in layers[-1]):
            return None
        return layers

    def feasible(self) -> bool:
        return self._layers() is not None

    def witness(self) -> tuple[Fraction, ...] | None:
        """A point satisfying every constraint, by back-substitution with midpoints."""
        layers = self._layers()
        if layers is None:
            return None
        point = [Fraction(0)] * self.dim
        for k in range(self.dim):
            # layers[dim - k - 1] still involves x_k, with x_0..x_{k-1} fixed
            lower: list[Fraction] = []
            upper: list[Fraction] = []
            for c in layers[self.dim - k - 1]:
                a = c.coeffs[k]
                if a == 0:
                    continue
                rest = c.const + sum((c.coeffs[i] * point[i] for i in range(k)), Fraction(0))
                bound = -rest / a
                (lower if a > 0 else upper).append(bound)
            lo = max(lower) if lower else None
            hi = min(upper) if upper else None
            if lo is not None and hi is not None:
                point[k] = (lo + hi) / 2
            elif lo is not None:
                point[k] = lo + 1
            elif hi is not None:
                point[k] = hi - 1
        if not all(c.holds(point) for c in self.constraints):
            logger.debug("Midpoint back-substitution landed on a boundary; system %s", self.constraints)
            return None
        return tuple(point)

    def project(self, coeffs: Sequence[Fraction]) -> tuple[Fraction | None, Fraction | None]:
        """(inf, sup) of ``coeffs·x`` over the system; None marks an infinite end."""
        lifted = [Constraint((*c.coeffs, Fraction(0)), c.const, c.strict) for c in self.constraints]
        form = tuple(Fraction(a) for a in coeffs)
        lifted.append(Constraint((*form, Fraction(-1)), Fraction(0), strict=False))
        lifted.append(Constraint((*(-a for a in form), Fraction(1)), Fraction(0), strict=False))
        current = _prune(lifted)
        for k in reversed(range(self.dim)):
            current = _eliminate(current, k)
        lo: Fraction | None = None
        hi: Fraction | None = None
        for c in current:
            a = c.coeffs[-1]
            if a == 0:
                continue
            bound = -c.const / a
            if a > 0:
                lo = bound if lo is None else max(lo, bound)
            else:
                hi = bound if hi is None else min(hi, bound)
        return lo, hi

    def bounded(self) -> bool:
        """True iff the recession cone of the closure is {0}."""
        cone = [Constraint(c.coeffs, Fraction(0), strict=False) for c in self.constraints]
        for i in range(self.dim):
            for sign in (1, -1):
                direction = [Fraction(0)] * self.dim
                direction[i] = Fraction(sign)
                ray_system = System(self.dim, cone + [Constraint(tuple(direction), Fraction(0), strict=True)])
                if ray_system.feasible():
                    return False
        return True

    def restrict(self, i: int, value: Fraction) -> "System":
        """Substitute x_i = value and drop the coordinate."""
        constraints = []
        for c in self.constraints:
            coeffs = c.coeffs[:i] + c.coeffs[i + 1 :]
            constraints.append(Constraint(coeffs, c.const + c.coeffs[i] * value, c.strict))
        return System(self.dim - 1, constraints)


def chambers(hyperplanes: Sequence[Hyperplane], dim: int) -> list[tuple[tuple[int, ...], System]]:
    """Realizable sign vectors of the complement, each with its open system."""
    distinct: list[Hyperplane] = []
    for h in hyperplanes:
        if h.dim != dim:
            raise InvalidInputError("Hyperplane dimension mismatch", expected=dim, got=h.dim)
        if h not in distinct:
            distinct.append(h)
    cells: list[tuple[tuple[int, ...], System]] = [((), System(dim))]
    for h in distinct:
        refined = []
        for signs, system in cells:
            for sign in (1, -1):
                candidate = system.with_constraints([h.halfspace(sign)])
                if candidate.feasible():
                    refined.append(((*signs, sign), candidate))
        cells = refined
    logger.debug("%d hyperplanes in dimension %d cut %d chambers", len(distinct), dim, len(cells))
    return cells
