"""
Reducibility oracles for Speh inductions.

The region algorithm needs three facts it cannot derive on its own: where
u_ρ(a,b)|·|^t ⋊ π_A reduces, where u_ρ(a_i,b_i)|·|^t × u_ρ(a_j,b_j) reduces,
and the Langlands data of an irreducible induction. :class:`DefaultOracle`
answers the cases settled by elementary rules; :class:`TableOracle` layers
user-supplied wall tables on top of it. Anything else raises
:class:`OracleMissError` instead of guessing.
"""

import logging
from abc import ABC, abstractmethod
from collections.abc import Iterable, Mapping
from fractions import Fraction

from ..exceptions import InvalidInputError, OracleMissError
from .core_model import (
    CuspLabel,
    EnhancedTempered,
    LData,
    LSegment,
    SpehSymbol,
    SupercuspidalData,
    good_parity_exponent,
    is_supercuspidal,
)
from .halfint import fmt

logger = logging.getLogger(__name__)

Points = frozenset[Fraction]
Query1Key = tuple[str, int, int, LData]
Query2Key = tuple[str, int, int, int, int]


def _linked(low1: Fraction, high1: Fraction, low2: Fraction, high2: Fraction) -> bool:
    if low1 < low2 and high1 < high2 and low2 <= high1 + 1:
        return True
    return low2 < low1 and high2 < high1 and low1 <= high2 + 1


def segment_linkage_points(a1: int, a2: int) -> Points:
    """t with δ(Δ_a1)|·|^t × δ(Δ_a2) reducible (Δ_a centered at 0 of length a)."""
    half1, half2 = Fraction(a1 - 1, 2), Fraction(a2 - 1, 2)
    reach = Fraction(a1 + a2, 2)
    t = -reach
    points = set()
    while t <= reach:
        if _linked(t - half1, t + half1, -half2, half2):
            points.add(t)
        t += 1
    return frozenset(points)


def formal_induction_ldata(speh: SpehSymbol, base: LData) -> LData:
    """L-data of u ⋊ π_A read off the Speh pieces, assuming irreducibility.

    Pieces with negative center become segments, positive ones their duals,
    and centered pieces join the tempered part with the sign already carried
    by the same summand.
    """
    rho = speh.rho
    segments: list[LSegment] = list(base.segments)
    entries = base.tempered.entries()
    kind = base.kind
    for center, a in speh.pieces():
        half_len = Fraction(a - 1, 2)
        if center < 0:
            segments.append(LSegment(rho, center + half_len, center - half_len))
        elif center > 0:
            segments.append(LSegment(rho.dual(), -center + half_len, -center - half_len))
        elif not rho.is_self_dual:
            for label in (rho, rho.dual()):
                count, _ = entries.get((label, a), (0, 0))
                entries[(label, a)] = (count + 1, 0)
        elif good_parity_exponent(rho, kind, Fraction(a + 1, 2)):
            known = entries.get((rho, a))
            if known is None:
                raise OracleMissError(
                    f"The sign of the new {rho.name}⊗S{a} copies is not determined",
                    speh=str(speh),
                    base=str(base),
                )
            entries[(rho, a)] = (known[0] + 2, known[1])
        else:
            count, _ = entries.get((rho, a), (0, 0))
            entries[(rho, a)] = (count + 2, 0)
    return LData(tuple(segments), EnhancedTempered.build(kind, entries))


class ReducibilityOracle(ABC):
    """Answers reducibility questions for Speh inductions along one ρ-line."""

    @abstractmethod
    def query1(self, rho: CuspLabel, a: int, b: int, base: LData) -> Points:
        """t with u_ρ(a,b)|·|^t ⋊ base reducible."""

    @abstractmethod
    def query2(self, rho: CuspLabel, first: tuple[int, int], second: tuple[int, int]) -> Points:
        """t with u_ρ(first)|·|^t × u_ρ(second) reducible."""

    def ldata_of_irreducible_induction(self, speh: SpehSymbol, base: LData) -> LData:
        return formal_induction_ldata(speh, base)


class DefaultOracle(ReducibilityOracle):
    """
    Elementary reducibility rules.

    - ρ|·|^t ⋊ π_sc reduces exactly at t = ±α_ρ.
    - Products of essentially square-integrable factors (b = 1) reduce exactly
      when the two segments are linked; factors with a = 1 reduce at the same
      points as their Zelevinsky duals.
    """

    def query1(self, rho: CuspLabel, a: int, b: int, base: LData) -> Points:
        if (a, b) == (1, 1) and base.is_tempered and rho.is_self_dual and is_supercuspidal(base.tempered):
            alpha = SupercuspidalData(base.tempered).alpha(rho)
            return frozenset({alpha, -alpha})
        raise OracleMissError(
            f"No rule for u_{rho.name}({a},{b})|.|^t ⋊ {base}",
            rho=rho.name,
            a=a,
            b=b,
            base=str(base),
        )

    def query2(self, rho: CuspLabel, first: tuple[int, int], second: tuple[int, int]) -> Points:
        (a1, b1), (a2, b2) = first, second
        if b1 == b2 == 1:
            return segment_linkage_points(a1, a2)
        if a1 == a2 == 1:
            return segment_linkage_points(b1, b2)
        raise OracleMissError(
            f"No rule for u_{rho.name}({a1},{b1})|.|^t × u_{rho.name}({a2},{b2})",
            rho=rho.name,
            first=list(first),
            second=list(second),
        )


class TableOracle(ReducibilityOracle):
    """
    Wall tables consulted before a fallback oracle.

    Args:
        query1: Reducibility points keyed by (ρ name, a, b, base L-data).
        query2: Reducibility points keyed by (ρ name, a_i, b_i, a_j, b_j).
        fallback: Oracle asked when a key is missing; None makes misses fatal.
    """

    def __init__(
        self,
        query1: Mapping[Query1Key, Iterable[Fraction]] | None = None,
        query2: Mapping[Query2Key, Iterable[Fraction]] | None = None,
        fallback: ReducibilityOracle | None = None,
    ):
        self._query1: dict[Query1Key, Points] = {}
        self._query2: dict[Query2Key, Points] = {}
        self.fallback = fallback
        for key, points in (query1 or {}).items():
            values = frozenset(Fraction(p) for p in points)
            if values != frozenset(-p for p in values):
                raise InvalidInputError(
                    "Reducibility points of u ⋊ π must be symmetric under t ↦ -t",
                    rho=key[0],
                    a=key[1],
                    b=key[2],
                    points=sorted(fmt(p) for p in values),
                )
            self._query1[key] = values
        for key, points in (query2 or {}).items():
            values = frozenset(Fraction(p) for p in points)
            self._query2[key] = values
            swapped = (key[0], key[3], key[4], key[1], key[2])
            mirrored = frozenset(-p for p in values)
            if self._query2.setdefault(swapped, mirrored) != mirrored:
                raise InvalidInputError("Pair table entries contradict each other", key=list(key[1:]))
        logger.info("Wall table with %d single and %d pair entries", len(self._query1), len(self._query2))

    def query1(self, rho: CuspLabel, a: int, b: int, base: LData) -> Points:
        found = self._query1.get((rho.name, a, b, base))
        if found is not None:
            return found
        if self.fallback is None:
            raise OracleMissError(f"No wall entry for u_{rho.name}({a},{b}) over {base}", rho=rho.name, a=a, b=b)
        return self.fallback.query1(rho, a, b, base)

    def query2(self, rho: CuspLabel, first: tuple[int, int], second: tuple[int, int]) -> Points:
        found = self._query2.get((rho.name, *first, *second))
        if found is not None:
            return found
        if self.fallback is None:
            raise OracleMissError(
                f"No wall entry for the pair u_{rho.name}{first} × u_{rho.name}{second}",
                rho=rho.name,
                first=list(first),
                second=list(second),
            )
        return self.fallback.query2(rho, first, second)
