"""
Corank bookkeeping over a fixed supercuspidal base.

Tempered representations are peeled by the five reduction cases (I)-(V)
until a supercuspidal is reached; running the cases backwards lists every
tempered representation of a given corank along one ρ-line. Non-tempered
good-parity Arthur representations are then built inductively by adding one
segment to the smaller classes and deciding Arthur type.
"""

import logging
import math
from collections.abc import Callable, Iterator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from ..config import settings
from ..enums import TempOpKind
from ..exceptions import InvalidInputError, InvariantViolation, NotApplicableError
from .arthur_decider import is_arthur_type
from .core_model import (
    ArthurParameter,
    CuspLabel,
    EnhancedTempered,
    ExtendedMultiSegment,
    LData,
    LSegment,
    SupercuspidalData,
    good_parity_exponent,
    is_supercuspidal,
)
from .ems_ops import canonical_form, dual
from .halfint import HALF, fmt, is_integral
from .packet_engine import pi_of

logger = logging.getLogger(__name__)

INFINITE = 10**9


# ---------------------------------------------------------------------------
# Tempered operators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TempOp:
    """T^x_{kind,m}; ``x`` is unused for IV and V, ``eps_sign`` only matters for V."""

    kind: TempOpKind
    rho: CuspLabel
    m: int
    x: Fraction = Fraction(0)
    eps_sign: int = 0

    @property
    def corank(self) -> int:
        if self.kind == TempOpKind.I:
            return self.m
        if self.kind == TempOpKind.II:
            return self.m - 1
        if self.kind == TempOpKind.III:
            return self.m + int(2 * self.x) - 1
        if self.kind == TempOpKind.IV:
            return (self.m - 1) // 2
        return self.m // 2

    def __str__(self) -> str:
        if self.kind == TempOpKind.IV:
            return f"T_{{IV,{self.m}}}"
        if self.kind == TempOpKind.V:
            return f"T_{{V,{'+' if self.eps_sign == 1 else '-'},{self.m}}}"
        return f"T_{{{self.kind.value},{self.m}}}^{{{fmt(self.x)}}}"


def _mult(rep: EnhancedTempered, rho: CuspLabel, a: int) -> int:
    """m_φ(ρ⊗S_a) with m(S_0) = ∞."""
    return INFINITE if a == 0 else rep.mult(rho, a)


def _eps(rep: EnhancedTempered, rho: CuspLabel, a: int) -> int:
    """ε(ρ⊗S_a), 0 off φ, and +1 on S_0."""
    if a == 0:
        return 1
    return rep.eps(rho, a) or 0


def _rebuild(rep: EnhancedTempered, changes: dict[int, tuple[int, int]], rho: CuspLabel) -> EnhancedTempered:
    """Replace the (count, sign) of ρ⊗S_a for each a in ``changes``; S_0 is dropped."""
    entries = rep.entries()
    for a, (count, sign) in changes.items():
        if a == 0:
            continue
        if count <= 0:
            entries.pop((rho, a), None)
        else:
            entries[(rho, a)] = (count, sign)
    return EnhancedTempered.build(rep.kind, entries)


def temp_reduce(rep: EnhancedTempered) -> tuple[TempOp, EnhancedTempered] | None:
    """The first applicable case with π = T(π_temp), or None for a supercuspidal."""
    if is_supercuspidal(rep):
        return None
    for rho in rep.rhos():
        for a in sorted({b for r, b, _ in rep.summands if r == rho}):
            if not good_parity_exponent(rho, rep.kind, Fraction(a + 1, 2)):
                continue
            x = Fraction(a - 1, 2)
            m = rep.mult(rho, a)
            sign = _eps(rep, rho, a)
            low = a - 2
            if x > 0:
                below, below_sign = _mult(rep, rho, low), _eps(rep, rho, low)
                if sign * below_sign != -1:
                    op = TempOp(TempOpKind.I, rho, m, x)
                    changes = {a: (0, 0), low: (below + m if low else 0, sign)}
                elif m > 1 and m % 2:
                    op = TempOp(TempOpKind.II, rho, m, x)
                    changes = {a: (1, sign), low: (below + m - 1 if low else 0, below_sign)}
                elif m > 1:
                    op = TempOp(TempOpKind.III, rho, m, x)
                    changes = {a: (0, 0), low: (below + m - 2 if low else 0, below_sign)}
                else:
                    continue
            elif m > 1 and m % 2:
                op = TempOp(TempOpKind.IV, rho, m)
                changes = {1: (1, sign)}
            elif m > 1:
                op = TempOp(TempOpKind.V, rho, m, eps_sign=sign)
                changes = {1: (0, 0)}
            else:
                continue
            return op, _rebuild(rep, changes, rho)
    raise InvariantViolation(
        "No reduction case applies to a non-supercuspidal tempered representation",
        tempered=rep.pretty(ascii_only=True),
    )


def temp_apply(op: TempOp, rep: EnhancedTempered) -> EnhancedTempered | None:
    """T(π_temp), or None when the operator is not well defined on ``rep``."""
    rho, m, x = op.rho, op.m, op.x
    if op.kind in (TempOpKind.I, TempOpKind.II, TempOpKind.III):
        if x <= 0 or not good_parity_exponent(rho, rep.kind, x):
            return None
        a = int(2 * x) + 1
        low = a - 2
        here, below = _mult(rep, rho, a), _mult(rep, rho, low)
        below_sign = _eps(rep, rho, low)
        if op.kind == TempOpKind.I:
            if m < 1 or here != 0 or below < m:
                return None
            changes = {low: (below - m, below_sign), a: (m, below_sign)}
        elif op.kind == TempOpKind.II:
            if m < 3 or m % 2 == 0 or here != 1 or below < m:
                return None
            sign = _eps(rep, rho, a)
            if sign * below_sign != -1:
                return None
            changes = {low: (below - m + 1, below_sign), a: (m, sign)}
        else:
            if m < 2 or m % 2 or here != 0 or below < m - 1:
                return None
            changes = {low: (below - m + 2, below_sign), a: (m, -below_sign)}
    else:
        if not good_parity_exponent(rho, rep.kind, Fraction(0)):
            return None
        here = rep.mult(rho, 1)
        if op.kind == TempOpKind.IV:
            if m < 3 or m % 2 == 0 or here != 1:
                return None
            changes = {1: (m, _eps(rep, rho, 1))}
        else:
            if m < 2 or m % 2 or here != 0 or op.eps_sign not in (1, -1):
                return None
            changes = {1: (m, op.eps_sign)}
    try:
        return _rebuild(rep, changes, rho)
    except InvalidInputError:
        return None


@dataclass
class TemperedChain:
    """π_temp = T_1 ∘ … ∘ T_k(π_sc)."""

    rep: EnhancedTempered
    ops: list[TempOp] = field(default_factory=list)
    base: EnhancedTempered | None = None

    @property
    def corank(self) -> int:
        return sum(op.corank for op in self.ops)


def tempered_chain(rep: EnhancedTempered) -> TemperedChain:
    """Iterate :func:`temp_reduce` down to the supercuspidal support."""
    ops: list[TempOp] = []
    current = rep
    while (step := temp_reduce(current)) is not None:
        op, current = step
        ops.append(op)
    return TemperedChain(rep, list(reversed(ops)), current)


def _x_candidates(rep: EnhancedTempered, rho: CuspLabel) -> list[Fraction]:
    """x with ρ⊗S_{2x-1} in φ, or 2x - 1 = 0."""
    values = {Fraction(a + 1, 2) for r, a, _ in rep.summands if r == rho}
    values.add(HALF)
    return sorted(values)


def _ops_of_corank(rep: EnhancedTempered, rho: CuspLabel, c: int) -> Iterator[TempOp]:
    for x in _x_candidates(rep, rho):
        yield TempOp(TempOpKind.I, rho, c, x)
        yield TempOp(TempOpKind.II, rho, c + 1, x)
        m = c + 1 - int(2 * x)
        if m >= 2:
            yield TempOp(TempOpKind.III, rho, m, x)
    yield TempOp(TempOpKind.IV, rho, 2 * c + 1)
    for sign in (1, -1):
        yield TempOp(TempOpKind.V, rho, 2 * c, eps_sign=sign)


@lru_cache(maxsize=256)
def _tempered_corank(sc: SupercuspidalData, rho: CuspLabel, r: int) -> tuple[EnhancedTempered, ...]:
    if r == 0:
        return (sc.rep,)
    found: dict[EnhancedTempered, None] = {}
    for c in range(1, r + 1):
        for base in _tempered_corank(sc, rho, r - c):
            for op in _ops_of_corank(base, rho, c):
                if op.corank != c:
                    continue
                result = temp_apply(op, base)
                if result is not None:
                    found[result] = None
    return tuple(sorted(found, key=lambda rep: rep.pretty(ascii_only=True)))


def enumerate_tempered_corank(sc: SupercuspidalData, rho: CuspLabel, r: int) -> list[EnhancedTempered]:
    """Tempered representations of corank ``r`` over π_sc along ρ."""
    if r < 0:
        raise InvalidInputError("The corank must be non-negative", corank=r)
    if not rho.is_self_dual or not good_parity_exponent(rho, sc.kind, sc.alpha(rho)):
        raise InvalidInputError(f"{rho.name} is not a self-dual cusp of good parity", cusp=rho.name)
    return list(_tempered_corank(sc, rho, r))


# ---------------------------------------------------------------------------
# Good-parity Arthur representations of corank r
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ArthurEntry:
    ldata: LData
    psis: tuple[ArthurParameter, ...]


def _x_grid(top: Fraction) -> list[Fraction]:
    values = []
    x = top
    while x > 0:
        values.append(x)
        x -= 1
    return values


def _decide(pi: LData) -> ArthurEntry | None:
    decision = is_arthur_type(pi)
    return ArthurEntry(pi, decision.psis) if decision.arthur else None


@lru_cache(maxsize=64)
def _arthur_gp(sc: SupercuspidalData, rho: CuspLabel, r: int) -> tuple[ArthurEntry, ...]:
    if r == 0:
        return (ArthurEntry(LData((), sc.rep), tuple(is_arthur_type(LData((), sc.rep)).psis)),)
    candidates: dict[LData, None] = {}
    for rep in _tempered_corank(sc, rho, r):
        candidates[LData((), rep)] = None
    alpha = sc.alpha(rho)
    for s in range(r):
        length = r - s
        for smaller in _arthur_gp(sc, rho, s):
            for x in _x_grid(alpha + r + Fraction(1 - length, 2)):
                segment = LSegment(rho, Fraction(length - 1, 2) - x, Fraction(1 - length, 2) - x)
                candidates[smaller.ldata.add_segments([segment])] = None
    pool = list(candidates)
    if settings.threads > 1 and len(pool) > 1:
        with ThreadPoolExecutor(max_workers=settings.threads) as executor:
            decided = list(executor.map(_decide, pool))
    else:
        decided = [_decide(pi) for pi in pool]
    entries = [entry for entry in decided if entry is not None]
    logger.info("Π_A,gp at corank %d along %s: %d of %d candidates", r, rho.name, len(entries), len(pool))
    return tuple(sorted(entries, key=lambda entry: str(entry.ldata)))


def enumerate_arthur_gp(sc: SupercuspidalData, rho: CuspLabel, r: int) -> list[ArthurEntry]:
    """Π_{A,gp}(π_sc, ρ, r) with Ψ(π) of every member."""
    if r < 0:
        raise InvalidInputError("The corank must be non-negative", corank=r)
    enumerate_tempered_corank(sc, rho, 0)
    return list(_arthur_gp(sc, rho, r))


# ---------------------------------------------------------------------------
# Splitting along one cusp
# ---------------------------------------------------------------------------


def jantzen_split(
    witness: ExtendedMultiSegment, sc_witness: ExtendedMultiSegment
) -> dict[CuspLabel, ExtendedMultiSegment]:
    """X_ρ(π) = π(E_ρ ∪ (E_sc)^ρ) for every ρ where E and E_sc differ."""
    if witness.kind != sc_witness.kind:
        raise InvalidInputError("The witnesses live on different group families")
    parts: dict[CuspLabel, ExtendedMultiSegment] = {}
    for rho in sorted(set(witness.rhos()) | set(sc_witness.rhos())):
        if canonical_form(witness).block(rho) == canonical_form(sc_witness).block(rho):
            continue
        parts[rho] = sc_witness.with_block(rho, witness.block(rho))
    return parts


def jantzen_merge(
    parts: dict[CuspLabel, ExtendedMultiSegment], sc_witness: ExtendedMultiSegment
) -> ExtendedMultiSegment:
    """π = π(⋃ E_{i,ρ_i} ∪ ⋃ (E_sc)_ρ'), the inverse of :func:`jantzen_split`."""
    merged = sc_witness
    for rho, part in parts.items():
        for other in set(part.rhos()) | set(sc_witness.rhos()):
            if other != rho and part.block(other) != sc_witness.block(other):
                raise InvalidInputError(
                    f"The {rho.name}-component changes the {other.name}-block of π_sc",
                    cusp=rho.name,
                    other=other.name,
                )
        merged = merged.with_block(rho, part.block(rho))
    return merged


# ---------------------------------------------------------------------------
# Aubert-Zelevinsky dual on L-data
# ---------------------------------------------------------------------------


def az_dual_ldata(pi: LData) -> LData:
    """L-data of the Aubert-Zelevinsky dual of an Arthur-type π."""
    decision = is_arthur_type(pi)
    if not decision.arthur:
        raise NotApplicableError("The dual is computed through witnesses of Arthur-type inputs", ldata=str(pi))
    images = {pi_of(dual(member)) for member in decision.members}
    if len(images) != 1:
        raise InvariantViolation(
            "Witnesses of one representation have different duals", duals=sorted(str(i) for i in images)
        )
    return images.pop()


# ---------------------------------------------------------------------------
# Closed-form tables for corank at most three
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReportRow:
    family: str
    params: tuple[tuple[str, str], ...]
    subject: str
    computed: bool
    expected: bool

    @property
    def agrees(self) -> bool:
        return self.computed == self.expected


@dataclass
class CorankReport:
    sc: SupercuspidalData
    rho: CuspLabel
    corank: int
    rows: list[ReportRow] = field(default_factory=list)
    counts: dict[int, int] = field(default_factory=dict)

    @property
    def alpha(self) -> Fraction:
        return self.sc.alpha(self.rho)

    @property
    def mismatches(self) -> list[ReportRow]:
        return [row for row in self.rows if not row.agrees]


@dataclass(frozen=True)
class _Family:
    name: str
    corank: int
    arity: int
    build: Callable[..., LData | EnhancedTempered | None]
    expected: Callable[..., bool]
    tempered_gate: bool = False
    low: Fraction = HALF


def _ladder(sc: SupercuspidalData, rho: CuspLabel, *xs: Fraction, tempered: EnhancedTempered | None = None) -> LData:
    return LData(tuple(LSegment(rho, -x, -x) for x in xs), tempered or sc.rep)


def _segment_family(length: int) -> Callable[..., LData]:
    def build(sc: SupercuspidalData, rho: CuspLabel, x: Fraction) -> LData:
        return LData((LSegment(rho, -x, -x - length + 1),), sc.rep)

    return build


def _top_circle(sc: SupercuspidalData, rho: CuspLabel) -> EnhancedTempered | None:
    return temp_apply(TempOp(TempOpKind.I, rho, 1, sc.alpha(rho)), sc.rep)


def _corank3_strict(a: Fraction, x1: Fraction, x2: Fraction, x3: Fraction) -> bool:
    if x1 > x2 > x3:
        return x1 <= a or (x1, x2) == (a + 1, a) or (x1, x2, x3) == (a + 2, a + 1, a)
    if x1 == x2 > x3:
        return False
    if x1 > x2 == x3:
        return x2 == HALF and x1 <= a
    return x1 == HALF


FAMILIES: tuple[_Family, ...] = (
    _Family(
        "corank1-f0-a",
        1,
        1,
        lambda sc, rho, x: temp_apply(TempOp(TempOpKind.I, rho, 1, x), sc.rep),
        lambda a, x: x == a > 0,
        tempered_gate=True,
    ),
    _Family(
        "corank1-f0-b",
        1,
        0,
        lambda sc, rho: temp_apply(TempOp(TempOpKind.IV, rho, 3), sc.rep),
        lambda a: is_integral(a) and a > 0,
        tempered_gate=True,
    ),
    _Family(
        "corank1-f0-c",
        1,
        0,
        lambda sc, rho: temp_apply(TempOp(TempOpKind.V, rho, 2, eps_sign=1), sc.rep),
        lambda a: a == 0,
        tempered_gate=True,
    ),
    _Family(
        "corank1-f1",
        1,
        1,
        lambda sc, rho, x: _ladder(sc, rho, x),
        lambda a, x: HALF <= x <= a,
    ),
    _Family(
        "corank2-f0-Aaa",
        2,
        1,
        lambda sc, rho, x: (
            temp_apply(TempOp(TempOpKind.I, rho, 1, x), top) if (top := _top_circle(sc, rho)) else None
        ),
        lambda a, x: a > 0 and (x == a + 1 or (a > 1 and x == a - 1)),
        tempered_gate=True,
    ),
    _Family(
        "f=r-corank2",
        2,
        2,
        lambda sc, rho, x1, x2: _ladder(sc, rho, x1, x2) if x1 >= x2 else None,
        lambda a, x1, x2: (x2 < x1 <= a or (x1, x2) == (a + 1, a)) if x1 > x2 else x1 == HALF,
    ),
    _Family(
        "corank2-f1-[-x,-x-1]",
        2,
        1,
        _segment_family(2),
        lambda a, x: 0 <= x <= a - 1 or x == a == 0,
        low=Fraction(-1, 2),
    ),
    _Family(
        "f=r-corank3",
        3,
        3,
        lambda sc, rho, x1, x2, x3: _ladder(sc, rho, x1, x2, x3) if x1 >= x2 >= x3 else None,
        _corank3_strict,
    ),
    _Family(
        "corank3-f1-C",
        3,
        1,
        _segment_family(3),
        lambda a, x: -HALF <= x <= a - 2 or x == -HALF,
        low=Fraction(-1),
    ),
    _Family(
        "corank3-f2-Ba",
        3,
        1,
        lambda sc, rho, x: (
            _ladder(sc, rho, x, x, tempered=top) if (top := _top_circle(sc, rho)) else None
        ),
        lambda a, x: x == HALF,
    ),
    _Family(
        "corank3-f2-D2",
        3,
        1,
        lambda sc, rho, x: (
            LData((LSegment(rho, -x, -x), LSegment(rho, 0, -1)), sc.rep) if is_integral(x) else None
        ),
        lambda a, x: 1 <= x <= a or (x, a) == (2, 1),
    ),
)


def _exponents(alpha: Fraction, low: Fraction) -> list[Fraction]:
    """Values ≡ α mod ℤ from ``low`` up to α + 3."""
    x = alpha - math.floor(alpha - low)
    values = []
    while x <= alpha + 3:
        values.append(x)
        x += 1
    return values


def _parameter_grid(family: _Family, alpha: Fraction) -> Iterator[tuple[Fraction, ...]]:
    values = _exponents(alpha, family.low)

    def combos(depth: int) -> Iterator[tuple[Fraction, ...]]:
        if depth == 0:
            yield ()
            return
        for head in values:
            for tail in combos(depth - 1):
                yield (head, *tail)

    yield from combos(family.arity)


def corank_report(sc: SupercuspidalData, rho: CuspLabel, r: int) -> CorankReport:
    """Arthur verdicts and tempered gates for every tabulated family of corank ≤ r."""
    if not 0 <= r <= 3:
        raise InvalidInputError("Reports cover corank 0 to 3", corank=r)
    alpha = sc.alpha(rho)
    report = CorankReport(sc, rho, r)
    for family in FAMILIES:
        if family.corank > r:
            continue
        for params in _parameter_grid(family, alpha):
            try:
                subject = family.build(sc, rho, *params)
            except InvalidInputError:
                continue
            if subject is None and not family.tempered_gate:
                continue
            if family.tempered_gate:
                computed = subject is not None
                text = subject.pretty(ascii_only=True) if subject is not None else "not well defined"
            else:
                computed = is_arthur_type(subject).arthur
                text = subject.pretty(ascii_only=True)
            report.rows.append(
                ReportRow(
                    family.name,
                    tuple((f"x{i + 1}" if family.arity > 1 else "x", fmt(v)) for i, v in enumerate(params)),
                    text,
                    computed,
                    family.expected(alpha, *params),
                )
            )
    for s in range(r + 1):
        report.counts[s] = len(enumerate_arthur_gp(sc, rho, s))
    if report.mismatches:
        logger.warning("%d report rows disagree with the tabulated conditions", len(report.mismatches))
    return report


def clear_caches() -> None:
    _tempered_corank.cache_clear()
    _arthur_gp.cache_clear()
