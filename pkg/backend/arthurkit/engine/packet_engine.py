"""
Representations attached to extended multi-segments and their packets.

``pi_of`` computes the Langlands data of π(E) by peeling triangles off the
absolutely maximal member; ``intersection_set`` closes E under the raising
operators and their inverses to obtain every extended multi-segment with the
same representation.
"""

import itertools
import logging
import random
from collections import deque
from collections.abc import Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from ..config import settings
from ..exceptions import (
    BudgetExceededError,
    InvalidInputError,
    InvariantViolation,
    VanishingError,
)
from .core_model import (
    ArthurParameter,
    CuspLabel,
    EnhancedTempered,
    ExtendedMultiSegment,
    ExtendedSegment,
    LData,
    LSegment,
    SupercuspidalData,
    row_sign,
)
from .ems_ops import (
    OperatorTag,
    add,
    block_satisfies_L,
    canonical_form,
    condition_L,
    exchange_rows,
    lowering_moves,
    nonvanishing,
    raising_moves,
    same_up_to_exchange,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PacketEntry:
    ems: ExtendedMultiSegment
    ldata: LData


@dataclass
class IntersectionResult:
    """𝓔(π) up to row exchange together with Ψ(π)."""

    ldata: LData
    members: list[ExtendedMultiSegment]
    psis: list[ArthurParameter]
    maximal: ExtendedMultiSegment
    trail: list[OperatorTag] = field(default_factory=list)

    @property
    def psi_max(self) -> ArthurParameter:
        return self.maximal.psi()


# ---------------------------------------------------------------------------
# Canonical entry point
# ---------------------------------------------------------------------------


def _prepared(ems: ExtendedMultiSegment) -> ExtendedMultiSegment:
    """Canonical form of a non-vanishing E; VanishingError otherwise."""
    try:
        canonical = canonical_form(ems)
    except VanishingError as exc:
        raise VanishingError("π(E) = 0", ems=str(ems)) from exc
    if not nonvanishing(canonical):
        raise VanishingError("π(E) = 0", ems=str(ems))
    return canonical


def psi_of(ems: ExtendedMultiSegment) -> ArthurParameter:
    return ems.psi()


# ---------------------------------------------------------------------------
# L-data under condition (L)
# ---------------------------------------------------------------------------


def ldata_condition_L(ems: ExtendedMultiSegment) -> LData:
    """L-data of π(E) read off an order witnessing condition (L)."""
    witness = condition_L(ems)
    if witness is None:
        raise InvalidInputError("The extended multi-segment does not satisfy condition (L)", ems=str(ems))
    segments: list[LSegment] = []
    tempered: list[tuple[CuspLabel, int, int]] = []
    for rho, rows in witness.blocks:
        for row in rows:
            segments.extend(LSegment(rho, row.B + k, -row.A + k) for k in range(row.l))
            if row.b % 2:
                tempered.append((rho, row.a, row.eta))
    return LData(tuple(segments), EnhancedTempered(ems.kind, tuple(tempered)))


# ---------------------------------------------------------------------------
# Absolutely maximal member
# ---------------------------------------------------------------------------


def raise_to_maximal(
    ems: ExtendedMultiSegment, budget: int | None = None, rng: random.Random | None = None
) -> tuple[ExtendedMultiSegment, list[OperatorTag]]:
    """Apply raising operators until none applies.

    ``rng`` picks among the applicable operators at random; the end point is
    the same for every schedule.
    """
    budget = budget or settings.node_budget
    current = _prepared(ems)
    visited = {current}
    trail: list[OperatorTag] = []
    while True:
        moves = raising_moves(current)
        if not moves:
            return current, trail
        current, tag = rng.choice(moves) if rng else moves[0]
        trail.append(tag)
        if current in visited:
            raise InvariantViolation("Raising operators returned to an earlier state", trail=[str(t) for t in trail])
        visited.add(current)
        if len(visited) > budget:
            raise BudgetExceededError(
                f"Raising search exceeded {budget} nodes", budget, [t.to_dict() for t in trail]
            )


@lru_cache(maxsize=4096)
def _maximal(ems: ExtendedMultiSegment) -> ExtendedMultiSegment:
    top, trail = raise_to_maximal(ems)
    logger.debug("Absolutely maximal after %d raising steps", len(trail))
    return top


def absolutely_maximal(
    ems: ExtendedMultiSegment, rng: random.Random | None = None
) -> ExtendedMultiSegment:
    """E^{|max|} in canonical form."""
    if rng is not None:
        return raise_to_maximal(ems, rng=rng)[0]
    return _maximal(_prepared(ems))


def psi_max(ems: ExtendedMultiSegment) -> ArthurParameter:
    return absolutely_maximal(ems).psi()


# ---------------------------------------------------------------------------
# Langlands data of π(E)
# ---------------------------------------------------------------------------


def _violating_rho(top: ExtendedMultiSegment) -> CuspLabel:
    for rho, rows in top.blocks:
        if not block_satisfies_L(rows):
            return rho
    raise InvariantViolation("Every block satisfies (L) but E does not", ems=str(top))


def peel_triangle(top: ExtendedMultiSegment, rho: CuspLabel) -> tuple[ExtendedMultiSegment, LSegment]:
    """(E^-, Δ_ρ[B_j, -A_j]) for an absolutely maximal E in canonical order."""
    rows = top.block(rho)
    peak = max(row.b for row in rows)
    if peak <= 1:
        raise InvariantViolation(f"The {rho.name}-block has no row with b > 1", ems=str(top))
    j = next(index for index, row in enumerate(rows) if row.b == peak)
    last = max(index for index, row in enumerate(rows) if row.B == rows[j].B)
    moved = rows
    for k in range(j, last):
        moved = exchange_rows(moved, k)
    row = moved[last]
    if row.l < 1:
        raise InvariantViolation("add^{-1} needs l ≥ 1 on the peeled row", row=str(row))
    lowered = add(top.with_block(rho, moved), rho, last, -1)
    return lowered, LSegment(rho, row.B, -row.A)


def peel_lower_minus(
    top: ExtendedMultiSegment, rho: CuspLabel
) -> tuple[ExtendedMultiSegment, list[LSegment]]:
    """(E_{ρ,-}, removed segments) for an absolutely maximal E in canonical order."""
    rows = top.block(rho)
    long_rows = [row for row in rows if row.A != row.B]
    if not long_rows:
        raise InvariantViolation(f"The {rho.name}-block is tempered", ems=str(top))
    base = min(row.B for row in long_rows)
    middle = [index for index, row in enumerate(rows) if row.B == base and row.A != row.B]
    if any(rows[index].l < 1 for index in middle):
        raise InvariantViolation("E_{ρ,-} needs l ≥ 1 on every row starting at the minimal B", ems=str(top))
    lowered = top
    removed = []
    for index in sorted(middle, reverse=True):
        removed.append(LSegment(rho, rows[index].B, -rows[index].A))
        lowered = add(lowered, rho, index, -1)
    return lowered, removed


@lru_cache(maxsize=8192)
def _pi_canonical(ems: ExtendedMultiSegment) -> LData:
    top = _maximal(ems)
    if condition_L(top) is not None:
        return ldata_condition_L(top)
    rho = _violating_rho(top)
    lowered, segment = peel_triangle(top, rho)
    return _pi_canonical(_prepared(lowered)).add_segments([segment])


def pi_of(ems: ExtendedMultiSegment) -> LData:
    """Langlands data of π(E)."""
    return _pi_canonical(_prepared(ems))


@lru_cache(maxsize=8192)
def _pi_canonical_v2(ems: ExtendedMultiSegment) -> LData:
    top = _maximal(ems)
    if condition_L(top) is not None:
        return ldata_condition_L(top)
    rho = _violating_rho(top)
    lowered, removed = peel_lower_minus(top, rho)
    return _pi_canonical_v2(_prepared(lowered)).add_segments(removed)


def pi_of_variant2(ems: ExtendedMultiSegment) -> LData:
    """Langlands data of π(E) through E_{ρ,-}; agrees with :func:`pi_of`."""
    return _pi_canonical_v2(_prepared(ems))


# ---------------------------------------------------------------------------
# Packets
# ---------------------------------------------------------------------------


def _row_of(a: int, b: int) -> tuple[Fraction, Fraction]:
    return Fraction(a + b, 2) - 1, Fraction(a - b, 2)


def _decorations(A: Fraction, B: Fraction) -> list[ExtendedSegment]:
    b = int(A - B) + 1
    rows = []
    for l in range(b // 2 + 1):  # noqa: E741
        etas = (1,) if 2 * l == b else (1, -1)
        rows.extend(ExtendedSegment(A, B, l, eta) for eta in etas)
    return rows


def packet_members(psi: ArthurParameter) -> list[ExtendedMultiSegment]:
    """All non-vanishing E with ψ_E = ψ in the (B, A)-sorted order."""
    if not psi.is_good_parity():
        raise InvalidInputError("Packets are enumerated for good-parity parameters only", psi=str(psi))
    blocks: list[tuple[CuspLabel, list[tuple[Fraction, Fraction]]]] = []
    for rho in psi.rhos():
        segments = sorted((_row_of(s.a, s.b) for s in psi.restrict(rho)), key=lambda seg: (seg[1], seg[0]))
        blocks.append((rho, segments))
    flat = [(rho, segment) for rho, segments in blocks for segment in segments]
    choices = [_decorations(*segment) for _, segment in flat]
    members: dict[ExtendedMultiSegment, None] = {}
    for picked in itertools.product(*choices):
        sign = 1
        for row in picked:
            sign *= row_sign(row)
        if sign != 1:
            continue
        grouped: dict[CuspLabel, list[ExtendedSegment]] = {}
        for (rho, _), row in zip(flat, picked, strict=True):
            grouped.setdefault(rho, []).append(row)
        ems = ExtendedMultiSegment(psi.kind, tuple((rho, tuple(rows)) for rho, rows in grouped.items()))
        if nonvanishing(ems):
            members[canonical_form(ems)] = None
    return list(members)


def enumerate_packet(psi: ArthurParameter, threads: int | None = None) -> list[PacketEntry]:
    """Π_ψ as pairs (E, L-data of π(E)), ordered by L-data text."""
    members = packet_members(psi)
    threads = threads or settings.threads
    if threads > 1 and len(members) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            ldatas = list(pool.map(pi_of, members))
    else:
        ldatas = [pi_of(ems) for ems in members]
    entries = [PacketEntry(ems, ldata) for ems, ldata in zip(members, ldatas, strict=True)]
    seen: dict[LData, ExtendedMultiSegment] = {}
    for entry in entries:
        if entry.ldata in seen:
            raise InvariantViolation(
                "Two members of one packet give the same representation",
                first=str(seen[entry.ldata]),
                second=str(entry.ems),
            )
        seen[entry.ldata] = entry.ems
    logger.info("Packet of %s has %d members", psi, len(entries))
    return sorted(entries, key=lambda entry: (str(entry.ldata), str(entry.ems)))


# ---------------------------------------------------------------------------
# Intersections of packets
# ---------------------------------------------------------------------------


def _reproduces(ems: ExtendedMultiSegment, target: LData) -> bool:
    try:
        return pi_of(ems) == target
    except VanishingError:
        return False


def _single_maximum(
    start: ExtendedMultiSegment, members: list[ExtendedMultiSegment], maxima: list[ExtendedMultiSegment]
) -> tuple[list[ExtendedMultiSegment], ExtendedMultiSegment]:
    """Drop members whose representation differs from π(start) and merge exchange-equivalent maxima."""
    target = pi_of(start)
    foreign = [member for member in members if not _reproduces(member, target)]
    if foreign:
        logger.warning(
            "Intersection search reached %d members of another representation, first %s",
            len(foreign),
            foreign[0],
        )
    kept = [member for member in members if member not in foreign]
    distinct: list[ExtendedMultiSegment] = []
    for member in maxima:
        if member in foreign or any(same_up_to_exchange(member, other) for other in distinct):
            continue
        distinct.append(member)
    if len(distinct) != 1:
        raise InvariantViolation(
            "Expected exactly one absolutely maximal member",
            count=len(distinct),
            maxima=[str(member) for member in distinct],
        )
    return kept, distinct[0]


def intersection_set(ems: ExtendedMultiSegment, budget: int | None = None) -> IntersectionResult:
    """Every E' with π(E') = π(E), up to row exchange."""
    budget = budget or settings.node_budget
    start = _prepared(ems)
    seen = {start: None}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for result, _ in raising_moves(current) + lowering_moves(current):
            if result in seen:
                continue
            seen[result] = None
            if len(seen) > budget:
                raise BudgetExceededError(
                    f"Intersection search exceeded {budget} nodes", budget, [str(current)]
                )
            queue.append(result)
        logger.debug("Intersection frontier %d, found %d", len(queue), len(seen))
    members = sorted(seen, key=str)
    maxima = [member for member in members if not raising_moves(member)]
    if len(maxima) == 1:
        maximal = maxima[0]
    else:
        logger.warning("Intersection search found %d maximal members", len(maxima))
        members, maximal = _single_maximum(start, members, maxima)
    psis = sorted({member.psi() for member in members}, key=str)
    logger.info("𝓔(π) has %d members and %d parameters", len(members), len(psis))
    return IntersectionResult(pi_of(start), members, psis, maximal)


def psi_set(ems: ExtendedMultiSegment, budget: int | None = None) -> list[ArthurParameter]:
    return intersection_set(ems, budget).psis


# ---------------------------------------------------------------------------
# Parameters whose packets contain a supercuspidal
# ---------------------------------------------------------------------------


def _chain_partitions(chain: list[int]) -> list[list[tuple[int, int]]]:
    """Ways to cut a chain of odd dimensions into Clebsch–Gordan strings (a, b)."""
    found: list[list[tuple[int, int]]] = []

    def split(start: int, acc: list[tuple[int, int]]):
        if start == len(chain):
            found.append(list(acc))
            return
        for end in range(start, len(chain)):
            if end > start and chain[end] - chain[end - 1] != 2:
                break
            low, high = chain[start], chain[end]
            a, b = (high + low) // 2, (high - low) // 2 + 1
            for pair in sorted({(a, b), (b, a)}):
                split(end + 1, acc + [pair])

    split(0, [])
    return found


def psi_set_of_supercuspidal(sc: SupercuspidalData) -> list[ArthurParameter]:
    """All ψ with ψ^Δ = φ_sc, i.e. every packet containing π_sc."""
    per_rho = []
    for rho in sc.rep.rhos():
        chain = sorted(a for r, a, _ in sc.rep.summands if r == rho)
        per_rho.append([[(rho, a, b) for a, b in option] for option in _chain_partitions(chain)])
    result = []
    for combination in itertools.product(*per_rho):
        triples: Iterable = itertools.chain.from_iterable(combination)
        result.append(ArthurParameter.from_triples(sc.kind, triples))
    logger.info("π_sc lies in %d local Arthur packets", len(result))
    return sorted(result, key=str)


def clear_caches() -> None:
    for cached in (_maximal, _pi_canonical, _pi_canonical_v2):
        cached.cache_clear()
