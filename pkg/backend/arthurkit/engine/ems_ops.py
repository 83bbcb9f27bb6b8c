"""
Operators on extended multi-segments.

Row-level helpers work on one ρ-block (a ``Rows`` tuple in its admissible
order); the public functions take and return whole ``ExtendedMultiSegment``
values. Orbits under row exchange are cached on the row tuple, so repeated
queries on the same block (non-vanishing, union-intersection, splits,
condition (L)) share one breadth-first enumeration.
"""

import logging
import math
from collections import Counter, deque
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from functools import lru_cache
from typing import Any

from ..enums import OperatorKind, UIType
from ..exceptions import InvalidInputError, NotApplicableError, VanishingError
from .core_model import (
    CuspLabel,
    ExtendedMultiSegment,
    ExtendedSegment,
    Rows,
    is_admissible,
    must_precede,
    segment_multiset,
)
from .halfint import HALF, is_integral, sign_pow, to_int

logger = logging.getLogger(__name__)

Labels = tuple[int, ...]


@dataclass(frozen=True)
class OperatorTag:
    """One applied operator, for provenance trails."""

    kind: OperatorKind
    rho: str | None = None
    indices: tuple[int, ...] = ()
    param: int | None = None

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"op": self.kind.value}
        if self.rho is not None:
            data["rho"] = self.rho
        if self.indices:
            data["indices"] = list(self.indices)
        if self.param is not None:
            data["param"] = self.param
        return data

    def __str__(self) -> str:
        index = ",".join(str(i) for i in self.indices)
        extra = f";{self.param}" if self.param is not None else ""
        where = f"@{self.rho}" if self.rho else ""
        return f"{self.kind.value}({index}{extra}){where}"


def _row(A, B, l, eta) -> ExtendedSegment:  # noqa: E741
    try:
        return ExtendedSegment(A, B, to_int(l), eta)
    except InvalidInputError as exc:
        raise VanishingError(exc.message, **exc.details) from exc


# ---------------------------------------------------------------------------
# Admissible orders and row exchange
# ---------------------------------------------------------------------------


def admissible_orders(rows: Sequence[ExtendedSegment], prime: bool = False) -> list[Labels]:
    """All total orders of the rows compatible with (P), or (P') when ``prime``.

    Orders are index tuples into ``rows``; identical rows count separately.
    """
    rows = list(rows)
    found: list[Labels] = []

    def extend(prefix: list[int], remaining: list[int]):
        if not remaining:
            found.append(tuple(prefix))
            return
        for i in remaining:
            if any(must_precede(rows[j], rows[i], prime) for j in remaining if j != i):
                continue
            extend(prefix + [i], [j for j in remaining if j != i])

    extend([], list(range(len(rows))))
    return found


def exchange_rows(rows: Rows, k: int) -> Rows:
    """R_k: swap the adjacent rows k, k+1 and recompute their (l, η).

    Returns ``rows`` unchanged when the swapped order is not admissible.
    Raises VanishingError when a new l leaves [0, b/2].
    """
    if not 0 <= k < len(rows) - 1:
        raise InvalidInputError(f"No adjacent pair at position {k}", rows=len(rows))
    first, second = rows[k], rows[k + 1]
    if must_precede(first, second):
        return rows
    if first.contains(second) and first.segment != second.segment:
        big, small = first, second
    else:
        big, small = second, first
    if not big.contains(small):
        raise InvalidInputError(f"Rows {first} and {second} are not in an admissible order")

    eps = sign_pow(first.A - first.B) * first.eta * second.eta
    small_new = _row(small.A, small.B, small.l, sign_pow(big.A - big.B) * small.eta)
    middle = small.b - 2 * small.l
    flip = sign_pow(small.A - small.B)
    if eps == 1 and big.b - 2 * big.l < 2 * middle:
        big_new = _row(big.A, big.B, big.b - (big.l + middle), flip * big.eta)
    elif eps == 1:
        big_new = _row(big.A, big.B, big.l + middle, -flip * big.eta)
    else:
        big_new = _row(big.A, big.B, big.l - middle, -flip * big.eta)

    new_first, new_second = (big_new, small_new) if big is first else (small_new, big_new)
    return rows[:k] + (new_second, new_first) + rows[k + 2 :]


@lru_cache(maxsize=16384)
def _labelled_orbit(rows: Rows) -> tuple[tuple[Labels, Rows], ...] | None:
    """Every admissible reordering reachable by row exchanges, keyed by the order.

    ``None`` when some exchange leaves the valid range, i.e. π(E) = 0.
    """
    start = tuple(range(len(rows)))
    seen: dict[Labels, Rows] = {start: rows}
    queue = deque([start])
    while queue:
        labels = queue.popleft()
        current = seen[labels]
        for k in range(len(current) - 1):
            if must_precede(current[k], current[k + 1]):
                continue
            swapped = labels[:k] + (labels[k + 1], labels[k]) + labels[k + 2 :]
            if swapped in seen:
                continue
            try:
                seen[swapped] = exchange_rows(current, k)
            except VanishingError:
                return None
            queue.append(swapped)
    return tuple(seen.items())


def exchange_orbit(rows: Rows) -> list[Rows]:
    """Distinct row tuples reachable from ``rows`` by row exchanges, canonical one first."""
    return sorted(_exchange_closure(tuple(rows)), key=_canonical_key)


def reorder(rows: Rows, order: Sequence[int]) -> Rows:
    """Move the rows into ``order`` (a permutation of positions) by row exchanges."""
    if sorted(order) != list(range(len(rows))):
        raise InvalidInputError("Not a permutation of the rows", order=list(order))
    if not is_admissible([rows[i] for i in order]):
        raise InvalidInputError("The requested order violates (P)", order=list(order))
    labels = list(range(len(rows)))
    current = tuple(rows)
    for position, label in enumerate(order):
        at = labels.index(label)
        while at > position:
            current = exchange_rows(current, at - 1)
            labels[at - 1], labels[at] = labels[at], labels[at - 1]
            at -= 1
    return current


@lru_cache(maxsize=16384)
def _exchange_closure(rows: Rows) -> frozenset[Rows]:
    """Every row tuple reachable from ``rows`` by row exchanges, decorations included."""
    seen = {rows}
    queue = deque([rows])
    while queue:
        current = queue.popleft()
        for k in range(len(current) - 1):
            if must_precede(current[k], current[k + 1]):
                continue
            nxt = exchange_rows(current, k)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return frozenset(seen)


def _canonical_key(rows: Rows) -> tuple:
    return tuple((row.B, row.A, row.l, row.eta) for row in rows)


@lru_cache(maxsize=16384)
def canonical_rows(rows: Rows) -> Rows:
    """The (B, A)-sorted member of the row-exchange class with the smallest decorations.

    Two blocks are equal up to row exchange exactly when their canonical rows
    agree. Raises VanishingError when some exchange leaves the valid range.
    """
    return min(_exchange_closure(tuple(rows)), key=_canonical_key)


def same_up_to_exchange(first: ExtendedMultiSegment, second: ExtendedMultiSegment) -> bool:
    if first.kind != second.kind or sorted(first.rhos()) != sorted(second.rhos()):
        return False
    return all(canonical_rows(rows) == canonical_rows(second.block(rho)) for rho, rows in first.blocks)


def canonical_form(ems: ExtendedMultiSegment) -> ExtendedMultiSegment:
    """The representative of E up to row exchange used as a memo key."""
    return ExtendedMultiSegment(
        ems.kind, tuple((rho, canonical_rows(rows)) for rho, rows in ems.blocks), ems.strict
    )


def _block_or_fail(ems: ExtendedMultiSegment, rho: CuspLabel) -> Rows:
    rows = ems.block(rho)
    if not rows:
        raise InvalidInputError(f"No {rho.name}-block in the extended multi-segment", cusp=rho.name)
    return rows


def row_exchange(ems: ExtendedMultiSegment, rho: CuspLabel, k: int) -> ExtendedMultiSegment:
    return ems.with_block(rho, exchange_rows(_block_or_fail(ems, rho), k))


# ---------------------------------------------------------------------------
# Shift and add
# ---------------------------------------------------------------------------


def _shift_row(row: ExtendedSegment, d: int) -> ExtendedSegment:
    return ExtendedSegment(row.A + d, row.B + d, row.l, row.eta)


def _add_row(row: ExtendedSegment, d: int) -> ExtendedSegment | None:
    A, B, l = row.A + d, row.B - d, row.l + d  # noqa: E741
    if A - B == -1 and l == 0:
        return None
    return ExtendedSegment(A, B, l, row.eta)


def _transform(
    ems: ExtendedMultiSegment, rho: CuspLabel, positions: Sequence[int], d: int, op: str
) -> ExtendedMultiSegment:
    rows = list(_block_or_fail(ems, rho))
    for j in positions:
        if not 0 <= j < len(rows):
            raise InvalidInputError(f"Row {j} is out of range", row=j, rows=len(rows))
    try:
        for j in positions:
            rows[j] = _shift_row(rows[j], d) if op == "sh" else _add_row(rows[j], d)
        return ems.with_block(rho, [row for row in rows if row is not None])
    except InvalidInputError as exc:
        raise InvalidInputError(
            f"{op}^{d} does not give an extended multi-segment: {exc.message}", **exc.details
        ) from exc


def shift(ems: ExtendedMultiSegment, rho: CuspLabel, j: int, d: int) -> ExtendedMultiSegment:
    """sh_j^d: [A_j, B_j] ↦ [A_j + d, B_j + d]."""
    return _transform(ems, rho, [j], d, "sh")


def add(ems: ExtendedMultiSegment, rho: CuspLabel, j: int, d: int) -> ExtendedMultiSegment:
    """add_j^d: ([A_j, B_j], l_j) ↦ ([A_j + d, B_j - d], l_j + d); empty rows are dropped."""
    return _transform(ems, rho, [j], d, "add")


def shift_block(ems: ExtendedMultiSegment, rho: CuspLabel, d: int) -> ExtendedMultiSegment:
    return _transform(ems, rho, range(len(ems.block(rho))), d, "sh")


def add_block(ems: ExtendedMultiSegment, rho: CuspLabel, d: int) -> ExtendedMultiSegment:
    return _transform(ems, rho, range(len(ems.block(rho))), d, "add")


# ---------------------------------------------------------------------------
# Non-vanishing
# ---------------------------------------------------------------------------


def _lower_bounds_hold(rows: Rows) -> bool:
    """B_i + l_i against 0 or ±1/2 with α_i the running sum of A_j + B_j + 1."""
    alpha = 0
    for row in rows:
        if is_integral(row.B):
            bound = 0
        else:
            bound = HALF if row.eta == sign_pow(alpha + 1) else -HALF
        if row.B + row.l < bound:
            return False
        alpha += row.a
    return True


def _adjacent_pair_holds(first: ExtendedSegment, second: ExtendedSegment) -> bool:
    eps = sign_pow(first.A - first.B) * first.eta * second.eta
    if first.A <= second.A and first.B <= second.B:
        if eps == 1 and not (
            first.B + first.l <= second.B + second.l and first.A - first.l <= second.A - second.l
        ):
            return False
        if eps == -1 and not first.A - first.l < second.B + second.l:
            return False
    if second.contains(first):
        if eps == 1 and not 0 <= second.l - first.l <= second.b - first.b:
            return False
        if eps == -1 and not first.l + second.l >= first.b:
            return False
    if first.contains(second):
        if eps == 1 and not 0 <= first.l - second.l <= first.b - second.b:
            return False
        if eps == -1 and not first.l + second.l >= second.b:
            return False
    return True


def _pairs_hold_everywhere(rows: Rows) -> bool:
    orbit = _labelled_orbit(rows)
    if orbit is None:
        return False
    return all(
        _adjacent_pair_holds(state[k], state[k + 1])
        for _, state in orbit
        for k in range(len(state) - 1)
    )


def minimal_shift(ems: ExtendedMultiSegment) -> int:
    """The least d ≥ 0 with B_i + d ≥ 0 for every row."""
    lowest = ems.min_B()
    return 0 if lowest is None else max(0, math.ceil(-lowest))


def pair_criterion(ems: ExtendedMultiSegment, d: int | None = None) -> bool:
    """Adjacent-pair inequalities over all admissible orders of sh^d(E).

    ``d`` defaults to the minimal shift; any larger d gives the same answer.
    """
    d = minimal_shift(ems) if d is None else d
    if d < minimal_shift(ems):
        raise InvalidInputError(f"sh^{d} leaves a negative B", d=d)
    return all(
        _pairs_hold_everywhere(tuple(_shift_row(row, d) for row in rows)) for _, rows in ems.blocks
    )


@lru_cache(maxsize=16384)
def _nonvanishing(ems: ExtendedMultiSegment) -> bool:
    if not all(_lower_bounds_hold(rows) for _, rows in ems.blocks):
        return False
    return pair_criterion(ems)


def nonvanishing(ems: ExtendedMultiSegment) -> bool:
    """Whether π(E) ≠ 0.

    A block with a negative B must be given in a (P') order.
    """
    for rho, rows in ems.blocks:
        if any(row.B < 0 for row in rows) and not is_admissible(rows, prime=True):
            raise InvalidInputError(
                f"The {rho.name}-block has a negative B and its order is not (P')",
                cusp=rho.name,
            )
    return _nonvanishing(ems)


def require_nonvanishing(ems: ExtendedMultiSegment) -> None:
    if not nonvanishing(ems):
        raise VanishingError("π(E) = 0", ems=str(ems))


# ---------------------------------------------------------------------------
# Condition (L)
# ---------------------------------------------------------------------------


def _rows_satisfy_L(rows: Rows) -> bool:
    for i, first in enumerate(rows):
        if first.b - 2 * first.l > 1:
            return False
        for second in rows[i + 1 :]:
            if first.A + first.B > second.A + second.B:
                return False
            if first.A + first.B == second.A + second.B and first.b % 2 and first.eta != second.eta:
                return False
    return True


@lru_cache(maxsize=16384)
def _L_witness(rows: Rows) -> Rows | None:
    orbit = _labelled_orbit(rows)
    if orbit is None:
        return None
    for _, state in orbit:
        if _rows_satisfy_L(state):
            return state
    return None


def condition_L(ems: ExtendedMultiSegment) -> ExtendedMultiSegment | None:
    """E reordered into an order witnessing condition (L), or None."""
    blocks = []
    for rho, rows in ems.blocks:
        witness = _L_witness(rows)
        if witness is None:
            return None
        blocks.append((rho, witness))
    return ExtendedMultiSegment(ems.kind, tuple(blocks), ems.strict)


def block_satisfies_L(rows: Rows) -> bool:
    return _L_witness(tuple(rows)) is not None


# ---------------------------------------------------------------------------
# Union-intersection and its type 3' inverse
# ---------------------------------------------------------------------------


def _ui_adjacent(rows: Rows, k: int) -> tuple[Rows, UIType] | None:
    """ui_k on the adjacent rows k, k+1; None when no case applies."""
    first, second = rows[k], rows[k + 1]
    if not (second.A > first.A and second.B > first.B):
        return None
    eps = sign_pow(first.A - first.B) * first.eta * second.eta
    gap = second.A - first.A
    flip = sign_pow(gap)
    if eps == 1 and second.A - second.l == first.A - first.l:
        kind = UIType.ONE
        values = (first.l, first.eta, second.l - gap, flip * second.eta)
    elif eps == 1 and second.B + second.l == first.B + first.l:
        kind = UIType.TWO
        if first.b - 2 * first.l >= gap:
            values = (first.l + gap, first.eta, second.l, flip * second.eta)
        else:
            values = (first.b - first.l, -first.eta, second.l, flip * second.eta)
    elif eps == -1 and second.B + second.l == first.A - first.l + 1:
        kind = UIType.THREE
        if first.l == 0 and second.l == 0:
            kind = UIType.THREE_PRIME
            values = (first.l, first.eta, 0, 1)
        elif second.l <= first.l:
            values = (first.l, first.eta, second.l, flip * second.eta)
        else:
            values = (first.l, first.eta, first.l, -flip * second.eta)
    else:
        return None
    l_k, eta_k, l_next, eta_next = values
    try:
        union = ExtendedSegment(second.A, first.B, l_k, eta_k)
        if kind == UIType.THREE_PRIME:
            return rows[:k] + (union,) + rows[k + 2 :], kind
        intersection = ExtendedSegment(first.A, second.B, l_next, eta_next)
    except InvalidInputError:
        return None
    return rows[:k] + (union, intersection) + rows[k + 2 :], kind


def _restore(rows: Rows, labels: Sequence[int]) -> Rows:
    """Put labelled rows back into increasing label order when that order is admissible."""
    order = sorted(range(len(rows)), key=lambda p: labels[p])
    if order == list(range(len(rows))) or not is_admissible([rows[p] for p in order]):
        return rows
    try:
        return reorder(rows, order)
    except VanishingError:
        return rows


def _ui_block(rows: Rows, i: int, j: int) -> tuple[Rows, UIType] | None:
    if not (0 <= i < len(rows) and 0 <= j < len(rows)):
        raise InvalidInputError(f"Rows {i}, {j} out of range", rows=len(rows))
    if not (rows[i].A < rows[j].A and rows[i].B < rows[j].B):
        return None
    orbit = _labelled_orbit(rows)
    if orbit is None:
        raise VanishingError("union-intersection on a vanishing block")
    for labels, state in orbit:
        p = labels.index(i)
        if p + 1 == len(labels) or labels[p + 1] != j:
            continue
        merged = _ui_adjacent(state, p)
        if merged is None:
            continue
        new_rows, kind = merged
        new_labels = list(labels)
        if kind == UIType.THREE_PRIME:
            del new_labels[p + 1]
        return _restore(new_rows, new_labels), kind
    return None


def union_intersection(
    ems: ExtendedMultiSegment, rho: CuspLabel, i: int, j: int
) -> tuple[ExtendedMultiSegment, UIType]:
    """ui_{i,j}; returns (E, NOT_APPLICABLE) when it acts trivially."""
    result = _ui_block(_block_or_fail(ems, rho), i, j)
    if result is None:
        return ems, UIType.NOT_APPLICABLE
    new_rows, kind = result
    try:
        return ems.with_block(rho, new_rows), kind
    except InvalidInputError:
        logger.debug("ui_{%d,%d} on %s gives an invalid object", i, j, rho.name)
        return ems, UIType.NOT_APPLICABLE


def ui_all(ems: ExtendedMultiSegment) -> list[tuple[ExtendedMultiSegment, OperatorTag, UIType]]:
    """Every applicable ui_{i,j} over all blocks."""
    moves = []
    for rho, rows in ems.blocks:
        for i in range(len(rows)):
            for j in range(len(rows)):
                if i == j:
                    continue
                result, kind = union_intersection(ems, rho, i, j)
                if kind != UIType.NOT_APPLICABLE:
                    tag = OperatorTag(OperatorKind.UI, rho.name, (i, j), None)
                    moves.append((result, tag, kind))
    return moves


def _split_rows(rows: Rows, j: int) -> Iterator[tuple[int, Rows]]:
    orbit = _labelled_orbit(rows)
    if orbit is None:
        raise VanishingError("splitting a row of a vanishing block")
    for labels, state in orbit:
        p = labels.index(j)
        row = state[p]
        if row.l != 0:
            continue
        for r in range(row.b - 1):
            if 2 * row.B + r < 0:
                continue
            low = ExtendedSegment(row.B + r, row.B, 0, row.eta)
            high = ExtendedSegment(row.A, row.B + r + 1, 0, sign_pow(r + 1) * row.eta)
            candidate = state[:p] + (low, high) + state[p + 1 :]
            if is_admissible(candidate):
                yield r, candidate


def _ui_inverse_moves(
    ems: ExtendedMultiSegment, rho: CuspLabel, j: int
) -> list[tuple[int, ExtendedMultiSegment]]:
    found: dict[ExtendedMultiSegment, int] = {}
    for r, candidate in _split_rows(_block_or_fail(ems, rho), j):
        try:
            result = canonical_form(ems.with_block(rho, candidate))
        except (InvalidInputError, VanishingError):
            continue
        found.setdefault(result, r)
    return [(r, result) for result, r in found.items()]


def ui_inverse_splits(ems: ExtendedMultiSegment, rho: CuspLabel, j: int) -> list[ExtendedMultiSegment]:
    """Inverses of type 3' union-intersections breaking row j in two (up to row exchange)."""
    return [result for _, result in _ui_inverse_moves(ems, rho, j)]


def splits_all(ems: ExtendedMultiSegment) -> list[tuple[ExtendedMultiSegment, OperatorTag]]:
    moves = []
    for rho, rows in ems.blocks:
        for j in range(len(rows)):
            for r, result in _ui_inverse_moves(ems, rho, j):
                moves.append((result, OperatorTag(OperatorKind.UI_INVERSE, rho.name, (j,), r)))
    return moves


# ---------------------------------------------------------------------------
# Dual and partial dual
# ---------------------------------------------------------------------------


def dual_rows(rows: Rows) -> Rows:
    """dual on one block given in a (P') order; the result is again (P')."""
    if not is_admissible(rows, prime=True):
        raise InvalidInputError("dual needs a (P') order")
    out = []
    for index, row in enumerate(rows):
        alpha = sum(r.a for r in rows[:index])
        beta = sum(r.b for r in rows[index + 1 :])
        eta = row.eta
        if is_integral(row.B):
            l = row.l + row.B  # noqa: E741
            eta_new = sign_pow(alpha + beta) * eta
        else:
            if 2 * row.l == row.b:
                eta = sign_pow(alpha + 1)
            l = row.l + row.B + HALF * sign_pow(alpha) * eta  # noqa: E741
            eta_new = sign_pow(alpha + beta + 1) * eta
        out.append(_row(row.A, -row.B, l, eta_new))
    return tuple(reversed(out))


def dual(ems: ExtendedMultiSegment) -> ExtendedMultiSegment:
    """The dual extended multi-segment; π(dual(E)) is the Aubert-Zelevinsky dual of π(E)."""
    for rho, rows in ems.blocks:
        if not is_admissible(rows, prime=True):
            raise InvalidInputError(f"dual needs a (P') order on the {rho.name}-block", cusp=rho.name)
    return ExtendedMultiSegment(
        ems.kind, tuple((rho, dual_rows(rows)) for rho, rows in ems.blocks), ems.strict
    )


def _partial_dual_plus_rows(rows: Rows, k: int) -> Rows | None:
    if not 0 <= k < len(rows) or not is_admissible(rows, prime=True):
        return None
    row = rows[k]
    if row.B != HALF or row.l != 0:
        return None
    alpha = sum(r.a for r in rows[:k])
    if sign_pow(alpha) * row.eta != -1:
        return None
    if any(r.B >= HALF for r in rows[:k]) or any(r.B <= HALF for r in rows[k + 1 :]):
        return None
    below, above = k, len(rows) - k - 1
    beta = sum(r.b for r in rows[k + 1 :])
    try:
        dualized = dual_rows(rows)
        middle = ExtendedSegment(row.A, HALF, 0, sign_pow(beta + 1))
        reflected = dualized[:above] + (middle,) + dualized[above + 1 :]
        if not is_admissible(reflected):
            return None
        back = dual_rows(reflected)
    except (InvalidInputError, VanishingError):
        return None
    pivot = ExtendedSegment(row.A, -HALF, 0, -row.eta)
    if back[below] != pivot:
        logger.warning("Partial dual pivot mismatch: expected %s, found %s", pivot, back[below])
    return back[:below] + (pivot,) + rows[k + 1 :]


def partial_dual_index(rows: Rows) -> int | None:
    """The only position a partial dual can act on: the unique row with B = 1/2."""
    positions = [index for index, row in enumerate(rows) if row.B == HALF]
    return positions[0] if len(positions) == 1 else None


def _partial_dual_rows(rows: Rows, k: int, sign: int) -> Rows | None:
    if sign == 1:
        return _partial_dual_plus_rows(rows, k)
    if not is_admissible(rows, prime=True):
        return None
    try:
        flipped = _partial_dual_plus_rows(dual_rows(rows), k)
        return None if flipped is None else dual_rows(flipped)
    except (InvalidInputError, VanishingError):
        return None


def partial_dual(
    ems: ExtendedMultiSegment, rho: CuspLabel, k: int, sign: int
) -> ExtendedMultiSegment:
    """dual_k^+ (sign = 1) or dual_k^- = dual ∘ dual_k^+ ∘ dual (sign = -1).

    For dual_k^- the index k refers to the order of dual(E). Raises
    NotApplicableError when the hypotheses fail.
    """
    if sign not in (1, -1):
        raise InvalidInputError(f"Partial dual sign must be ±1, got {sign}")
    rows = _block_or_fail(ems, rho)
    if not is_admissible(rows, prime=True):
        raise InvalidInputError(f"The {rho.name}-block is not in a (P') order", cusp=rho.name)
    new_rows = _partial_dual_rows(rows, k, sign)
    if new_rows is None:
        raise NotApplicableError(
            f"dual_{k}^{'+' if sign == 1 else '-'} is not applicable", cusp=rho.name, k=k
        )
    if len(ems.blocks) > 1 and any(
        partial_dual_index(other) is not None for label, other in ems.blocks if label != rho
    ):
        logger.warning(
            "Partial dual on %s while another block also has a row with B = 1/2; "
            "α is computed inside the %s-block only",
            rho.name,
            rho.name,
        )
    try:
        return ems.with_block(rho, new_rows)
    except InvalidInputError as exc:
        raise NotApplicableError(f"Partial dual gives an invalid object: {exc.message}") from exc


def _partial_dual_move(
    ems: ExtendedMultiSegment, rho: CuspLabel, sign: int
) -> tuple[ExtendedMultiSegment, OperatorTag] | None:
    rows = ems.block(rho)
    target = dual_rows(rows) if sign == -1 else rows
    k = partial_dual_index(target)
    if k is None:
        return None
    try:
        result = partial_dual(ems, rho, k, sign)
    except NotApplicableError:
        return None
    kind = OperatorKind.PARTIAL_DUAL_PLUS if sign == 1 else OperatorKind.PARTIAL_DUAL_MINUS
    return result, OperatorTag(kind, rho.name, (k,), None)


# ---------------------------------------------------------------------------
# Raising and lowering moves
# ---------------------------------------------------------------------------


def _keep(result: ExtendedMultiSegment, tag: OperatorTag, source: ExtendedMultiSegment) -> bool:
    if nonvanishing(result):
        return True
    logger.warning("%s on %s produced a vanishing object; move dropped", tag, source)
    return False


def _dualized(moves, kind: OperatorKind):
    out = []
    for result, tag in moves:
        try:
            back = canonical_form(dual(canonical_form(result)))
        except (InvalidInputError, VanishingError):
            continue
        out.append((back, OperatorTag(kind, tag.rho, tag.indices, tag.param)))
    return out


def raising_moves(ems: ExtendedMultiSegment) -> list[tuple[ExtendedMultiSegment, OperatorTag]]:
    """Results of every applicable raising operator, in canonical form.

    Raising operators are the type 3' splits ui^{-1}, dual ∘ ui ∘ dual of any
    type, and dual_k^-.
    """
    source = canonical_form(ems)
    moves = list(splits_all(source))
    dualized = dual(source)
    moves += _dualized(
        [(result, tag) for result, tag, _ in ui_all(dualized)], OperatorKind.DUAL_UI_DUAL
    )
    for rho in source.rhos():
        move = _partial_dual_move(source, rho, -1)
        if move is not None:
            moves.append((canonical_form(move[0]), move[1]))
    return [(result, tag) for result, tag in moves if _keep(result, tag, source)]


def lowering_moves(ems: ExtendedMultiSegment) -> list[tuple[ExtendedMultiSegment, OperatorTag]]:
    """Inverses of the raising operators: ui, dual ∘ ui^{-1} ∘ dual and dual_k^+."""
    source = canonical_form(ems)
    moves = [(canonical_form(result), tag) for result, tag, _ in ui_all(source)]
    moves += _dualized(splits_all(dual(source)), OperatorKind.DUAL_UI_INVERSE_DUAL)
    for rho in source.rhos():
        move = _partial_dual_move(source, rho, 1)
        if move is not None:
            moves.append((canonical_form(move[0]), move[1]))
    return [(result, tag) for result, tag in moves if _keep(result, tag, source)]


def applicable_raising_ops(ems: ExtendedMultiSegment) -> list[OperatorTag]:
    return [tag for _, tag in raising_moves(ems)]


def is_absolutely_maximal(ems: ExtendedMultiSegment) -> bool:
    return not raising_moves(ems)


# ---------------------------------------------------------------------------
# Ω multisets of extended multi-segments
# ---------------------------------------------------------------------------


def omega_ems(ems: ExtendedMultiSegment) -> dict[CuspLabel, Counter]:
    """Ω(E_ρ) = Σ [A_i, B_i]_ρ as multisets of exponents."""
    result: dict[CuspLabel, Counter] = {}
    for rho, rows in ems.blocks:
        bucket = result.setdefault(rho, Counter())
        for row in rows:
            bucket.update(segment_multiset(row.A, row.B))
    return result


def abs_omega(ems: ExtendedMultiSegment) -> dict[CuspLabel, Counter]:
    """|Ω|(E_ρ) = Σ [A_i, |B_i|]_ρ."""
    result: dict[CuspLabel, Counter] = {}
    for rho, rows in ems.blocks:
        bucket = result.setdefault(rho, Counter())
        for row in rows:
            bucket.update(segment_multiset(row.A, abs(row.B)))
    return result


def clear_caches() -> None:
    """Drop the memo tables (tests and long-running API workers)."""
    for cached in (_labelled_orbit, _exchange_closure, canonical_rows, _nonvanishing, _L_witness):
        cached.cache_clear()
