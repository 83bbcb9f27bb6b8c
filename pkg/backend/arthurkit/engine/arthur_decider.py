"""
Deciding whether a good-parity representation is of Arthur type.

Both procedures peel segments off the Langlands data, decide the smaller
representation recursively, and then try to rebuild an extended
multi-segment for π from the intersection set of the smaller one:

* ``is_arthur_type`` removes every copy of the segment with the smallest
  center (π^{ρ,-}) and rebuilds with E^{ρ,+};
* ``is_arthur_type_v2`` removes every segment with the smallest first
  exponent (π_{ρ,-}) and rebuilds with E_{ρ,+}.

The Ω-multiset prefilter answers "definitely not" for inputs that fail the
cheap necessary conditions.
"""

import itertools
import logging
from collections import Counter
from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from ..config import settings
from ..enums import PrefilterVerdict
from ..exceptions import InvalidInputError, InvariantViolation, NotApplicableError, VanishingError
from .core_model import (
    ArthurParameter,
    CuspLabel,
    ExtendedMultiSegment,
    ExtendedSegment,
    LData,
    LSegment,
    SupercuspidalData,
    good_parity_exponent,
    is_supercuspidal,
    omega,
)
from .ems_ops import add, canonical_form, nonvanishing, reorder
from .halfint import HALF, fmt, sign_pow
from .packet_engine import intersection_set, pi_of

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RemovalSpec:
    """r copies of Δ_ρ[x, -y] removed from π to get π^{ρ,-}."""

    rho: CuspLabel
    segment: LSegment
    multiplicity: int

    def __post_init__(self):
        if self.multiplicity < 1:
            raise InvalidInputError("A removal needs at least one copy")

    @property
    def x(self) -> Fraction:
        return self.segment.x

    @property
    def y(self) -> Fraction:
        return -self.segment.y

    @property
    def lowered(self) -> tuple[int, int]:
        """(a, b) of ρ⊗S_{x+y+1}⊗S_{y-x-1}."""
        return int(self.x + self.y) + 1, int(self.y - self.x) - 1

    @property
    def raised(self) -> tuple[int, int]:
        """(a, b) of ρ⊗S_{x+y+1}⊗S_{y-x+1}."""
        return int(self.x + self.y) + 1, int(self.y - self.x) + 1


@dataclass(frozen=True)
class RejectedCandidate:
    """A member of 𝓔(π^{ρ,-}) (or 𝓔(π_{ρ,-})) that did not rebuild π, and the failing step."""

    ems: ExtendedMultiSegment
    reason: str

    def __str__(self) -> str:
        return f"{self.ems}: {self.reason}"


@dataclass(frozen=True)
class ArthurDecision:
    arthur: bool
    members: tuple[ExtendedMultiSegment, ...] = ()
    psis: tuple[ArthurParameter, ...] = ()
    maximal: ExtendedMultiSegment | None = None
    reason: str | None = None
    rejected: tuple[RejectedCandidate, ...] = ()

    @property
    def psi_max(self) -> ArthurParameter | None:
        return self.maximal.psi() if self.maximal is not None else None

    @property
    def witness_count(self) -> int:
        return len(self.members)


# ---------------------------------------------------------------------------
# Good parity and Ω invariants of Langlands data
# ---------------------------------------------------------------------------


def is_good_parity(pi: LData) -> bool:
    for segment in pi.segments:
        if not good_parity_exponent(segment.rho, pi.kind, segment.x):
            return False
    return all(sign != 0 for _, _, sign in pi.tempered.summands)


def _require_good_parity(pi: LData):
    if not is_good_parity(pi):
        raise InvalidInputError("Arthur type is decided for good-parity representations only", ldata=str(pi))


def abs_omega_ldata(pi: LData) -> dict[CuspLabel, Counter]:
    """|Ω|(π)_ρ: the non-negative multiset equivalent to Ω(π)_ρ."""
    result: dict[CuspLabel, Counter] = {}
    for rho, bucket in omega(pi).items():
        folded: Counter = Counter()
        for value, count in bucket.items():
            if value >= 0:
                excess = count - bucket.get(-value - 1, 0)
                if excess > 0:
                    folded[value] = excess
        result[rho] = folded
    return result


def _omega_asymmetry(pi: LData) -> str | None:
    for rho, bucket in omega(pi).items():
        for value, count in sorted(bucket.items()):
            if value < 0 and count > bucket.get(-value - 1, 0):
                return (
                    f"Ω(π)_{rho.name} has more copies of |.|^{fmt(value)} "
                    f"than of |.|^{fmt(-value - 1)}"
                )
    return None


# ---------------------------------------------------------------------------
# π^{ρ,-} and π_{ρ,-}
# ---------------------------------------------------------------------------


def _choose_rho(pi: LData, rho_order: Sequence[str] | None) -> CuspLabel:
    present = sorted({segment.rho for segment in pi.segments})
    if rho_order:
        rank = {name: index for index, name in enumerate(rho_order)}
        present.sort(key=lambda rho: (rank.get(rho.name, len(rank)), rho.name))
    return present[0]


def _rho_segments(pi: LData, rho: CuspLabel) -> list[LSegment]:
    segments = pi.rho_segments(rho)
    if not segments:
        raise InvalidInputError(f"π has no {rho.name}-segment", ldata=str(pi))
    return segments


def pi_rho_minus_upper(pi: LData, rho: CuspLabel) -> tuple[LData, RemovalSpec]:
    """π^{ρ,-}: drop every copy of the smallest-center ρ-segment with minimal x."""
    segments = _rho_segments(pi, rho)
    lowest = min(s.x + s.y for s in segments)
    x = min(s.x for s in segments if s.x + s.y == lowest)
    target = LSegment(rho, x, lowest - x)
    count = segments.count(target)
    return LData(tuple(s for s in pi.segments if s != target), pi.tempered), RemovalSpec(rho, target, count)


def pi_rho_minus_lower(pi: LData, rho: CuspLabel) -> tuple[LData, list[LSegment]]:
    """π_{ρ,-}: drop every ρ-segment whose first exponent is minimal."""
    segments = _rho_segments(pi, rho)
    x = min(s.x for s in segments)
    removed = [s for s in segments if s.x == x]
    kept = tuple(s for s in pi.segments if not (s.rho == rho and s.x == x))
    return LData(kept, pi.tempered), removed


# ---------------------------------------------------------------------------
# Rebuilding along π^{ρ,-}
# ---------------------------------------------------------------------------


def _upper_filter_failure(psi: ArthurParameter, spec: RemovalSpec) -> str | None:
    a_low, b_low = spec.lowered
    a_top, b_top = spec.raised
    name = spec.rho.name
    if b_low > 0 and psi.multiplicity(spec.rho, a_low, b_low) < spec.multiplicity:
        return f"ψ has fewer than {spec.multiplicity} copies of {name}⊗S{a_low}⊗S{b_low}"
    for summand in psi.restrict(spec.rho):
        if summand.b > b_top:
            return f"ψ contains {name}⊗S{summand.a}⊗S{summand.b} with b > {b_top}"
        if summand.b == b_top and summand.a <= a_top:
            return f"ψ contains {name}⊗S{summand.a}⊗S{summand.b} with a ≤ {a_top}"
    return None


def _passes_upper(psi: ArthurParameter, spec: RemovalSpec) -> bool:
    return _upper_filter_failure(psi, spec) is None


def candidate_filter_upper(
    emss: Sequence[ExtendedMultiSegment], spec: RemovalSpec
) -> list[ExtendedMultiSegment]:
    """Members whose parameter lies in Ψ(π^{ρ,-}; Δ_ρ[x,-y], r)."""
    return [ems for ems in emss if _passes_upper(ems.psi(), spec)]


Placement = tuple[ExtendedMultiSegment | None, str]


def _checked(build: Callable[[], ExtendedMultiSegment]) -> Placement:
    try:
        result = build()
    except (VanishingError, NotApplicableError, InvalidInputError) as exc:
        return None, exc.message
    if not nonvanishing(result):
        return None, f"{result} vanishes"
    return result, ""


def _upper_placements(ems: ExtendedMultiSegment, spec: RemovalSpec) -> Iterator[Placement]:
    """E^{ρ,+} over the admissible placements, the (P') one first; (None, why) for zero ones."""
    rho, x, y, r = spec.rho, spec.x, spec.y, spec.multiplicity
    rows = canonical_form(ems).block(rho)
    if y - x == 1:
        inserted = (ExtendedSegment(x + 1, x, 1, 1),) * r
        # after every circle [x, x] first, then ahead of them
        cuts = dict.fromkeys(sum(1 for row in rows if row.B <= bound) for bound in (x, x - 1))
        for cut in cuts:
            yield _checked(lambda cut=cut: ems.with_block(rho, rows[:cut] + inserted + rows[cut:]))
        return
    target = (y - 1, x + 1)
    head = [i for i, row in enumerate(rows) if row.B < x + 1]
    group = [i for i, row in enumerate(rows) if row.B == x + 1]
    tail = [i for i, row in enumerate(rows) if row.B > x + 1]
    if sum(1 for i in group if rows[i].segment == target) < r:
        raise NotApplicableError(f"E has fewer than {r} rows [{fmt(y - 1)},{fmt(x + 1)}]", ems=str(ems))
    preferred = sorted(group, key=lambda i: (rows[i].segment != target, rows[i].A, i))
    orders = itertools.chain(
        [tuple(preferred)],
        (p for p in itertools.permutations(group) if all(rows[i].segment == target for i in p[:r])),
    )

    def build(order: tuple[int, ...]) -> ExtendedMultiSegment:
        result = ems.with_block(rho, reorder(rows, head + list(order) + tail))
        for j in range(len(head), len(head) + r):
            result = add(result, rho, j, 1)
        return result

    for order in itertools.islice(orders, settings.placement_budget):
        yield _checked(lambda order=order: build(order))


def e_rho_plus(ems: ExtendedMultiSegment, spec: RemovalSpec) -> ExtendedMultiSegment:
    """E^{ρ,+} for a member of the filtered set, in (P') order.

    Raises VanishingError when every placement is zero and NotApplicableError
    when E lacks the rows add^1 needs.
    """
    for result, _ in _upper_placements(ems, spec):
        if result is not None:
            return result
    raise VanishingError("E^{ρ,+} vanishes", ems=str(ems), removed=spec.segment.pretty())


# ---------------------------------------------------------------------------
# Rebuilding along π_{ρ,-}
# ---------------------------------------------------------------------------


def _lowered_parameter(rho: CuspLabel, removed: Sequence[LSegment]) -> Counter:
    """ψ_{ρ,-} as counts of (a, b); segments Δ[x,-x-1] contribute nothing."""
    counts: Counter = Counter()
    for segment in removed:
        a, b = segment.length, int(-segment.y - segment.x) - 1
        if b > 0:
            counts[(a, b)] += 1
    return counts


def _lower_filter_failure(psi: ArthurParameter, rho: CuspLabel, x: Fraction, wanted: Counter) -> str | None:
    for (a, b), count in sorted(wanted.items()):
        if psi.multiplicity(rho, a, b) < count:
            return f"ψ has fewer than {count} copies of {rho.name}⊗S{a}⊗S{b}"
    for s in psi.restrict(rho):
        if s.a - s.b <= 2 * x and s.b != 1:
            return f"ψ contains {rho.name}⊗S{s.a}⊗S{s.b} with b > 1 and (a - b)/2 ≤ {fmt(x)}"
    return None


def _passes_lower(psi: ArthurParameter, rho: CuspLabel, x: Fraction, wanted: Counter) -> bool:
    return _lower_filter_failure(psi, rho, x, wanted) is None


def candidate_filter_lower(
    emss: Sequence[ExtendedMultiSegment], rho: CuspLabel, removed: Sequence[LSegment]
) -> list[ExtendedMultiSegment]:
    """Members whose parameter lies in Ψ(π_{ρ,-}; Δ_{ρ,-})."""
    x = min(segment.x for segment in removed)
    wanted = _lowered_parameter(rho, removed)
    return [ems for ems in emss if _passes_lower(ems.psi(), rho, x, wanted)]


def e_rho_plus_lower(
    ems: ExtendedMultiSegment, rho: CuspLabel, removed: Sequence[LSegment]
) -> ExtendedMultiSegment:
    """E_{ρ,+}: circles at or below x, m inserted ([x+1,x],1,1), add^1 on the lowered rows, the rest."""
    x = min(segment.x for segment in removed)
    wanted = _lowered_parameter(rho, removed)
    targets = Counter({(Fraction(a + b, 2) - 1, Fraction(a - b, 2)): count for (a, b), count in wanted.items()})
    inserts = sum(1 for segment in removed if segment.y == -x - 1)
    rows = canonical_form(ems).block(rho)
    order = sorted(
        range(len(rows)),
        key=lambda i: (rows[i].B, rows[i].segment not in targets, rows[i].A, i),
    )
    moved = reorder(rows, order)
    head = [row for row in moved if row.B <= x]
    lifted: list[ExtendedSegment] = []
    remaining = Counter(targets)
    for row in moved[len(head) :]:
        if remaining[row.segment] > 0:
            remaining[row.segment] -= 1
            lifted.append(row.replace(A=row.A + 1, B=row.B - 1, l=row.l + 1))
        else:
            lifted.append(row)
    if +remaining:
        raise NotApplicableError("E lacks the rows of ψ_{ρ,-}", ems=str(ems))
    inserted = [ExtendedSegment(x + 1, x, 1, 1)] * inserts
    result = ems.with_block(rho, head + inserted + lifted)
    if not nonvanishing(result):
        raise VanishingError("E_{ρ,+} vanishes", ems=str(ems))
    return result


# ---------------------------------------------------------------------------
# Tempered base case
# ---------------------------------------------------------------------------


def tempered_ems(pi: LData) -> ExtendedMultiSegment:
    """Rows ([z, z], 0, ε(ρ⊗S_{2z+1})) with z increasing."""
    if not pi.is_tempered:
        raise InvalidInputError("π is not tempered", ldata=str(pi))
    blocks: dict[CuspLabel, list[ExtendedSegment]] = {}
    for rho, a, sign in sorted(pi.tempered.summands, key=lambda t: (t[0].name, t[1])):
        z = Fraction(a - 1, 2)
        blocks.setdefault(rho, []).append(ExtendedSegment(z, z, 0, sign))
    return ExtendedMultiSegment(pi.kind, tuple((rho, tuple(rows)) for rho, rows in blocks.items()))


def _decided(ems: ExtendedMultiSegment) -> ArthurDecision:
    found = intersection_set(ems)
    return ArthurDecision(True, tuple(found.members), tuple(found.psis), found.maximal)


# ---------------------------------------------------------------------------
# Hooks on positive decisions
# ---------------------------------------------------------------------------


def check_top_copies(decision: ArthurDecision, spec: RemovalSpec):
    """ψ^max(π) carries exactly r copies of ρ⊗S_{x+y+1}⊗S_{y-x+1}."""
    a, b = spec.raised
    found = decision.psi_max.multiplicity(spec.rho, a, b)
    if found != spec.multiplicity:
        raise InvariantViolation(
            f"ψ^max carries {found} copies of {spec.rho.name}⊗S{a}⊗S{b}, expected {spec.multiplicity}"
        )


def forced_tempered_rows(pi: LData) -> dict[CuspLabel, list[ExtendedSegment]]:
    """Circles every absolutely maximal E of π must contain (multiplicity-one top exponents)."""
    forced: dict[CuspLabel, list[ExtendedSegment]] = {}
    for rho, bucket in omega(pi).items():
        ceiling = max([-s.y for s in pi.rho_segments(rho)] + [Fraction(0)])
        above = {value: count for value, count in bucket.items() if value > ceiling}
        if not above or any(count > 1 for count in above.values()):
            continue
        rows = []
        for z in sorted(above):
            sign = pi.tempered.eps(rho, int(2 * z) + 1)
            if sign is None:
                break
            rows.append(ExtendedSegment(z, z, 0, sign))
        else:
            forced[rho] = rows
    return forced


def check_tempered_forcing(pi: LData, top: ExtendedMultiSegment):
    for rho, rows in forced_tempered_rows(pi).items():
        block = top.block(rho)
        missing = [row for row in rows if row not in block]
        if missing:
            raise InvariantViolation(
                "The absolutely maximal member lacks forced circles",
                cusp=rho.name,
                missing=[str(row) for row in missing],
            )


# ---------------------------------------------------------------------------
# Prefilter
# ---------------------------------------------------------------------------


def prefilter_not_arthur(
    pi: LData, rho_order: Sequence[str] | None = None
) -> tuple[PrefilterVerdict, str | None]:
    """definitelyNot when an Ω-invariant rules π out; never wrong in that direction."""
    _require_good_parity(pi)
    current = pi
    while True:
        reason = _omega_asymmetry(current)
        if reason:
            return PrefilterVerdict.DEFINITELY_NOT, reason
        if current.is_tempered:
            return PrefilterVerdict.UNKNOWN, None
        rho = _choose_rho(current, rho_order)
        lower, spec = pi_rho_minus_upper(current, rho)
        if spec.y - spec.x != 1:
            folded = abs_omega_ldata(lower).get(rho, Counter())
            z = abs(spec.x + 1)
            while z <= spec.y - 1:
                if folded.get(z, 0) < spec.multiplicity:
                    return PrefilterVerdict.DEFINITELY_NOT, (
                        f"|Ω|(π^{{{rho.name},-}}) has fewer than {spec.multiplicity} "
                        f"copies of |.|^{fmt(z)} needed by {spec.segment.pretty()}"
                    )
                z += 1
        current = lower


# ---------------------------------------------------------------------------
# Condition (A) on ladders of characters
# ---------------------------------------------------------------------------


def ladder_multiplicities(pi: LData, sc: SupercuspidalData) -> dict[CuspLabel, Counter]:
    """m_{ρ,x} for π = L(Δ_ρ[-x,-x]^{m}; π_sc); InvalidInputError for other shapes."""
    if pi.tempered != sc.rep:
        raise InvalidInputError("The tempered part of π is not the given supercuspidal")
    result: dict[CuspLabel, Counter] = {}
    for segment in pi.segments:
        if segment.length != 1:
            raise InvalidInputError(f"{segment.pretty()} is not a character", segment=segment.pretty())
        result.setdefault(segment.rho, Counter())[-segment.x] += 1
    return result


def condition_A(pi: LData, sc: SupercuspidalData) -> bool:
    """Monotonicity of ⌊m_x/2⌋ up to α and of m_x beyond α, per ρ."""
    for rho, m in ladder_multiplicities(pi, sc).items():
        alpha = sc.alpha(rho)
        for x in m:
            if not good_parity_exponent(rho, sc.kind, x) or x < HALF:
                raise InvalidInputError(f"Δ[-{fmt(x)},-{fmt(x)}] is not of good parity above π_sc")
        x = max(m)
        while x >= 1:
            if x <= alpha:
                if m.get(x, 0) // 2 > m.get(x - 1, 0) // 2:
                    return False
            elif m.get(x, 0) > m.get(x - 1, 0):
                return False
            x -= 1
    return True


def _is_ladder(pi: LData) -> bool:
    return (
        not pi.is_tempered
        and all(s.length == 1 and s.x < 0 for s in pi.segments)
        and is_supercuspidal(pi.tempered)
    )


# ---------------------------------------------------------------------------
# The two decision procedures
# ---------------------------------------------------------------------------


def _mismatch(pi: LData, candidate: ExtendedMultiSegment) -> str | None:
    try:
        found = pi_of(candidate)
    except VanishingError:
        return f"π({candidate}) = 0"
    return None if found == pi else f"π({candidate}) = {found.pretty(ascii_only=True)}"


def _rebuild(
    pi: LData,
    members: Sequence[ExtendedMultiSegment],
    filter_failure: Callable[[ArthurParameter], str | None],
    placements: Callable[[ExtendedMultiSegment], Iterator[Placement]],
) -> tuple[ExtendedMultiSegment | None, list[RejectedCandidate]]:
    """First rebuilt E with π(E) = π, with every member tried before it and why it failed."""
    rejected: list[RejectedCandidate] = []
    for member in members:
        failure = filter_failure(member.psi())
        if failure is not None:
            rejected.append(RejectedCandidate(member, failure))
            continue
        reasons: list[str] = []
        seen: set[ExtendedMultiSegment] = set()
        try:
            for raised, why in placements(member):
                if raised is None:
                    reasons.append(why)
                    continue
                if raised in seen:
                    continue
                seen.add(raised)
                mismatch = _mismatch(pi, raised)
                if mismatch is None:
                    return raised, rejected
                reasons.append(mismatch)
        except NotApplicableError as exc:
            reasons.append(exc.message)
        rejected.append(RejectedCandidate(member, "; ".join(dict.fromkeys(reasons)) or "no admissible placement"))
    return None, rejected


def _negative(reason: str, rejected: Sequence[RejectedCandidate]) -> ArthurDecision:
    return ArthurDecision(False, reason=reason, rejected=tuple(rejected))


@lru_cache(maxsize=2048)
def _decide_upper(pi: LData, rho_order: tuple[str, ...] | None) -> ArthurDecision:
    if pi.is_tempered:
        return _decided(tempered_ems(pi))
    rho = _choose_rho(pi, rho_order)
    lower, spec = pi_rho_minus_upper(pi, rho)
    smaller = _decide_upper(lower, rho_order)
    if not smaller.arthur:
        return _negative(f"π^{{{rho.name},-}} is not of Arthur type: {smaller.reason}", smaller.rejected)
    raised, rejected = _rebuild(
        pi,
        smaller.members,
        lambda psi: _upper_filter_failure(psi, spec),
        lambda member: _upper_placements(member, spec),
    )
    passed = len(candidate_filter_upper(smaller.members, spec))
    logger.debug("%d of %d members pass the filter for %s", passed, smaller.witness_count, spec.segment.pretty())
    if raised is None:
        empty = f"Ψ(π^{{{rho.name},-}}; {spec.segment.pretty()}, {spec.multiplicity}) is empty"
        if passed:
            logger.warning("%d filtered members of 𝓔(π^{%s,-}) fail to rebuild π", passed, rho.name)
            empty = f"no E^{{{rho.name},+}} reproduces π ({passed} filtered candidates)"
        return _negative(empty, rejected)
    decision = _decided(raised)
    check_top_copies(decision, spec)
    check_tempered_forcing(pi, decision.maximal)
    return decision


@lru_cache(maxsize=2048)
def _decide_lower(pi: LData, rho_order: tuple[str, ...] | None) -> ArthurDecision:
    if pi.is_tempered:
        return _decided(tempered_ems(pi))
    rho = _choose_rho(pi, rho_order)
    lower, removed = pi_rho_minus_lower(pi, rho)
    smaller = _decide_lower(lower, rho_order)
    if not smaller.arthur:
        return _negative(f"π_{{{rho.name},-}} is not of Arthur type: {smaller.reason}", smaller.rejected)
    x = min(segment.x for segment in removed)
    wanted = _lowered_parameter(rho, removed)
    raised, rejected = _rebuild(
        pi,
        smaller.members,
        lambda psi: _lower_filter_failure(psi, rho, x, wanted),
        lambda member: iter([_checked(lambda: e_rho_plus_lower(member, rho, removed))]),
    )
    if raised is None:
        passed = len(candidate_filter_lower(smaller.members, rho, removed))
        empty = f"Ψ(π_{{{rho.name},-}}; Δ_{{{rho.name},-}}) is empty"
        if passed:
            logger.warning("%d filtered members of 𝓔(π_{%s,-}) fail to rebuild π", passed, rho.name)
            empty = f"no E_{{{rho.name},+}} reproduces π ({passed} filtered candidates)"
        return _negative(empty, rejected)
    return _decided(raised)


def is_arthur_type(
    pi: LData, rho_order: Sequence[str] | None = None, use_prefilter: bool = True
) -> ArthurDecision:
    """Decide Arthur type along π^{ρ,-}; on success the members are 𝓔(π)."""
    _require_good_parity(pi)
    if use_prefilter:
        verdict, reason = prefilter_not_arthur(pi, rho_order)
        if verdict == PrefilterVerdict.DEFINITELY_NOT:
            return ArthurDecision(False, reason=reason)
        if _is_ladder(pi) and not condition_A(pi, SupercuspidalData(pi.tempered)):
            return ArthurDecision(False, reason="condition (A) fails")
    decision = _decide_upper(pi, tuple(rho_order) if rho_order else None)
    logger.info("Arthur type %s for %s", decision.arthur, pi.pretty(ascii_only=True))
    return decision


def is_arthur_type_v2(pi: LData, rho_order: Sequence[str] | None = None) -> ArthurDecision:
    """Decide Arthur type along π_{ρ,-}; agrees with :func:`is_arthur_type`."""
    _require_good_parity(pi)
    return _decide_lower(pi, tuple(rho_order) if rho_order else None)


# ---------------------------------------------------------------------------
# Moving a witness between supercuspidal bases
# ---------------------------------------------------------------------------


def reduce_to_critical(
    witness: ExtendedMultiSegment,
    sc: SupercuspidalData,
    sc_prime: SupercuspidalData,
    rho: CuspLabel,
    fused: bool = False,
) -> ExtendedMultiSegment:
    """Transport π(S, σ') = π(witness) to a witness of π(S, σ) when α' ≤ α.

    The ρ-block gains the circles ([z,z], 0, (-1)^{z-ε}η) for α' ≤ z ≤ α-1,
    or their union ([α-1, α'], 0, (-1)^{α'-ε}η) when ``fused``; the other
    blocks are those of σ.
    """
    alpha, alpha_prime = sc.alpha(rho), sc_prime.alpha(rho)
    if alpha_prime > alpha:
        raise InvalidInputError(
            f"α' = {fmt(alpha_prime)} exceeds α = {fmt(alpha)}", alpha=fmt(alpha), alpha_prime=fmt(alpha_prime)
        )
    eps = rho.epsilon(sc.kind)
    eta = sc.rep.eps(rho, int(2 * eps) + 1)
    base = tempered_ems(LData((), sc.rep))
    rows = list(canonical_form(witness).block(rho))
    if alpha_prime < alpha:
        if eta is None:
            raise InvalidInputError(f"σ has no {rho.name}-chain to extend")
        if fused:
            rows.append(ExtendedSegment(alpha - 1, alpha_prime, 0, sign_pow(alpha_prime - eps) * eta))
        else:
            z = alpha_prime
            while z <= alpha - 1:
                rows.append(ExtendedSegment(z, z, 0, sign_pow(z - eps) * eta))
                z += 1
    result = base.with_block(rho, canonical_form(ExtendedMultiSegment.single(sc.kind, rho, rows, strict=False)).block(rho))
    if not nonvanishing(result):
        raise InvariantViolation("The transported witness vanishes", ems=str(result))
    return result


def clear_caches() -> None:
    _decide_upper.cache_clear()
    _decide_lower.cache_clear()
