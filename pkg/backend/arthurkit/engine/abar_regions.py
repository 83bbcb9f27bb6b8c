"""
Regions of the closure Π_Ā along one ρ-line.

For every good-parity Arthur base π_A of corank s and every ordered tuple of
Speh shapes ψ = ((a_1,b_1), …) with Σ a_i b_i = r' - s, the reducibility
hyperplanes cut ℝ^{l(ψ)} into open chambers. Chambers are then glued by the
rules below; the classes reaching a point (ℝ⁰, ∅, π_A') form R_Ā.

- unbounded chambers are equivalent to -1;
- meeting x_i = 0 drops the i-th factor;
- meeting x_i = t at a good-parity point absorbs the factor into the base,
  or sends the chamber to -1 when the enlarged base is not of Arthur type;
- meeting x_i = ±x_j for equal shapes drops both factors when |y_i| < ½
  and sends the chamber to -1 when |y_i| > ½.
"""

import logging
import math
import random
from collections.abc import Iterator, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from ..config import settings
from ..enums import AbarVerdict
from ..exceptions import InvalidInputError, OracleMissError
from .arthur_decider import is_arthur_type
from .core_model import (
    CuspLabel,
    EnhancedTempered,
    LData,
    LSegment,
    SpehSymbol,
    SupercuspidalData,
    good_parity_exponent,
)
from .corank_engine import enumerate_arthur_gp
from .halfint import HALF, fmt
from .oracle import DefaultOracle, ReducibilityOracle
from .polyhedra import Hyperplane, System, chambers

logger = logging.getLogger(__name__)

Shape = tuple[int, int]
Shapes = tuple[Shape, ...]
RegionKey = tuple[Shapes, LData, tuple[int, ...]]
NEGATIVE: RegionKey = ((), None, (-1,))  # type: ignore[assignment]


def speh_shapes(n: int) -> Iterator[Shapes]:
    """Ordered tuples ((a_1,b_1), …) of positive pairs with Σ a_i b_i = n."""
    if n == 0:
        yield ()
        return
    for part in range(1, n + 1):
        for a in range(1, part + 1):
            if part % a:
                continue
            for rest in speh_shapes(n - part):
                yield ((a, part // a), *rest)


@dataclass(eq=False)
class RegionTriple:
    """(C, ψ, π_A) with C given by its sign vector over the arrangement walls."""

    shapes: Shapes
    base: LData
    base_corank: int
    signs: tuple[int, ...]
    system: System
    bounded: bool
    witness: tuple[Fraction, ...]

    @property
    def key(self) -> RegionKey:
        return (self.shapes, self.base, self.signs)

    @property
    def corank(self) -> int:
        return self.base_corank + sum(a * b for a, b in self.shapes)

    @property
    def dim(self) -> int:
        return len(self.shapes)


@dataclass
class Arrangement:
    shapes: Shapes
    base: LData
    hyperplanes: list[Hyperplane]
    triples: list[RegionTriple]

    def locate(self, point: Sequence[Fraction]) -> RegionTriple | None:
        """The chamber containing ``point``; None on a wall."""
        if not self.shapes:
            return self.triples[0]
        signs = tuple(h.side(point) for h in self.hyperplanes)
        if 0 in signs:
            return None
        for triple in self.triples:
            if triple.signs == signs:
                return triple
        return None

    def walls_through(self, point: Sequence[Fraction]) -> list[str]:
        return [str(h) for h in self.hyperplanes if h.side(point) == 0]


@dataclass
class RegionSet:
    """Step-2 output: every arrangement over every base of corank ≤ r."""

    sc: SupercuspidalData
    rho: CuspLabel
    r: int
    oracle: ReducibilityOracle
    omega: dict[LData, int] = field(default_factory=dict)
    arrangements: dict[tuple[Shapes, LData], Arrangement] = field(default_factory=dict)
    misses: list[dict] = field(default_factory=list)

    @property
    def alpha(self) -> Fraction:
        return self.sc.alpha(self.rho)

    @property
    def triples(self) -> list[RegionTriple]:
        return [t for arrangement in self.arrangements.values() for t in arrangement.triples]

    def arrangement(self, shapes: Shapes, base: LData) -> Arrangement | None:
        return self.arrangements.get((shapes, base))


def _walls(oracle: ReducibilityOracle, rho: CuspLabel, shapes: Shapes, base: LData) -> list[Hyperplane]:
    dim = len(shapes)
    walls: list[Hyperplane] = []
    for i, (a, b) in enumerate(shapes):
        for t in sorted(oracle.query1(rho, a, b, base)):
            walls.append(Hyperplane.coordinate(dim, i, t))
    for i in range(dim):
        for j in range(i + 1, dim):
            for t in sorted(oracle.query2(rho, shapes[i], shapes[j])):
                walls.append(Hyperplane.pair(dim, i, j, -1, t))
                walls.append(Hyperplane.pair(dim, i, j, 1, t))
    distinct: list[Hyperplane] = []
    for wall in walls:
        if wall not in distinct:
            distinct.append(wall)
    return distinct


def _arrangement(
    oracle: ReducibilityOracle, rho: CuspLabel, shapes: Shapes, base: LData, s: int
) -> Arrangement:
    if not shapes:
        origin = RegionTriple((), base, s, (), System(0), True, ())
        return Arrangement((), base, [], [origin])
    walls = _walls(oracle, rho, shapes, base)
    triples = []
    for signs, system in chambers(walls, len(shapes)):
        witness = system.witness()
        if witness is None:
            raise InvalidInputError("A feasible chamber produced no interior point", shapes=list(shapes))
        triples.append(RegionTriple(shapes, base, s, signs, system, system.bounded(), witness))
    return Arrangement(shapes, base, walls, triples)


def build_arrangement(
    sc: SupercuspidalData,
    rho: CuspLabel,
    r: int,
    oracle: ReducibilityOracle | None = None,
    strict: bool = True,
) -> RegionSet:
    """All triples (C, ψ, π_A) for 0 ≤ s ≤ r' ≤ r.

    With ``strict`` an unsupported oracle query aborts the build; otherwise
    the arrangement is skipped and the query is recorded in ``misses``.
    """
    if r < 0:
        raise InvalidInputError("The corank must be non-negative", corank=r)
    oracle = oracle or DefaultOracle()
    regions = RegionSet(sc, rho, r, oracle)
    jobs: list[tuple[Shapes, LData, int]] = []
    for s in range(r + 1):
        for entry in enumerate_arthur_gp(sc, rho, s):
            regions.omega[entry.ldata] = s
            for n in range(r - s + 1):
                for shapes in speh_shapes(n):
                    jobs.append((shapes, entry.ldata, s))

    def run(job: tuple[Shapes, LData, int]) -> Arrangement | OracleMissError:
        shapes, base, s = job
        try:
            return _arrangement(oracle, rho, shapes, base, s)
        except OracleMissError as exc:
            if strict:
                raise
            return exc

    if settings.threads > 1:
        with ThreadPoolExecutor(max_workers=settings.threads) as executor:
            results = list(executor.map(run, jobs))
    else:
        results = [run(job) for job in jobs]
    for (shapes, base, _), result in zip(jobs, results, strict=True):
        if isinstance(result, OracleMissError):
            regions.misses.append({"shapes": [list(p) for p in shapes], "base": str(base), **result.to_dict()})
            continue
        regions.arrangements[(shapes, base)] = result
    logger.info(
        "Built %d arrangements with %d triples (%d unsupported)",
        len(regions.arrangements),
        len(regions.triples),
        len(regions.misses),
    )
    return regions


# ---------------------------------------------------------------------------
# Equivalence contraction
# ---------------------------------------------------------------------------


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, item):
        self.parent.setdefault(item, item)
        root = item
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[item] != root:
            self.parent[item], item = root, self.parent[item]
        return root

    def union(self, first, second):
        a, b = self.find(first), self.find(second)
        if a != b:
            self.parent[max(a, b, key=repr)] = min(a, b, key=repr)


@dataclass
class AbarResult:
    regions: RegionSet
    classes: dict[RegionKey, RegionKey]
    in_abar: set[RegionKey]
    negative: set[RegionKey]
    conflicts: set[RegionKey]
    notes: list[str] = field(default_factory=list)

    def verdict(self, triple: RegionTriple) -> str:
        if triple.key in self.conflicts:
            return "conflict"
        if triple.key in self.in_abar:
            return AbarVerdict.IN_ABAR.value
        if triple.key in self.negative:
            return "equivalentToMinusOne"
        return "indeterminateUnitarity"

    def abar_triples(self) -> list[RegionTriple]:
        return [t for t in self.regions.triples if t.key in self.in_abar]


def _unit(dim: int, i: int) -> list[Fraction]:
    form = [Fraction(0)] * dim
    form[i] = Fraction(1)
    return form


def _inside(lo: Fraction | None, hi: Fraction | None, t: Fraction) -> bool:
    return (lo is None or lo < t) and (hi is None or t < hi)


def _drop(point: Sequence[Fraction], *indices: int) -> tuple[Fraction, ...]:
    return tuple(p for k, p in enumerate(point) if k not in indices)


def _shapes_without(shapes: Shapes, *indices: int) -> Shapes:
    return tuple(p for k, p in enumerate(shapes) if k not in indices)


def _good_points(alpha: Fraction, shape: Shape, lo: Fraction, hi: Fraction) -> list[Fraction]:
    """t ∈ α + (a+b)/2 + ℤ strictly between lo and hi."""
    offset = alpha + Fraction(shape[0] + shape[1], 2)
    t = offset + math.floor(lo - offset) + 1
    points = []
    while t < hi:
        if t > lo:
            points.append(t)
        t += 1
    return points


class _Contraction:
    def __init__(self, regions: RegionSet):
        self.regions = regions
        self.uf = _UnionFind()
        self.notes: list[str] = []

    def target(self, shapes: Shapes, base: LData, point: Sequence[Fraction], source: RegionTriple) -> RegionKey | None:
        arrangement = self.regions.arrangement(shapes, base)
        if arrangement is None:
            self.notes.append(f"no arrangement for {list(shapes)} over {base}; rule skipped for {source.signs}")
            return None
        found = arrangement.locate(point)
        if found is None:
            self.notes.append(
                f"point {[fmt(p) for p in point]} lies on {arrangement.walls_through(point)}; rule skipped"
            )
            return None
        return found.key

    def link(self, triple: RegionTriple, key: RegionKey | None):
        if key is not None:
            self.uf.union(triple.key, key)

    def drop_zero(self, triple: RegionTriple):
        for i in range(triple.dim):
            lo, hi = triple.system.project(_unit(triple.dim, i))
            if not _inside(lo, hi, Fraction(0)):
                continue
            point = triple.system.with_equality(_unit(triple.dim, i), Fraction(0)).witness()
            if point is None:
                self.notes.append(f"no witness on x{i + 1} = 0 for {triple.signs}")
                continue
            self.link(triple, self.target(_shapes_without(triple.shapes, i), triple.base, _drop(point, i), triple))

    def absorb(self, triple: RegionTriple):
        regions = self.regions
        if triple.corank > regions.r:
            return
        for i, shape in enumerate(triple.shapes):
            lo, hi = triple.system.project(_unit(triple.dim, i))
            for t in _good_points(regions.alpha, shape, lo, hi):
                try:
                    enlarged = regions.oracle.ldata_of_irreducible_induction(
                        SpehSymbol(regions.rho, shape[0], shape[1], t), triple.base
                    )
                except (OracleMissError, InvalidInputError) as exc:
                    self.notes.append(f"indeterminate absorption at x{i + 1} = {fmt(t)}: {exc.message}")
                    continue
                if enlarged not in regions.omega:
                    self.uf.union(triple.key, NEGATIVE)
                    continue
                point = triple.system.with_equality(_unit(triple.dim, i), t).witness()
                if point is None:
                    continue
                self.link(triple, self.target(_shapes_without(triple.shapes, i), enlarged, _drop(point, i), triple))

    def pair_off(self, triple: RegionTriple):
        for i in range(triple.dim):
            for j in range(i + 1, triple.dim):
                if triple.shapes[i] != triple.shapes[j]:
                    continue
                for sign in (-1, 1):
                    form = _unit(triple.dim, i)
                    form[j] = Fraction(sign)
                    lo, hi = triple.system.project(form)
                    if not _inside(lo, hi, Fraction(0)):
                        continue
                    point = triple.system.with_equality(form, Fraction(0)).witness()
                    if point is None:
                        continue
                    size = abs(point[i])
                    if size > HALF:
                        self.uf.union(triple.key, NEGATIVE)
                    elif size < HALF:
                        rest = _shapes_without(triple.shapes, i, j)
                        self.link(triple, self.target(rest, triple.base, _drop(point, i, j), triple))
                    else:
                        self.notes.append(f"witness with |y{i + 1}| = 1/2 for {triple.signs}; rule skipped")

    def run(self, order: list[RegionTriple]):
        for triple in order:
            self.uf.find(triple.key)
            if not triple.shapes:
                continue
            if not triple.bounded:
                self.uf.union(triple.key, NEGATIVE)
                continue
            self.drop_zero(triple)
            self.absorb(triple)
            self.pair_off(triple)


def contract_equivalence(regions: RegionSet, seed: int | None = None) -> AbarResult:
    """Close the gluing rules with union-find and read off R_Ā.

    Unbounded chambers only get the -1 rule. ``seed`` shuffles the order the
    triples are visited in; the resulting classes do not depend on it.
    """
    order = list(regions.triples)
    if seed is not None:
        random.Random(seed).shuffle(order)
    contraction = _Contraction(regions)
    contraction.run(order)
    uf = contraction.uf
    negative_root = uf.find(NEGATIVE)
    origin_roots = {uf.find(t.key) for t in regions.triples if not t.shapes}
    classes = {t.key: uf.find(t.key) for t in regions.triples}
    conflicts = {key for key, root in classes.items() if root == negative_root and root in origin_roots}
    if conflicts:
        logger.warning("%d triples are glued both to -1 and to an Arthur base", len(conflicts))
    in_abar = {key for key, root in classes.items() if root in origin_roots and key not in conflicts}
    negative = {key for key, root in classes.items() if root == negative_root and key not in conflicts}
    logger.info(
        "R_Ā has %d of %d triples; %d equivalent to -1", len(in_abar), len(classes), len(negative)
    )
    return AbarResult(regions, classes, in_abar, negative, conflicts, contraction.notes)


def abar_membership(
    result: AbarResult, shapes: Shapes, base: LData, point: Sequence[Fraction]
) -> tuple[AbarVerdict, dict]:
    """Locate ×u_ρ(a_i,b_i)|·|^{y_i} ⋊ π_A among the chambers of ``result``."""
    shapes = tuple(tuple(p) for p in shapes)
    if len(point) != len(shapes):
        raise InvalidInputError("The point needs one coordinate per Speh factor", shapes=len(shapes), point=len(point))
    arrangement = result.regions.arrangement(shapes, base)
    if arrangement is None:
        return AbarVerdict.UNKNOWN, {"reason": "no arrangement for this shape and base"}
    triple = arrangement.locate(point)
    if triple is None:
        return AbarVerdict.UNKNOWN, {"reason": "point on a wall", "walls": arrangement.walls_through(point)}
    diagnostics = {
        "signs": list(triple.signs),
        "bounded": triple.bounded,
        "witness": [fmt(p) for p in triple.witness],
        "class": result.verdict(triple),
    }
    if triple.key in result.conflicts:
        return AbarVerdict.UNKNOWN, diagnostics
    if triple.key in result.in_abar:
        return AbarVerdict.IN_ABAR, diagnostics
    return AbarVerdict.NOT_IN_ABAR, diagnostics


# ---------------------------------------------------------------------------
# Candidate decomposition and the Ψ⁺ unitarity criterion
# ---------------------------------------------------------------------------


PieceKey = tuple[CuspLabel, Fraction, int]


def _canonical_label(rho: CuspLabel) -> CuspLabel:
    return min(rho, rho.dual())


def _piece_key(rho: CuspLabel, y: Fraction, c: int) -> PieceKey:
    """Pairs ρ|·|^y⊗S_c + dual are stored once with y ≤ 0."""
    if y > 0:
        return (rho.dual(), -y, c)
    if y == 0:
        return (_canonical_label(rho), y, c)
    return (rho, y, c)


@dataclass(frozen=True)
class CandDecomposition:
    factors: tuple[SpehSymbol, ...]
    gp: LData
    gp_arthur: bool
    irreducible: bool | None
    reason: str | None = None

    @property
    def in_cand(self) -> bool | None:
        if self.irreducible is False:
            return False
        if not self.gp_arthur or self.irreducible is None:
            return None
        return True


def _split_parameter(pi: LData) -> tuple[dict[PieceKey, int], LData]:
    kind = pi.kind
    pool: dict[PieceKey, int] = {}
    gp_segments: list[LSegment] = []
    for segment in pi.segments:
        if good_parity_exponent(segment.rho, kind, segment.x):
            gp_segments.append(segment)
            continue
        key = _piece_key(segment.rho, segment.center, segment.length)
        pool[key] = pool.get(key, 0) + 1
    gp_entries: dict = {}
    for (rho, a), (count, sign) in pi.tempered.entries().items():
        if good_parity_exponent(rho, kind, Fraction(a + 1, 2)):
            gp_entries[(rho, a)] = (count, sign)
        elif not rho.is_self_dual:
            if rho == _canonical_label(rho):
                key = _piece_key(rho, Fraction(0), a)
                pool[key] = pool.get(key, 0) + count
        else:
            key = _piece_key(rho, Fraction(0), a)
            pool[key] = pool.get(key, 0) + count // 2
    return pool, LData(tuple(gp_segments), EnhancedTempered.build(kind, gp_entries))


def _run_length(pool: dict[PieceKey, int], key: PieceKey) -> tuple[int, dict[PieceKey, int]]:
    rho, y, c = key
    beta = 0
    needed: dict[PieceKey, int] = {}
    while True:
        nxt = _piece_key(rho, y + beta, c)
        if pool.get(nxt, 0) < needed.get(nxt, 0) + 1:
            return beta, needed
        needed[nxt] = needed.get(nxt, 0) + 1
        beta += 1


def _extract(pool: dict[PieceKey, int]) -> list[SpehSymbol]:
    factors: list[SpehSymbol] = []
    pool = {k: v for k, v in pool.items() if v}
    while pool:
        best = None
        for key in pool:
            rho, y, c = key
            beta, needed = _run_length(pool, key)
            xi = Fraction(1 - c, 2) + y + Fraction(c + beta, 2) - 1
            low = Fraction(1 - c, 2) + y
            high = Fraction(c + beta, 2) - 1 + xi
            rank = (low, -high, c, rho != _canonical_label(rho), rho.name)
            if best is None or rank < best[0]:
                best = (rank, SpehSymbol(rho, c, beta, xi), needed)
        _, factor, needed = best
        factors.append(factor)
        for k, count in needed.items():
            pool[k] -= count
            if not pool[k]:
                del pool[k]
    return factors


def _induction_irreducible(
    factors: Sequence[SpehSymbol], oracle: ReducibilityOracle
) -> tuple[bool | None, str | None]:
    for i, first in enumerate(factors):
        for second in factors[i + 1 :]:
            if second.rho == first.rho:
                sums = [first.x - second.x] + ([first.x + second.x] if first.rho.is_self_dual else [])
            elif second.rho == first.rho.dual():
                sums = [first.x + second.x]
            else:
                continue
            try:
                points = oracle.query2(first.rho, (first.a, first.b), (second.a, second.b))
            except OracleMissError as exc:
                return None, exc.message
            if any(t in points for t in sums):
                return False, f"{first} and {second} are linked"
    return True, None


def abar_cand_decompose(pi: LData, oracle: ReducibilityOracle | None = None) -> CandDecomposition:
    """Split off the non-good-parity Speh factors of π, smallest left end first."""
    oracle = oracle or DefaultOracle()
    pool, gp = _split_parameter(pi)
    factors = _extract(pool)
    decision = is_arthur_type(gp)
    irreducible, reason = _induction_irreducible(factors, oracle)
    if not decision.arthur:
        reason = reason or "the good-parity part is not of Arthur type"
    logger.debug("Extracted %d Speh factors from %s", len(factors), pi)
    return CandDecomposition(tuple(factors), gp, decision.arthur, irreducible, reason)


def aplus_unitary_criterion(
    factors: Sequence[SpehSymbol], base: LData, oracle: ReducibilityOracle | None = None
) -> bool:
    """Unitarity of ×u_{ρ_i}(a_i,b_i)|·|^{x_i} ⋊ π_u with 0 < |x_i| < ½.

    Every factor whose untwisted induction over π_u reduces must occur an
    even number of times.
    """
    oracle = oracle or DefaultOracle()
    for factor in factors:
        if not 0 < abs(factor.x) < HALF:
            raise InvalidInputError("Complementary twists need 0 < |x| < 1/2", factor=str(factor))
    shapes = [(f.rho, f.a, f.b) for f in factors]
    for factor in factors:
        if not factor.rho.is_self_dual:
            continue
        if Fraction(0) not in oracle.query1(factor.rho, factor.a, factor.b, base):
            continue
        if shapes.count((factor.rho, factor.a, factor.b)) % 2:
            logger.debug("%s reduces over the base with odd multiplicity", factor)
            return False
    return True


def region_dump(result: AbarResult, shapes: Shapes, base: LData) -> dict:
    """Walls and chambers of a two-dimensional arrangement, for plotting."""
    arrangement = result.regions.arrangement(shapes, base)
    if arrangement is None or len(shapes) != 2:
        raise InvalidInputError("Region dumps need a two-factor arrangement that was built", shapes=list(shapes))
    return {
        "shapes": [list(p) for p in shapes],
        "base": str(base),
        "walls": [
            {"coeffs": list(h.coeffs), "offset": fmt(h.offset), "label": str(h)} for h in arrangement.hyperplanes
        ],
        "chambers": [
            {
                "signs": list(t.signs),
                "bounded": t.bounded,
                "witness": [fmt(p) for p in t.witness],
                "verdict": result.verdict(t),
            }
            for t in arrangement.triples
        ],
    }
