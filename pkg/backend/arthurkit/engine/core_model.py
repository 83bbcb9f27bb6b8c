"""
Foundational value types of the engine.

Everything here is an immutable value: cuspidal labels, Arthur and
L-parameters, enhanced tempered data, Langlands data, supercuspidal data and
the extended (multi-)segments the operator layer works on. Constructors run the
dimension audit and the sign condition so an invalid object never exists.
"""

import logging
from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from ..enums import Duality, GroupKind, ParityClass
from ..exceptions import InvalidInputError
from .halfint import HALF, fmt, half, is_half_integral, is_integral, rational, sign_pow

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Groups and cuspidal labels
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupType:
    """Sp(2n) or SO(2n+1); the dual group acts on a space of dimension N."""

    kind: GroupKind
    rank: int

    def __post_init__(self):
        if self.rank < 0:
            raise InvalidInputError(f"Negative rank {self.rank}")

    @property
    def dual_dim(self) -> int:
        return 2 * self.rank + 1 if self.kind == GroupKind.SP else 2 * self.rank

    @classmethod
    def from_dual_dim(cls, kind: GroupKind, dual_dim: int) -> "GroupType":
        if kind == GroupKind.SP:
            if dual_dim % 2 == 0:
                raise InvalidInputError(
                    f"Parameters of Sp(2n) have odd total dimension, got {dual_dim}",
                    dual_dim=dual_dim,
                )
            return cls(kind, (dual_dim - 1) // 2)
        if dual_dim % 2:
            raise InvalidInputError(
                f"Parameters of SO(2n+1) have even total dimension, got {dual_dim}",
                dual_dim=dual_dim,
            )
        return cls(kind, dual_dim // 2)

    @property
    def label(self) -> str:
        if self.kind == GroupKind.SP:
            return f"Sp({2 * self.rank})"
        return f"SO({2 * self.rank + 1})"

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True, eq=False)
class CuspLabel:
    """An opaque supercuspidal representation ρ of GL_d.

    Labels compare and hash by name. The dual of a non-self-dual label
    ``tau`` is ``tau~``.
    """

    name: str
    dim: int = 1
    duality: Duality = Duality.ORTHOGONAL

    def __post_init__(self):
        if not self.name or any(ch in self.name for ch in " ,;{}()[]@"):
            raise InvalidInputError(f"Invalid cusp name {self.name!r}")
        if self.dim < 1:
            raise InvalidInputError(f"Cusp {self.name} has non-positive dimension")
        if self.duality == Duality.SYMPLECTIC and self.dim % 2:
            raise InvalidInputError(f"Symplectic cusp {self.name} must have even dimension")

    def __eq__(self, other) -> bool:
        return isinstance(other, CuspLabel) and other.name == self.name

    def __hash__(self) -> int:
        return hash(("cusp", self.name))

    def __lt__(self, other: "CuspLabel") -> bool:
        return self.name < other.name

    def __repr__(self) -> str:
        return f"CuspLabel({self.name!r}, {self.dim}, {self.duality.value})"

    @property
    def is_self_dual(self) -> bool:
        return self.duality != Duality.NON_SELF_DUAL

    def epsilon(self, kind: GroupKind) -> Fraction:
        """ε_ρ: the offset with α_ρ ∈ ε_ρ + ℤ for every supercuspidal base."""
        if not self.is_self_dual:
            raise InvalidInputError(f"ε is undefined for the non-self-dual cusp {self.name}")
        symplectic = self.duality == Duality.SYMPLECTIC
        if kind == GroupKind.SP:
            return HALF if symplectic else Fraction(0)
        return Fraction(0) if symplectic else HALF

    def dual(self) -> "CuspLabel":
        if self.is_self_dual:
            return self
        name = self.name[:-1] if self.name.endswith("~") else self.name + "~"
        return CuspLabel(name, self.dim, self.duality)

    def same_as(self, other: "CuspLabel") -> bool:
        return (
            self.name == other.name
            and self.dim == other.dim
            and self.duality == other.duality
        )


TRIVIAL_CUSP = CuspLabel("rho")


def check_cusps(labels: Iterable[CuspLabel]) -> dict[str, CuspLabel]:
    """Reject two labels sharing a name with different dimension or duality."""
    seen: dict[str, CuspLabel] = {}
    for label in labels:
        known = seen.setdefault(label.name, label)
        if not known.same_as(label):
            raise InvalidInputError(
                f"Cusp {label.name} used with conflicting data",
                first=repr(known),
                second=repr(label),
            )
    return seen


def good_parity_exponent(rho: CuspLabel, kind: GroupKind, value: Fraction) -> bool:
    """True iff value ∈ ε_ρ + ℤ for a self-dual ρ."""
    return rho.is_self_dual and is_integral(Fraction(value) - rho.epsilon(kind))


# ---------------------------------------------------------------------------
# Arthur parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ArthurSummand:
    """ρ|·|^x ⊗ S_a ⊗ S_b."""

    rho: CuspLabel
    a: int
    b: int
    x: Fraction = Fraction(0)

    def __post_init__(self):
        if self.a < 1 or self.b < 1:
            raise InvalidInputError(f"Summand dimensions must be positive: a={self.a}, b={self.b}")
        object.__setattr__(self, "x", rational(self.x))
        if abs(self.x) >= HALF:
            raise InvalidInputError(f"Twist {fmt(self.x)} is outside (-1/2, 1/2)")

    @property
    def dim(self) -> int:
        return self.rho.dim * self.a * self.b

    def is_good_parity(self, kind: GroupKind) -> bool:
        return (
            self.rho.is_self_dual
            and self.x == 0
            and good_parity_exponent(self.rho, kind, Fraction(self.a + self.b, 2))
        )

    def sort_key(self) -> tuple:
        return (self.rho.name, self.a, self.b, self.x)

    def __str__(self) -> str:
        twist = f"|.|^{fmt(self.x)}" if self.x else ""
        return f"{self.rho.name}{twist}⊗S{self.a}⊗S{self.b}"


@dataclass(frozen=True)
class ArthurParameter:
    """A formal sum of Arthur summands for Sp(2n) or SO(2n+1)."""

    kind: GroupKind
    summands: tuple[ArthurSummand, ...]

    def __post_init__(self):
        ordered = tuple(sorted(self.summands, key=ArthurSummand.sort_key))
        object.__setattr__(self, "summands", ordered)
        check_cusps(s.rho for s in ordered)
        GroupType.from_dual_dim(self.kind, self.dual_dim)

    @classmethod
    def from_triples(
        cls, kind: GroupKind, triples: Iterable[tuple[CuspLabel, int, int]]
    ) -> "ArthurParameter":
        return cls(kind, tuple(ArthurSummand(rho, a, b) for rho, a, b in triples))

    @property
    def dual_dim(self) -> int:
        return sum(s.dim for s in self.summands)

    @property
    def group(self) -> GroupType:
        return GroupType.from_dual_dim(self.kind, self.dual_dim)

    def counts(self) -> Counter:
        return Counter((s.rho, s.a, s.b, s.x) for s in self.summands)

    def multiplicity(self, rho: CuspLabel, a: int, b: int) -> int:
        return sum(1 for s in self.summands if s.rho == rho and s.a == a and s.b == b and s.x == 0)

    def is_good_parity(self) -> bool:
        return all(s.is_good_parity(self.kind) for s in self.summands)

    def is_tempered(self) -> bool:
        return all(s.b == 1 for s in self.summands)

    def rhos(self) -> list[CuspLabel]:
        return sorted({s.rho for s in self.summands})

    def restrict(self, rho: CuspLabel) -> list[ArthurSummand]:
        return [s for s in self.summands if s.rho == rho]

    def __str__(self) -> str:
        if not self.summands:
            return "0"
        parts = []
        for (rho, a, b, x), count in sorted(self.counts().items(), key=lambda kv: (kv[0][0].name, kv[0][1:])):
            term = str(ArthurSummand(rho, a, b, x))
            parts.append(term if count == 1 else f"{count}·{term}")
        return " + ".join(parts)


def diagonal_restriction(psi: ArthurParameter) -> Counter:
    """ψ^Δ as a multiset of (ρ, c) with S_a ⊗ S_b = ⊕ S_c (Clebsch–Gordan)."""
    result: Counter = Counter()
    for summand in psi.summands:
        if summand.x != 0:
            raise InvalidInputError(
                "Diagonal restriction needs untwisted summands", summand=str(summand)
            )
        for c in range(abs(summand.a - summand.b) + 1, summand.a + summand.b, 2):
            result[(summand.rho, c)] += 1
    return result


# ---------------------------------------------------------------------------
# Enhanced tempered data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EnhancedTempered:
    """A tempered L-parameter φ = ⊕ ρ⊗S_a with its character ε.

    ``summands`` stores one entry per copy: (ρ, a, sign). The sign is ±1 on
    good-parity summands and 0 elsewhere.
    """

    kind: GroupKind
    summands: tuple[tuple[CuspLabel, int, int], ...] = ()

    def __post_init__(self):
        ordered = tuple(sorted(self.summands, key=lambda t: (t[0].name, t[1], t[2])))
        object.__setattr__(self, "summands", ordered)
        check_cusps(rho for rho, _, _ in ordered)
        signs: dict[tuple[CuspLabel, int], int] = {}
        product = 1
        for rho, a, sign in ordered:
            if a < 1:
                raise InvalidInputError(f"S_{a} is not a summand")
            gp = good_parity_exponent(rho, self.kind, Fraction(a + 1, 2))
            if gp:
                if sign not in (1, -1):
                    raise InvalidInputError(
                        f"Good-parity summand {rho.name}⊗S{a} needs a sign", summand=(rho.name, a)
                    )
                if signs.setdefault((rho, a), sign) != sign:
                    raise InvalidInputError(
                        f"Copies of {rho.name}⊗S{a} carry different signs", summand=(rho.name, a)
                    )
                product *= sign
            elif sign != 0:
                raise InvalidInputError(
                    f"{rho.name}⊗S{a} is not of good parity and carries no sign",
                    summand=(rho.name, a),
                )
        if product != 1:
            raise InvalidInputError("The character ε violates ∏ ε^m = 1", product=product)
        for (rho, a), count in self.phi.items():
            if rho.is_self_dual and not good_parity_exponent(rho, self.kind, Fraction(a + 1, 2)) and count % 2:
                raise InvalidInputError(
                    f"Bad-parity summand {rho.name}⊗S{a} must occur with even multiplicity"
                )
            if not rho.is_self_dual and self.phi.get((rho.dual(), a), 0) != count:
                raise InvalidInputError(f"{rho.name}⊗S{a} needs its dual with equal multiplicity")
        GroupType.from_dual_dim(self.kind, self.dual_dim)

    @classmethod
    def build(
        cls, kind: GroupKind, entries: Mapping[tuple[CuspLabel, int], tuple[int, int]]
    ) -> "EnhancedTempered":
        """From {(ρ, a): (multiplicity, sign)}."""
        copies = []
        for (rho, a), (count, sign) in entries.items():
            copies.extend([(rho, a, sign)] * count)
        return cls(kind, tuple(copies))

    @cached_property
    def phi(self) -> Counter:
        return Counter((rho, a) for rho, a, _ in self.summands)

    @property
    def dual_dim(self) -> int:
        return sum(rho.dim * a for rho, a, _ in self.summands)

    @property
    def group(self) -> GroupType:
        return GroupType.from_dual_dim(self.kind, self.dual_dim)

    def mult(self, rho: CuspLabel, a: int) -> int:
        return self.phi.get((rho, a), 0)

    def eps(self, rho: CuspLabel, a: int) -> int | None:
        for r, b, sign in self.summands:
            if r == rho and b == a:
                return sign
        return None

    def entries(self) -> dict[tuple[CuspLabel, int], tuple[int, int]]:
        result: dict[tuple[CuspLabel, int], tuple[int, int]] = {}
        for rho, a, sign in self.summands:
            count, _ = result.get((rho, a), (0, sign))
            result[(rho, a)] = (count + 1, sign)
        return result

    def rhos(self) -> list[CuspLabel]:
        return sorted({rho for rho, _, _ in self.summands})

    def pretty(self, ascii_only: bool = False) -> str:
        """π(0⁺, 1⁻) for a single trivial cusp, ρ⊗S_a^± notation otherwise."""
        if not self.summands:
            return "π()"
        single = len(self.rhos()) == 1
        parts = []
        for rho, a, sign in self.summands:
            mark = {1: "+", -1: "-", 0: ""}[sign]
            if not ascii_only:
                mark = {"+": "⁺", "-": "⁻", "": ""}[mark]
            z = fmt(Fraction(a - 1, 2))
            parts.append(f"{z}{mark}" if single else f"{rho.name}:{z}{mark}")
        return "π(" + ", ".join(parts) + ")"


# ---------------------------------------------------------------------------
# Langlands data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LSegment:
    """Δ_ρ[x, y] = {ρ|·|^x, ρ|·|^(x-1), …, ρ|·|^y}."""

    rho: CuspLabel
    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", rational(self.x))
        object.__setattr__(self, "y", rational(self.y))
        gap = self.x - self.y
        if not is_integral(gap) or gap < -1:
            raise InvalidInputError(f"Δ[{fmt(self.x)},{fmt(self.y)}] is not a segment")

    @property
    def length(self) -> int:
        return int(self.x - self.y) + 1

    @property
    def center(self) -> Fraction:
        return (self.x + self.y) / 2

    @property
    def is_empty(self) -> bool:
        return self.length == 0

    def sort_key(self) -> tuple:
        return (self.x + self.y, self.x, self.rho.name)

    def pretty(self, show_rho: bool = False) -> str:
        sub = f"_{self.rho.name}" if show_rho else ""
        return f"Δ{sub}[{fmt(self.x)},{fmt(self.y)}]"


@dataclass(frozen=True)
class LData:
    """L(Δ_1, …, Δ_f; π(φ, ε)) with x_i + y_i non-decreasing and negative."""

    segments: tuple[LSegment, ...]
    tempered: EnhancedTempered

    def __post_init__(self):
        kept = tuple(sorted((s for s in self.segments if not s.is_empty), key=LSegment.sort_key))
        object.__setattr__(self, "segments", kept)
        for segment in kept:
            if segment.x + segment.y >= 0:
                raise InvalidInputError(
                    f"Langlands data needs negative segment centers, got {segment.pretty()}"
                )
        check_cusps([s.rho for s in kept] + [rho for rho, _, _ in self.tempered.summands])
        GroupType.from_dual_dim(self.kind, self.dual_dim)

    @property
    def kind(self) -> GroupKind:
        return self.tempered.kind

    @property
    def dual_dim(self) -> int:
        return self.tempered.dual_dim + 2 * sum(s.rho.dim * s.length for s in self.segments)

    @property
    def group(self) -> GroupType:
        return GroupType.from_dual_dim(self.kind, self.dual_dim)

    @property
    def is_tempered(self) -> bool:
        return not self.segments

    def rhos(self) -> list[CuspLabel]:
        return sorted({s.rho for s in self.segments} | set(self.tempered.rhos()))

    def rho_segments(self, rho: CuspLabel) -> list[LSegment]:
        return [s for s in self.segments if s.rho == rho]

    def add_segments(self, extra: Iterable[LSegment]) -> "LData":
        return LData(self.segments + tuple(extra), self.tempered)

    def remove_segments(self, removed: Iterable[LSegment]) -> "LData":
        pool = list(self.segments)
        for segment in removed:
            try:
                pool.remove(segment)
            except ValueError as exc:
                raise InvalidInputError(f"{segment.pretty()} is not a segment of π") from exc
        return LData(tuple(pool), self.tempered)

    def segment_counts(self) -> Counter:
        return Counter(self.segments)

    def pretty(self, ascii_only: bool = False) -> str:
        show = len(self.rhos()) > 1
        segs = ", ".join(s.pretty(show) for s in self.segments)
        temp = self.tempered.pretty(ascii_only)
        body = f"{segs}; {temp}" if segs else temp
        text = f"L({body})"
        return text.replace("Δ", "D").replace("π", "pi").replace("⊗", "x") if ascii_only else text

    def __str__(self) -> str:
        return self.pretty()


def ldata_dimension(pi: LData) -> int:
    """Dimension of the dual-group representation attached to π."""
    return pi.dual_dim


def omega(pi: LData) -> dict[CuspLabel, Counter]:
    """Ω(π): ends of the segments Δ[x, -y] (x and y) plus z of each ρ⊗S_{2z+1}."""
    result: dict[CuspLabel, Counter] = {}
    for segment in pi.segments:
        bucket = result.setdefault(segment.rho, Counter())
        bucket[segment.x] += 1
        bucket[-segment.y] += 1
    for rho, a, _ in pi.tempered.summands:
        result.setdefault(rho, Counter())[Fraction(a - 1, 2)] += 1
    return result


def segment_multiset(A: Fraction, B: Fraction) -> Counter:
    """[A, B] as the multiset {A, A-1, …, B}."""
    result: Counter = Counter()
    value = Fraction(A)
    while value >= B:
        result[value] += 1
        value -= 1
    return result


# ---------------------------------------------------------------------------
# Supercuspidal data
# ---------------------------------------------------------------------------


def is_supercuspidal(rep: EnhancedTempered) -> bool:
    """Discrete, without gaps, alternating, and ε(ρ⊗S_2) = -1."""
    by_rho: dict[CuspLabel, list[tuple[int, int]]] = {}
    for (rho, a), count in rep.phi.items():
        if count > 1 or not rho.is_self_dual:
            return False
        if not good_parity_exponent(rho, rep.kind, Fraction(a + 1, 2)):
            return False
        by_rho.setdefault(rho, []).append((a, rep.eps(rho, a)))
    for rho, chain in by_rho.items():
        chain.sort()
        start = int(2 * rho.epsilon(rep.kind)) + 1
        if [a for a, _ in chain] != list(range(start, start + 2 * len(chain), 2)):
            return False
        if any(s1 * s2 != -1 for (_, s1), (_, s2) in zip(chain, chain[1:], strict=False)):
            return False
        if chain[0][0] == 2 and chain[0][1] != -1:
            return False
    return True


@dataclass(frozen=True)
class SupercuspidalData:
    """A supercuspidal representation given by its enhanced L-parameter."""

    rep: EnhancedTempered

    def __post_init__(self):
        if not is_supercuspidal(self.rep):
            raise InvalidInputError(
                "The enhanced parameter fails the supercuspidal criterion",
                tempered=self.rep.pretty(ascii_only=True),
            )

    @property
    def kind(self) -> GroupKind:
        return self.rep.kind

    @property
    def group(self) -> GroupType:
        return self.rep.group

    def chain_length(self, rho: CuspLabel) -> int:
        return sum(1 for r, _, _ in self.rep.summands if r == rho)

    def alpha(self, rho: CuspLabel) -> Fraction:
        """Reducibility point α_ρ = a_ρ + ε_ρ + 1."""
        return self.chain_length(rho) + rho.epsilon(self.kind)

    def alpha_map(self) -> dict[CuspLabel, Fraction]:
        return {rho: self.alpha(rho) for rho in self.rep.rhos()}

    def cusp(self, name: str) -> CuspLabel | None:
        for rho in self.rep.rhos():
            if rho.name == name:
                return rho
        return None


def _fresh_cusp(name: str, taken: set[str], dim: int, duality: Duality) -> CuspLabel:
    while name in taken:
        name += "'"
    taken.add(name)
    return CuspLabel(name, dim, duality)


def supercuspidal_from_chains(
    kind: GroupKind, chains: Mapping[CuspLabel, tuple[Fraction, int]]
) -> SupercuspidalData:
    """Build π_sc from its reducibility points.

    ``chains`` maps ρ to (α_ρ, η) where η is the sign of the lowest chain
    member; signs alternate upward. Auxiliary cusps are added when needed to
    fix the parity of the total dimension or the product of signs.
    """
    entries: dict[tuple[CuspLabel, int], tuple[int, int]] = {}
    taken = {rho.name for rho in chains}
    product = 1
    for rho, (alpha, eta) in chains.items():
        alpha = half(alpha)
        eps = rho.epsilon(kind)
        length = alpha - eps
        if not is_integral(length) or length < 0:
            raise InvalidInputError(
                f"α = {fmt(alpha)} is not a reducibility point for {rho.name}",
                alpha=fmt(alpha),
                epsilon=fmt(eps),
            )
        start = int(2 * eps) + 1
        if start == 2 and length > 0 and eta != -1:
            raise InvalidInputError(f"ε({rho.name}⊗S2) must be -1 in a supercuspidal chain")
        sign = eta
        for index in range(int(length)):
            entries[(rho, start + 2 * index)] = (1, sign)
            product *= sign
            sign = -sign
    dual_dim = sum(rho.dim * a for (rho, a) in entries)
    if kind == GroupKind.SP and dual_dim % 2 == 0:
        chi = _fresh_cusp("chi", taken, 1, Duality.ORTHOGONAL)
        entries[(chi, 1)] = (1, product)
        product = 1
    if product == -1:
        if kind == GroupKind.SP:
            chi = _fresh_cusp("chi", taken, 1, Duality.ORTHOGONAL)
            entries[(chi, 1)] = (1, 1)
            entries[(chi, 3)] = (1, -1)
        else:
            sym = _fresh_cusp("sym2", taken, 2, Duality.SYMPLECTIC)
            entries[(sym, 1)] = (1, -1)
    return SupercuspidalData(EnhancedTempered.build(kind, entries))


# ---------------------------------------------------------------------------
# Parity of representations over a supercuspidal base
# ---------------------------------------------------------------------------


def _exponent_line(center: Fraction, a: int) -> list[Fraction]:
    top = center + Fraction(a - 1, 2)
    return [top - k for k in range(a)]


def support_exponents(pi: LData, sc: SupercuspidalData) -> dict[CuspLabel, list[Fraction]]:
    """Non-negative exponents x_i with π ↪ ×ρ_i|·|^{x_i} ⋊ π_sc."""
    if pi.kind != sc.kind:
        raise InvalidInputError("π and π_sc live on different group families")
    counts: dict[CuspLabel, Counter] = {}
    for segment in pi.segments:
        bucket = counts.setdefault(segment.rho, Counter())
        for k in range(segment.length):
            bucket[segment.x - k] += 1
            bucket[-segment.x + k] += 1
    for rho, a, _ in pi.tempered.summands:
        bucket = counts.setdefault(rho, Counter())
        for value in _exponent_line(Fraction(0), a):
            bucket[value] += 1
    for rho, a, _ in sc.rep.summands:
        bucket = counts.setdefault(rho, Counter())
        for value in _exponent_line(Fraction(0), a):
            bucket[value] -= 1
    result: dict[CuspLabel, list[Fraction]] = {}
    for rho, bucket in counts.items():
        if any(count < 0 for count in bucket.values()):
            raise InvalidInputError(
                f"π is not supported over the given supercuspidal along {rho.name}"
            )
        values: list[Fraction] = []
        for value, count in bucket.items():
            if value > 0:
                values.extend([value] * count)
            elif value == 0:
                values.extend([value] * (count // 2))
        if values:
            result[rho] = sorted(values)
    return result


@dataclass(frozen=True)
class ParityVerdict:
    parity: ParityClass
    critical: bool = False


def classify_parity(pi: LData, sc: SupercuspidalData) -> ParityVerdict:
    support = support_exponents(pi, sc)
    for rho, values in support.items():
        if not rho.is_self_dual or not all(is_half_integral(v) for v in values):
            return ParityVerdict(ParityClass.NULL)
    for rho, values in support.items():
        alpha = sc.alpha(rho)
        if not all(is_integral(v - alpha) for v in values):
            return ParityVerdict(ParityClass.BAD)
    critical = True
    for rho, values in support.items():
        distinct = sorted(set(values))
        alpha = sc.alpha(rho)
        contiguous = all(b - a == 1 for a, b in zip(distinct, distinct[1:], strict=False))
        if not (contiguous and distinct[0] <= alpha <= distinct[-1]):
            critical = False
    return ParityVerdict(ParityClass.GOOD, critical)


# ---------------------------------------------------------------------------
# Reduction to good parity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpehSymbol:
    """u_ρ(a, b)|·|^x, the unitary Speh representation twisted by x."""

    rho: CuspLabel
    a: int
    b: int
    x: Fraction = Fraction(0)

    def __post_init__(self):
        if self.a < 1 or self.b < 1:
            raise InvalidInputError(f"u({self.a},{self.b}) needs positive a and b")
        object.__setattr__(self, "x", rational(self.x))

    def pieces(self) -> list[tuple[Fraction, int]]:
        """(center, a) of the summands ρ|·|^center ⊗ S_a of its L-parameter."""
        return [(Fraction(1 - self.b, 2) + r + self.x, self.a) for r in range(self.b)]

    def twisted(self, x: Fraction) -> "SpehSymbol":
        return SpehSymbol(self.rho, self.a, self.b, rational(x))

    def __str__(self) -> str:
        twist = f"|.|^{fmt(self.x)}" if self.x else ""
        return f"u_{self.rho.name}({self.a},{self.b}){twist}"


@dataclass(frozen=True)
class GPDecomposition:
    speh_pos: tuple[SpehSymbol, ...]
    speh_ngp: tuple[SpehSymbol, ...]
    psi_gp: ArthurParameter


def decompose_to_gp(psi: ArthurParameter) -> GPDecomposition:
    """ψ = ψ_{>0} ⊕ ψ_ngp ⊕ ψ_gp with the first two written as Speh factors."""
    pool = Counter((s.rho, s.a, s.b, s.x) for s in psi.summands)
    speh_pos: list[SpehSymbol] = []
    speh_ngp: list[SpehSymbol] = []

    def take(key, count=1):
        if pool.get(key, 0) < count:
            rho, a, b, x = key
            raise InvalidInputError(
                f"ψ is not self-dual: missing {rho.name}|.|^{fmt(x)}⊗S{a}⊗S{b}"
            )
        pool[key] -= count
        if not pool[key]:
            del pool[key]

    for key in sorted(pool, key=lambda k: (k[0].name, k[1], k[2], k[3])):
        rho, a, b, x = key
        while x > 0 and pool.get(key, 0):
            take(key)
            take((rho.dual(), a, b, -x))
            speh_pos.append(SpehSymbol(rho, a, b, x))
    for key in sorted(pool, key=lambda k: (k[0].name, k[1], k[2], k[3])):
        rho, a, b, x = key
        if x != 0:
            raise InvalidInputError(f"Unpaired negative twist on {rho.name}⊗S{a}⊗S{b}")
        if ArthurSummand(rho, a, b).is_good_parity(psi.kind):
            continue
        while pool.get(key, 0):
            take(key)
            take((rho.dual(), a, b, Fraction(0)))
            speh_ngp.append(SpehSymbol(rho, a, b))
    psi_gp = ArthurParameter(
        psi.kind,
        tuple(ArthurSummand(rho, a, b) for (rho, a, b, _), count in pool.items() for _ in range(count)),
    )
    return GPDecomposition(tuple(speh_pos), tuple(speh_ngp), psi_gp)


# ---------------------------------------------------------------------------
# Extended segments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExtendedSegment:
    """([A, B]_ρ, l, η) with 0 ≤ l ≤ b/2; η is normalized to +1 when b = 2l."""

    A: Fraction
    B: Fraction
    l: int  # noqa: E741
    eta: int = 1

    def __post_init__(self):
        object.__setattr__(self, "A", half(self.A))
        object.__setattr__(self, "B", half(self.B))
        if not is_integral(self.A - self.B) or self.A < self.B:
            raise InvalidInputError(
                f"[{fmt(self.A)},{fmt(self.B)}] is not a segment", A=fmt(self.A), B=fmt(self.B)
            )
        if self.eta not in (1, -1):
            raise InvalidInputError(f"η must be ±1, got {self.eta}")
        if not 0 <= 2 * self.l <= self.b:
            raise InvalidInputError(
                f"l = {self.l} is out of range for [{fmt(self.A)},{fmt(self.B)}]",
                l=self.l,
                b=self.b,
            )
        if 2 * self.l == self.b:
            object.__setattr__(self, "eta", 1)

    @property
    def a(self) -> int:
        return int(self.A + self.B) + 1

    @property
    def b(self) -> int:
        return int(self.A - self.B) + 1

    @property
    def segment(self) -> tuple[Fraction, Fraction]:
        return (self.A, self.B)

    def replace(self, **changes) -> "ExtendedSegment":
        values = {"A": self.A, "B": self.B, "l": self.l, "eta": self.eta}
        values.update(changes)
        return ExtendedSegment(**values)

    def sort_key(self) -> tuple:
        return (self.B, self.A, self.l, self.eta)

    def contains(self, other: "ExtendedSegment") -> bool:
        """[A,B] ⊇ [A',B']."""
        return self.A >= other.A and self.B <= other.B

    def __str__(self) -> str:
        return f"([{fmt(self.A)},{fmt(self.B)}],{self.l},{'+' if self.eta == 1 else '-'})"


Rows = tuple[ExtendedSegment, ...]


def must_precede(first: ExtendedSegment, second: ExtendedSegment, prime: bool = False) -> bool:
    """Whether an admissible order forces ``first`` before ``second``."""
    if prime:
        return first.B < second.B
    return first.A < second.A and first.B < second.B


def is_admissible(rows: Iterable[ExtendedSegment], prime: bool = False) -> bool:
    rows = list(rows)
    return not any(
        must_precede(rows[j], rows[i], prime)
        for i in range(len(rows))
        for j in range(i + 1, len(rows))
    )


def row_sign(row: ExtendedSegment) -> int:
    return sign_pow(row.b // 2 + row.l) * (row.eta ** row.b)


@dataclass(frozen=True)
class ExtendedMultiSegment:
    """∪_ρ {([A_i,B_i]_ρ, l_i, η_i)}_{i ∈ (I_ρ, >)}, each block in its admissible order.

    ``strict`` objects satisfy A_i + B_i ≥ 0, the sign condition and the
    dimension parity; non-strict ones only appear inside composite operators.
    """

    kind: GroupKind
    blocks: tuple[tuple[CuspLabel, Rows], ...]
    strict: bool = field(default=True, compare=False)

    def __post_init__(self):
        blocks = tuple(
            sorted(((rho, tuple(rows)) for rho, rows in self.blocks if rows), key=lambda b: b[0].name)
        )
        object.__setattr__(self, "blocks", blocks)
        names = [rho.name for rho, _ in blocks]
        if len(names) != len(set(names)):
            raise InvalidInputError("A cusp appears in two blocks", cusps=names)
        for rho, rows in blocks:
            if not rho.is_self_dual:
                raise InvalidInputError(f"Extended segments need a self-dual cusp, got {rho.name}")
            eps = rho.epsilon(self.kind)
            for row in rows:
                if not is_integral(row.A - eps):
                    raise InvalidInputError(
                        f"{row} over {rho.name} is not of good parity",
                        row=str(row),
                        cusp=rho.name,
                    )
            if not is_admissible(rows):
                raise InvalidInputError(
                    f"The order of the {rho.name}-block violates (P)", cusp=rho.name
                )
        if self.strict:
            for rho, rows in blocks:
                for row in rows:
                    if row.A + row.B < 0:
                        raise InvalidInputError(f"{row} has A + B < 0", row=str(row))
            if self.sign_product() != 1:
                raise InvalidInputError("The sign condition fails", product=self.sign_product())
            GroupType.from_dual_dim(self.kind, self.dual_dim)

    @classmethod
    def single(
        cls, kind: GroupKind, rho: CuspLabel, rows: Iterable[ExtendedSegment], strict: bool = True
    ) -> "ExtendedMultiSegment":
        return cls(kind, ((rho, tuple(rows)),), strict)

    @property
    def dual_dim(self) -> int:
        return sum(rho.dim * row.a * row.b for rho, rows in self.blocks for row in rows)

    @property
    def group(self) -> GroupType:
        return GroupType.from_dual_dim(self.kind, self.dual_dim)

    def rhos(self) -> list[CuspLabel]:
        return [rho for rho, _ in self.blocks]

    def block(self, rho: CuspLabel) -> Rows:
        for label, rows in self.blocks:
            if label == rho:
                return rows
        return ()

    def cusp(self, name: str) -> CuspLabel | None:
        for label, _ in self.blocks:
            if label.name == name:
                return label
        return None

    def with_block(
        self, rho: CuspLabel, rows: Iterable[ExtendedSegment], strict: bool | None = None
    ) -> "ExtendedMultiSegment":
        others = tuple((label, r) for label, r in self.blocks if label != rho)
        return ExtendedMultiSegment(
            self.kind, others + ((rho, tuple(rows)),), self.strict if strict is None else strict
        )

    def sign_product(self) -> int:
        product = 1
        for _, rows in self.blocks:
            for row in rows:
                product *= row_sign(row)
        return product

    def psi(self) -> ArthurParameter:
        return ArthurParameter.from_triples(
            self.kind, ((rho, row.a, row.b) for rho, rows in self.blocks for row in rows)
        )

    def satisfies_p_prime(self, rho: CuspLabel | None = None) -> bool:
        blocks = self.blocks if rho is None else ((rho, self.block(rho)),)
        return all(is_admissible(rows, prime=True) for _, rows in blocks)

    def min_B(self) -> Fraction | None:
        values = [row.B for _, rows in self.blocks for row in rows]
        return min(values) if values else None

    def __len__(self) -> int:
        return sum(len(rows) for _, rows in self.blocks)

    def __str__(self) -> str:
        from .symbols import format_compact

        return format_compact(self)
