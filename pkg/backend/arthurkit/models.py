from typing import Annotated, Any, Literal

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, model_validator

from .engine.halfint import fmt, rational
from .enums import AbarVerdict, Duality, GroupKind, ParityClass

"""
Pydantic documents read and written by the CLI and the HTTP API.

Rational numbers travel as strings ("3/2", "-1", "0"); integers and numeric
strings are accepted on input and normalized.
"""


def _canonical_rational(value: Any) -> str:
    if isinstance(value, float):
        raise ValueError("use an exact rational such as '3/2' instead of a float")
    return fmt(rational(value))


Rational = Annotated[str, BeforeValidator(_canonical_rational)]


# Input Models
class CuspModel(BaseModel):
    """A supercuspidal ρ of GL_d."""

    name: str = Field(..., min_length=1)
    dim: int = Field(1, ge=1)
    duality: Duality = Duality.ORTHOGONAL


class SegmentRowModel(BaseModel):
    """One extended segment ([A,B], l, η)."""

    A: Rational
    B: Rational
    l: int = Field(..., ge=0)  # noqa: E741
    eta: Literal[1, -1] = 1


class BlockModel(BaseModel):
    rho: str
    rows: list[SegmentRowModel]


class ExtendedMultiSegmentDocument(BaseModel):
    """Either the compact ``symbol`` text or explicit ρ-blocks."""

    kind: GroupKind | None = None
    cusps: list[CuspModel] = Field(default_factory=list)
    symbol: str | None = None
    blocks: list[BlockModel] = Field(default_factory=list)

    @model_validator(mode="after")
    def _one_form(self):
        if self.symbol is None and not self.blocks:
            raise ValueError("give either 'symbol' or 'blocks'")
        if self.symbol is not None and self.blocks:
            raise ValueError("'symbol' and 'blocks' are mutually exclusive")
        if self.blocks and self.kind is None:
            raise ValueError("'kind' is required with explicit blocks")
        return self


class ArthurSummandModel(BaseModel):
    rho: str
    a: int = Field(..., ge=1)
    b: int = Field(..., ge=1)
    x: Rational = "0"
    mult: int = Field(1, ge=1)


class ArthurParameterDocument(BaseModel):
    kind: GroupKind
    cusps: list[CuspModel] = Field(default_factory=list)
    summands: list[ArthurSummandModel]


class TemperedSummandModel(BaseModel):
    """ρ⊗S_a with multiplicity and sign (0 off good parity)."""

    rho: str
    a: int = Field(..., ge=1)
    mult: int = Field(1, ge=1)
    sign: Literal[1, -1, 0] = 0


class LSegmentModel(BaseModel):
    rho: str
    x: Rational
    y: Rational


class LDataDocument(BaseModel):
    """L(Δ_1, …, Δ_f; π(φ, ε))."""

    kind: GroupKind
    cusps: list[CuspModel] = Field(default_factory=list)
    segments: list[LSegmentModel] = Field(default_factory=list)
    tempered: list[TemperedSummandModel] = Field(default_factory=list)


class ChainModel(BaseModel):
    rho: str
    alpha: Rational
    eta: Literal[1, -1] = 1


class SupercuspidalDocument(BaseModel):
    """A supercuspidal base, given by its tempered data or by reducibility chains."""

    kind: GroupKind
    cusps: list[CuspModel] = Field(default_factory=list)
    tempered: list[TemperedSummandModel] = Field(default_factory=list)
    chains: list[ChainModel] = Field(default_factory=list)

    @model_validator(mode="after")
    def _one_form(self):
        if self.tempered and self.chains:
            raise ValueError("'tempered' and 'chains' are mutually exclusive")
        return self


class ClassifyRequest(BaseModel):
    pi: LDataDocument
    sc: SupercuspidalDocument


class CorankRequest(BaseModel):
    sc: SupercuspidalDocument
    rho: str
    corank: int = Field(..., ge=0, le=3)


class AbarRequest(CorankRequest):
    oracle: dict[str, Any] | None = None
    strict: bool = False


# Response Models
class OperatorStep(BaseModel):
    op: str
    rho: str | None = None
    args: dict[str, Any] = Field(default_factory=dict)


class ValidationResult(BaseModel):
    valid: bool
    symbol: str
    group: str
    psi: str
    nonvanishing: bool
    canonical: str


class LDataResult(BaseModel):
    ldata: LDataDocument
    text: str


class PacketMember(BaseModel):
    symbol: str
    ldata: str


class PacketListing(BaseModel):
    psi: str
    size: int
    members: list[PacketMember]


class IntersectionListing(BaseModel):
    ldata: str
    members: list[str]
    psis: list[str]
    psi_max: str | None = None
    trail: list[OperatorStep] = Field(default_factory=list)


class RejectedCandidateModel(BaseModel):
    ems: str
    reason: str


class ArthurVerdict(BaseModel):
    ldata: str
    arthur: bool
    reason: str | None = None
    members: list[str] = Field(default_factory=list)
    psis: list[str] = Field(default_factory=list)
    psi_max: str | None = None
    rejected: list[RejectedCandidateModel] = Field(default_factory=list)


class ParityResult(BaseModel):
    ldata: str
    parity: ParityClass
    critical: bool
    support: dict[str, list[Rational]]
    tempered_chain: list[str] | None = None


class CorankRow(BaseModel):
    family: str
    params: dict[str, Rational]
    subject: str
    computed: bool
    expected: bool
    agrees: bool


class CorankReportDocument(BaseModel):
    sc: str
    rho: str
    alpha: Rational
    corank: int
    counts: dict[int, int]
    rows: list[CorankRow]
    mismatches: int


class ChamberReport(BaseModel):
    shapes: list[tuple[int, int]]
    base: str
    base_corank: int
    signs: list[int]
    bounded: bool
    witness: list[Rational]
    verdict: str


class AbarReport(BaseModel):
    model_config = ConfigDict(use_enum_values=True)

    sc: str
    rho: str
    alpha: Rational
    corank: int
    arrangements: int
    chambers: list[ChamberReport]
    in_abar: int
    conflicts: int
    misses: list[dict[str, Any]] = Field(default_factory=list)
    notes: list[str] = Field(default_factory=list)


class MembershipResult(BaseModel):
    verdict: AbarVerdict
    diagnostics: dict[str, Any] = Field(default_factory=dict)


class HealthResponse(BaseModel):
    status: str
    version: str


class ErrorDocument(BaseModel):
    error: str
    message: str
    details: dict[str, Any] = Field(default_factory=dict)
