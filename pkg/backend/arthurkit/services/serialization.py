"""
Conversion between JSON documents and engine values.

Every loader raises :class:`ParseError` for malformed input and lets the
engine's :class:`InvalidInputError` through for well-formed but invalid data.
"""

import json
import logging
from collections.abc import Iterable
from fractions import Fraction
from pathlib import Path
from typing import Any, TypeVar

from pydantic import BaseModel, ValidationError

from ..engine.abar_regions import AbarResult
from ..engine.arthur_decider import ArthurDecision
from ..engine.core_model import (
    ArthurParameter,
    ArthurSummand,
    CuspLabel,
    EnhancedTempered,
    ExtendedMultiSegment,
    ExtendedSegment,
    LData,
    LSegment,
    SupercuspidalData,
    check_cusps,
    supercuspidal_from_chains,
)
from ..engine.corank_engine import CorankReport
from ..engine.halfint import fmt, rational
from ..engine.oracle import DefaultOracle, Query1Key, Query2Key, ReducibilityOracle, TableOracle
from ..engine.symbols import format_compact, parse_symbol
from ..enums import Duality
from ..exceptions import ParseError
from ..models import (
    AbarReport,
    ArthurParameterDocument,
    ArthurVerdict,
    ChamberReport,
    CorankReportDocument,
    CorankRow,
    CuspModel,
    ExtendedMultiSegmentDocument,
    LDataDocument,
    LSegmentModel,
    RejectedCandidateModel,
    SupercuspidalDocument,
    TemperedSummandModel,
)

logger = logging.getLogger(__name__)

DocumentT = TypeVar("DocumentT", bound=BaseModel)


# ---------------------------------------------------------------------------
# Raw documents
# ---------------------------------------------------------------------------


def read_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"Cannot read {path}: {exc.strerror}", file=str(path)) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"Invalid JSON in {path}: {exc.msg}", position=exc.pos, file=str(path)) from exc


def parse_document(data: Any, model: type[DocumentT]) -> DocumentT:
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(p) for p in first["loc"]) or "document"
        raise ParseError(f"{model.__name__}: {where}: {first['msg']}", errors=len(exc.errors())) from exc


def dumps(document: BaseModel | dict) -> str:
    """Deterministic JSON text for a document."""
    data = document.model_dump(mode="json") if isinstance(document, BaseModel) else document
    return json.dumps(data, indent=2, ensure_ascii=False)


# ---------------------------------------------------------------------------
# Cusps
# ---------------------------------------------------------------------------


class CuspRegistry:
    """Name → CuspLabel; undeclared names are trivial orthogonal characters."""

    def __init__(self, cusps: Iterable[CuspModel] = ()):
        self.labels: dict[str, CuspLabel] = {}
        for cusp in cusps:
            label = CuspLabel(cusp.name, cusp.dim, cusp.duality)
            if label.name in self.labels:
                raise ParseError(f"Cusp {label.name} declared twice")
            self.labels[label.name] = label
            if not label.is_self_dual and label.dual().name not in self.labels:
                self.labels[label.dual().name] = label.dual()

    def __call__(self, name: str) -> CuspLabel:
        found = self.labels.get(name)
        if found is None:
            found = self.labels[name] = CuspLabel(name)
        return found


def cusp_models(labels: Iterable[CuspLabel]) -> list[CuspModel]:
    """Declarations for every label that is not a trivial orthogonal character."""
    declared = []
    for label in sorted(check_cusps(labels).values()):
        if label.dim == 1 and label.duality == Duality.ORTHOGONAL:
            continue
        declared.append(CuspModel(name=label.name, dim=label.dim, duality=label.duality))
    return declared


# ---------------------------------------------------------------------------
# Engine values
# ---------------------------------------------------------------------------


def ems_from_document(doc: ExtendedMultiSegmentDocument) -> ExtendedMultiSegment:
    if doc.symbol is not None:
        return parse_symbol(doc.symbol, doc.kind)
    cusp = CuspRegistry(doc.cusps)
    blocks = []
    for block in doc.blocks:
        rows = tuple(ExtendedSegment(rational(r.A), rational(r.B), r.l, r.eta) for r in block.rows)
        blocks.append((cusp(block.rho), rows))
    return ExtendedMultiSegment(doc.kind, tuple(blocks))


def load_ems(source: str | Path) -> ExtendedMultiSegment:
    """A JSON document or a bare compact symbol, from a file or inline text."""
    try:
        is_file = Path(source).is_file()
    except OSError:
        is_file = False
    text = Path(source).read_text(encoding="utf-8") if is_file else str(source)
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        return parse_symbol(text.strip())
    return ems_from_document(parse_document(data, ExtendedMultiSegmentDocument))


def psi_from_document(doc: ArthurParameterDocument) -> ArthurParameter:
    cusp = CuspRegistry(doc.cusps)
    summands = []
    for s in doc.summands:
        summands.extend([ArthurSummand(cusp(s.rho), s.a, s.b, rational(s.x))] * s.mult)
    return ArthurParameter(doc.kind, tuple(summands))


def _tempered(kind, cusp: CuspRegistry, rows: Iterable[TemperedSummandModel]) -> EnhancedTempered:
    entries: dict[tuple[CuspLabel, int], tuple[int, int]] = {}
    for row in rows:
        key = (cusp(row.rho), row.a)
        if key in entries:
            raise ParseError(f"{row.rho}⊗S{row.a} listed twice; use 'mult'")
        entries[key] = (row.mult, row.sign)
    return EnhancedTempered.build(kind, entries)


def ldata_from_document(doc: LDataDocument) -> LData:
    cusp = CuspRegistry(doc.cusps)
    segments = tuple(LSegment(cusp(s.rho), rational(s.x), rational(s.y)) for s in doc.segments)
    return LData(segments, _tempered(doc.kind, cusp, doc.tempered))


def ldata_to_document(pi: LData) -> LDataDocument:
    labels = [s.rho for s in pi.segments] + [rho for rho, _, _ in pi.tempered.summands]
    return LDataDocument(
        kind=pi.kind,
        cusps=cusp_models(labels),
        segments=[LSegmentModel(rho=s.rho.name, x=fmt(s.x), y=fmt(s.y)) for s in pi.segments],
        tempered=[
            TemperedSummandModel(rho=rho.name, a=a, mult=count, sign=sign)
            for (rho, a), (count, sign) in sorted(pi.tempered.entries().items(), key=lambda kv: (kv[0][0].name, kv[0][1]))
        ],
    )


def sc_from_document(doc: SupercuspidalDocument) -> SupercuspidalData:
    cusp = CuspRegistry(doc.cusps)
    if doc.chains:
        chains = {cusp(c.rho): (rational(c.alpha), c.eta) for c in doc.chains}
        return supercuspidal_from_chains(doc.kind, chains)
    return SupercuspidalData(_tempered(doc.kind, cusp, doc.tempered))


def load(path: str | Path, model: type[DocumentT]) -> DocumentT:
    return parse_document(read_json(path), model)


# ---------------------------------------------------------------------------
# Wall tables
# ---------------------------------------------------------------------------


def _points(entry: dict) -> list[Fraction]:
    try:
        return [rational(p) for p in entry["points"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"Wall entry without valid 'points': {entry}") from exc


def _base(value: Any, sc: SupercuspidalData) -> LData:
    if value == "sc":
        return LData((), sc.rep)
    if not isinstance(value, dict):
        raise ParseError(f"Wall base must be 'sc' or an L-data document, got {value!r}")
    value = dict(value)
    value.setdefault("kind", sc.kind.value)
    if value.get("tempered") != "sc":
        return ldata_from_document(parse_document(value, LDataDocument))
    value["tempered"] = []
    doc = parse_document(value, LDataDocument)
    cusp = CuspRegistry(doc.cusps)
    segments = tuple(LSegment(cusp(s.rho), rational(s.x), rational(s.y)) for s in doc.segments)
    return LData(segments, sc.rep)


def oracle_from_mapping(data: Any, sc: SupercuspidalData, fallback: ReducibilityOracle | None = None) -> TableOracle:
    """A :class:`TableOracle` from ``{"query1": [...], "query2": [...]}``.

    ``query1`` entries carry ``rho, a, b, base, points`` where ``base`` is
    ``"sc"`` or an L-data document (``"tempered": "sc"`` reuses the
    supercuspidal); ``query2`` entries carry ``rho, a1, b1, a2, b2, points``.
    """
    if not isinstance(data, dict):
        raise ParseError("A wall table is a JSON object with 'query1' and 'query2' lists")
    unknown = set(data) - {"query1", "query2", "description"}
    if unknown:
        raise ParseError(f"Unknown wall table keys {sorted(unknown)}")
    query1: dict[Query1Key, list[Fraction]] = {}
    query2: dict[Query2Key, list[Fraction]] = {}
    try:
        for entry in data.get("query1", []):
            key = (str(entry["rho"]), int(entry["a"]), int(entry["b"]), _base(entry.get("base", "sc"), sc))
            query1[key] = _points(entry)
        for entry in data.get("query2", []):
            key = (str(entry["rho"]), int(entry["a1"]), int(entry["b1"]), int(entry["a2"]), int(entry["b2"]))
            query2[key] = _points(entry)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"Malformed wall table entry: {exc}") from exc
    return TableOracle(query1, query2, fallback=fallback if fallback is not None else DefaultOracle())


def load_oracle(path: str | Path | None, sc: SupercuspidalData) -> ReducibilityOracle:
    if not path:
        return DefaultOracle()
    logger.info("Loading wall table %s", path)
    return oracle_from_mapping(read_json(path), sc)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


def arthur_verdict(pi: LData, decision: ArthurDecision) -> ArthurVerdict:
    return ArthurVerdict(
        ldata=str(pi),
        arthur=decision.arthur,
        reason=decision.reason,
        members=[format_compact(e) for e in decision.members],
        psis=[str(p) for p in decision.psis],
        psi_max=str(decision.psi_max) if decision.psi_max is not None else None,
        rejected=[
            RejectedCandidateModel(ems=format_compact(item.ems), reason=item.reason) for item in decision.rejected
        ],
    )


def corank_report_document(report: CorankReport) -> CorankReportDocument:
    return CorankReportDocument(
        sc=report.sc.rep.pretty(ascii_only=True),
        rho=report.rho.name,
        alpha=fmt(report.alpha),
        corank=report.corank,
        counts=dict(sorted(report.counts.items())),
        rows=[
            CorankRow(
                family=row.family,
                params=dict(row.params),
                subject=row.subject,
                computed=row.computed,
                expected=row.expected,
                agrees=row.agrees,
            )
            for row in report.rows
        ],
        mismatches=len(report.mismatches),
    )


def _yes(value: bool) -> str:
    return "yes" if value else "no"


def corank_report_markdown(report: CorankReport) -> str:
    """Markdown tables, one per family, for side-by-side reading."""
    lines = [
        f"# Corank ≤ {report.corank} along {report.rho.name} (α = {fmt(report.alpha)})",
        "",
        f"Supercuspidal: `{report.sc.rep.pretty(ascii_only=True)}`",
        "",
        "| corank | Arthur-type good-parity L-data |",
        "|---|---|",
    ]
    lines.extend(f"| {s} | {count} |" for s, count in sorted(report.counts.items()))
    families: dict[str, list] = {}
    for row in report.rows:
        families.setdefault(row.family, []).append(row)
    for family, rows in families.items():
        lines += ["", f"## {family}", "", "| parameters | representation | computed | expected | |", "|---|---|---|---|---|"]
        for row in rows:
            params = ", ".join(f"{k} = {v}" for k, v in row.params)
            mark = "" if row.agrees else "**mismatch**"
            lines.append(f"| {params} | `{row.subject}` | {_yes(row.computed)} | {_yes(row.expected)} | {mark} |")
    lines += ["", f"Mismatches: {len(report.mismatches)}", ""]
    return "\n".join(lines)


def abar_report_document(result: AbarResult) -> AbarReport:
    regions = result.regions
    triples = sorted(
        regions.triples,
        key=lambda t: (t.corank, t.base_corank, str(t.base), t.shapes, t.signs),
    )
    return AbarReport(
        sc=regions.sc.rep.pretty(ascii_only=True),
        rho=regions.rho.name,
        alpha=fmt(regions.alpha),
        corank=regions.r,
        arrangements=len(regions.arrangements),
        chambers=[
            ChamberReport(
                shapes=list(t.shapes),
                base=t.base.pretty(ascii_only=True),
                base_corank=t.base_corank,
                signs=list(t.signs),
                bounded=t.bounded,
                witness=[fmt(p) for p in t.witness],
                verdict=result.verdict(t),
            )
            for t in triples
        ],
        in_abar=len(result.in_abar),
        conflicts=len(result.conflicts),
        misses=regions.misses,
        notes=result.notes,
    )
