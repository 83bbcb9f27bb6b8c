"""
Command-line front end.

Every command prints one document on stdout: JSON by default, text with
``--pretty``. Domain errors print an error object and exit 2; parse errors
exit 64; an exhausted search budget exits 69.
"""

import base64
import logging
import sys
from collections.abc import Sequence
from fractions import Fraction
from pathlib import Path

import click

from .config import settings
from .engine import abar_regions, arthur_decider, corank_engine, ems_ops, packet_engine
from .engine.core_model import LData, SupercuspidalData, classify_parity, support_exponents
from .engine.halfint import fmt, rational
from .engine.symbols import format_compact, print_symbol
from .exceptions import ArthurkitError, ParseError
from .logging_setup import configure_logging
from .models import (
    ArthurParameterDocument,
    IntersectionListing,
    LDataDocument,
    LDataResult,
    MembershipResult,
    OperatorStep,
    PacketListing,
    PacketMember,
    ParityResult,
    SupercuspidalDocument,
    ValidationResult,
)
from .services import serialization
from .tools.region_plotter import RegionPlotter

logger = logging.getLogger(__name__)


def _emit(document, text: str | None = None) -> None:
    ctx = click.get_current_context()
    if ctx.obj.get("pretty") and text is not None:
        click.echo(text)
    else:
        click.echo(serialization.dumps(document))


def _ascii() -> bool:
    return click.get_current_context().obj.get("ascii", settings.symbol_ascii)


def _load_ldata(path: str) -> LData:
    return serialization.ldata_from_document(serialization.load(path, LDataDocument))


def _load_sc(path: str) -> tuple[SupercuspidalDocument, SupercuspidalData]:
    doc = serialization.load(path, SupercuspidalDocument)
    return doc, serialization.sc_from_document(doc)


def _resolve_rho(doc: SupercuspidalDocument, sc: SupercuspidalData, name: str):
    return sc.cusp(name) or serialization.CuspRegistry(doc.cusps)(name)


def _shapes(text: str) -> tuple[tuple[int, int], ...]:
    """``"1,1;2,1"`` → ((1,1),(2,1))."""
    try:
        shapes = []
        for part in text.split(";"):
            a, b = (int(v) for v in part.split(","))
            shapes.append((a, b))
    except ValueError as exc:
        raise ParseError(f"Speh shapes look like '1,1;2,1', got {text!r}") from exc
    return tuple(shapes)


def _point(text: str) -> tuple[Fraction, ...]:
    return tuple(rational(v) for v in text.split(","))


# ---------------------------------------------------------------------------
# Command group
# ---------------------------------------------------------------------------


class ArthurkitGroup(click.Group):
    """Turns domain errors into error documents and exit codes."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except ArthurkitError as exc:
            click.echo(serialization.dumps(exc.to_dict()))
            logger.debug("Command failed with %s", exc.code)
            ctx.exit(exc.exit_code)
        except click.UsageError as exc:
            click.echo(serialization.dumps({"error": "usage_error", "message": exc.format_message(), "details": {}}))
            ctx.exit(ParseError.exit_code)


@click.group(cls=ArthurkitGroup)
@click.option("--pretty", is_flag=True, help="Text output instead of JSON.")
@click.option("--json", "as_json", is_flag=True, help="JSON output (the default).")
@click.option("--ascii", "ascii_only", is_flag=True, help="ASCII glyphs in symbol matrices.")
@click.option("--threads", type=click.IntRange(min=1), default=None, help="Worker threads.")
@click.option("--budget", type=click.IntRange(min=1), default=None, help="Node budget per search.")
@click.option("--oracle", "oracle_file", type=click.Path(dir_okay=False), default=None, help="Wall table JSON.")
@click.option("--seed", type=int, default=None, help="Seed for sampling diagnostics.")
@click.option("--log-level", default=None, help="Logging level.")
@click.version_option(settings.version, prog_name="arthurkit")
@click.pass_context
def cli(ctx, pretty, as_json, ascii_only, threads, budget, oracle_file, seed, log_level):
    """Extended multi-segments and local Arthur packets of Sp(2n) and SO(2n+1)."""
    configure_logging(log_level)
    if threads is not None:
        settings.threads = threads
    if budget is not None:
        settings.node_budget = budget
    if oracle_file is not None:
        settings.oracle_file = oracle_file
    if seed is not None:
        settings.seed = seed
    ctx.ensure_object(dict)
    ctx.obj["pretty"] = pretty and not as_json
    ctx.obj["ascii"] = ascii_only or settings.symbol_ascii


@cli.command()
@click.argument("source")
def validate(source):
    """Check an extended multi-segment and report its basic invariants."""
    ems = serialization.load_ems(source)
    canonical = ems_ops.canonical_form(ems)
    result = ValidationResult(
        valid=True,
        symbol=format_compact(ems),
        group=ems.group.label,
        psi=str(ems.psi()),
        nonvanishing=ems_ops.nonvanishing(ems),
        canonical=format_compact(canonical),
    )
    _emit(result, f"{result.symbol}\n{result.group}, ψ = {result.psi}, nonvanishing: {result.nonvanishing}")


@cli.command("pi-of")
@click.argument("source")
@click.option("--variant2", is_flag=True, help="Peel along the lower ρ-removal instead.")
def pi_of(source, variant2):
    """Langlands data of π(E)."""
    ems = serialization.load_ems(source)
    pi = packet_engine.pi_of_variant2(ems) if variant2 else packet_engine.pi_of(ems)
    _emit(LDataResult(ldata=serialization.ldata_to_document(pi), text=str(pi)), pi.pretty(_ascii()))


@cli.command()
@click.argument("source")
def dual(source):
    """The dual extended multi-segment."""
    result = ems_ops.dual(serialization.load_ems(source))
    _emit({"symbol": format_compact(result)}, print_symbol(result, _ascii()))


@cli.command()
@click.argument("source")
def symbol(source):
    """Print the matrix form of an extended multi-segment."""
    ems = serialization.load_ems(source)
    _emit({"symbol": format_compact(ems), "matrix": print_symbol(ems, _ascii())}, print_symbol(ems, _ascii()))


@cli.command()
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
def packet(source):
    """Enumerate the packet Π_ψ of a good-parity parameter."""
    psi = serialization.psi_from_document(serialization.load(source, ArthurParameterDocument))
    entries = packet_engine.enumerate_packet(psi)
    listing = PacketListing(
        psi=str(psi),
        size=len(entries),
        members=[PacketMember(symbol=format_compact(e.ems), ldata=str(e.ldata)) for e in entries],
    )
    text = "\n".join(f"{m.symbol}  ↦  {m.ldata}" for m in listing.members)
    _emit(listing, f"Π_ψ for ψ = {listing.psi} ({listing.size} members)\n{text}")


def _is_ldata_document(path: str) -> bool:
    try:
        if not Path(path).is_file():
            return False
    except OSError:
        return False
    try:
        data = serialization.read_json(path)
    except ParseError:
        return False
    return isinstance(data, dict) and ("segments" in data or "tempered" in data) and "blocks" not in data


@cli.command()
@click.argument("source")
def intersect(source):
    """All Arthur parameters whose packets contain π (an EMS or an L-data document)."""
    if _is_ldata_document(source):
        pi = _load_ldata(source)
        decision = arthur_decider.is_arthur_type(pi)
        listing = IntersectionListing(
            ldata=str(pi),
            members=[format_compact(e) for e in decision.members],
            psis=[str(p) for p in decision.psis],
            psi_max=str(decision.psi_max) if decision.psi_max is not None else None,
        )
    else:
        result = packet_engine.intersection_set(serialization.load_ems(source))
        listing = IntersectionListing(
            ldata=str(result.ldata),
            members=[format_compact(e) for e in result.members],
            psis=[str(p) for p in result.psis],
            psi_max=str(result.psi_max),
            trail=[OperatorStep(**_step(tag.to_dict())) for tag in result.trail],
        )
    text = "\n".join(f"ψ = {p}" for p in listing.psis) or "π is not of Arthur type"
    _emit(listing, f"{listing.ldata}\n{text}")


def _step(data: dict) -> dict:
    args = {k: v for k, v in data.items() if k not in ("op", "rho")}
    return {"op": data["op"], "rho": data.get("rho"), "args": args}


@cli.command()
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
@click.option("--v2", "use_v2", is_flag=True, help="Use the lower ρ-removal algorithm.")
@click.option("--rho-order", default=None, help="Comma-separated ρ names to try first.")
def arthur(source, use_v2, rho_order):
    """Decide whether an L-data document is of Arthur type."""
    pi = _load_ldata(source)
    order = [name.strip() for name in rho_order.split(",")] if rho_order else None
    decision = (arthur_decider.is_arthur_type_v2 if use_v2 else arthur_decider.is_arthur_type)(pi, order)
    verdict = serialization.arthur_verdict(pi, decision)
    lines = [f"{verdict.ldata}: {'Arthur type' if verdict.arthur else 'not of Arthur type'}"]
    if not verdict.arthur:
        lines.append(f"reason: {verdict.reason}")
        lines.extend(f"  rejected {item.ems}: {item.reason}" for item in verdict.rejected)
    _emit(verdict, "\n".join(lines))


@cli.command()
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
@click.option("--sc", "sc_file", type=click.Path(exists=True, dir_okay=False), required=True)
def classify(source, sc_file):
    """Parity of π over a supercuspidal base, with the tempered reduction chain."""
    pi = _load_ldata(source)
    _, sc = _load_sc(sc_file)
    verdict = classify_parity(pi, sc)
    chain = None
    if pi.is_tempered and pi.kind == sc.kind:
        reduction = corank_engine.tempered_chain(pi.tempered)
        chain = [str(op) for op in reduction.ops]
    result = ParityResult(
        ldata=str(pi),
        parity=verdict.parity,
        critical=verdict.critical,
        support={rho.name: [fmt(v) for v in values] for rho, values in support_exponents(pi, sc).items()},
        tempered_chain=chain,
    )
    _emit(result, f"{result.ldata}: {result.parity.value}{' (critical)' if result.critical else ''}")


@cli.command()
@click.option("--sc", "sc_file", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--rho", required=True)
@click.option("--corank", type=click.IntRange(0, 3), required=True)
@click.option("--format", "fmt_", type=click.Choice(["markdown", "json"]), default="markdown")
def report(sc_file, rho, corank, fmt_):
    """Corank tables of Arthur-type families, checked against their closed forms."""
    doc, sc = _load_sc(sc_file)
    result = corank_engine.corank_report(sc, _resolve_rho(doc, sc, rho), corank)
    if fmt_ == "json":
        click.echo(serialization.dumps(serialization.corank_report_document(result)))
    else:
        click.echo(serialization.corank_report_markdown(result))


@cli.command()
@click.option("--sc", "sc_file", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--rho", required=True)
@click.option("--corank", type=click.IntRange(min=0), required=True)
@click.option("--strict", is_flag=True, help="Abort on the first unsupported oracle query.")
@click.option("--shapes", default=None, help="Speh shapes over the supercuspidal base, e.g. '1,1;1,1'.")
@click.option("--point", default=None, help="Locate this point among the chambers of --shapes.")
@click.option("--plot", "plot_file", type=click.Path(dir_okay=False), default=None, help="PNG of the --shapes arrangement.")
def abar(sc_file, rho, corank, strict, shapes, point, plot_file):
    """Chambers of Π_Ā up to the given corank."""
    doc, sc = _load_sc(sc_file)
    label = _resolve_rho(doc, sc, rho)
    oracle = serialization.load_oracle(settings.oracle_file, sc)
    regions = abar_regions.build_arrangement(sc, label, corank, oracle, strict=strict)
    result = abar_regions.contract_equivalence(regions, seed=settings.seed)
    base = LData((), sc.rep)
    if point is not None:
        if shapes is None:
            raise ParseError("--point needs --shapes")
        verdict, diagnostics = abar_regions.abar_membership(result, _shapes(shapes), base, _point(point))
        _emit(MembershipResult(verdict=verdict, diagnostics=diagnostics), verdict.value)
        return
    if plot_file is not None:
        if shapes is None:
            raise ParseError("--plot needs --shapes")
        image = RegionPlotter().run(abar_regions.region_dump(result, _shapes(shapes), base))
        if image.startswith("Error:"):
            raise ArthurkitError(image)
        Path(plot_file).write_bytes(base64.b64decode(image))
        logger.info("Region plot written to %s", plot_file)
    document = serialization.abar_report_document(result)
    lines = [
        f"{c.shapes} over {c.base}: {c.signs} {'bounded' if c.bounded else 'unbounded'} {c.verdict}"
        for c in document.chambers
        if c.shapes
    ]
    _emit(document, "\n".join(lines))


def run(argv: Sequence[str] | None = None) -> int:
    """Run one command and return its exit code."""
    code = cli.main(args=list(argv) if argv is not None else None, prog_name="arthurkit", standalone_mode=False)
    return code if isinstance(code, int) else 0


def main() -> None:
    sys.exit(run())
