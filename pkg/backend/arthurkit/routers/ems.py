import logging

from fastapi import APIRouter

from ..engine import ems_ops, packet_engine
from ..engine.symbols import format_compact, print_symbol
from ..models import (
    ExtendedMultiSegmentDocument,
    IntersectionListing,
    LDataResult,
    OperatorStep,
    ValidationResult,
)
from ..services import serialization
from ..utils import domain_errors

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/ems", tags=["ems"])


@router.post("/validate", response_model=ValidationResult)
def validate(document: ExtendedMultiSegmentDocument):
    """Check an extended multi-segment and report its basic invariants."""
    with domain_errors():
        ems = serialization.ems_from_document(document)
        return ValidationResult(
            valid=True,
            symbol=format_compact(ems),
            group=ems.group.label,
            psi=str(ems.psi()),
            nonvanishing=ems_ops.nonvanishing(ems),
            canonical=format_compact(ems_ops.canonical_form(ems)),
        )


@router.post("/pi", response_model=LDataResult)
def pi_of(document: ExtendedMultiSegmentDocument, variant2: bool = False):
    """
    Langlands data of π(E).

    Args:
        document: The extended multi-segment
        variant2: Peel along the lower ρ-removal instead
    """
    with domain_errors():
        ems = serialization.ems_from_document(document)
        pi = packet_engine.pi_of_variant2(ems) if variant2 else packet_engine.pi_of(ems)
        return LDataResult(ldata=serialization.ldata_to_document(pi), text=str(pi))


@router.post("/dual")
def dual(document: ExtendedMultiSegmentDocument):
    """The dual extended multi-segment, compact and as a symbol matrix."""
    with domain_errors():
        result = ems_ops.dual(serialization.ems_from_document(document))
        return {"symbol": format_compact(result), "matrix": print_symbol(result, ascii_only=True)}


@router.post("/intersection", response_model=IntersectionListing)
def intersection(document: ExtendedMultiSegmentDocument):
    """𝓔(π(E)) up to row exchange, with the parameters Ψ(π(E))."""
    with domain_errors():
        result = packet_engine.intersection_set(serialization.ems_from_document(document))
        return IntersectionListing(
            ldata=str(result.ldata),
            members=[format_compact(e) for e in result.members],
            psis=[str(p) for p in result.psis],
            psi_max=str(result.psi_max),
            trail=[
                OperatorStep(
                    op=step["op"],
                    rho=step.get("rho"),
                    args={k: v for k, v in step.items() if k not in ("op", "rho")},
                )
                for step in (tag.to_dict() for tag in result.trail)
            ],
        )
