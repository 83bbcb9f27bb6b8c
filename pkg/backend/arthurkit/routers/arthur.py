from fastapi import APIRouter, Query

from ..engine import arthur_decider
from ..models import ArthurVerdict, LDataDocument
from ..services import serialization
from ..utils import domain_errors

router = APIRouter(prefix="/arthur", tags=["arthur"])


@router.post("", response_model=ArthurVerdict)
def decide(
    document: LDataDocument,
    v2: bool = False,
    rho_order: list[str] | None = Query(None),
):
    """
    Decide whether π is of Arthur type.

    Args:
        document: L-data of a good-parity representation
        v2: Use the lower ρ-removal algorithm
        rho_order: ρ names to try first
    """
    with domain_errors():
        pi = serialization.ldata_from_document(document)
        decide_fn = arthur_decider.is_arthur_type_v2 if v2 else arthur_decider.is_arthur_type
        decision = decide_fn(pi, rho_order)
        return serialization.arthur_verdict(pi, decision)
