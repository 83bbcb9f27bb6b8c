import logging

from fastapi import APIRouter

from ..config import settings
from ..engine import abar_regions
from ..models import AbarReport, AbarRequest
from ..services import serialization
from ..utils import domain_errors

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/abar", tags=["abar"])


@router.post("", response_model=AbarReport)
def abar(request: AbarRequest):
    """
    Chambers of Π_Ā up to the requested corank.

    Args:
        request: Supercuspidal base, ρ, corank, an optional inline wall table
            and whether unsupported oracle queries abort the build
    """
    with domain_errors():
        sc = serialization.sc_from_document(request.sc)
        rho = sc.cusp(request.rho) or serialization.CuspRegistry(request.sc.cusps)(request.rho)
        if request.oracle is not None:
            oracle = serialization.oracle_from_mapping(request.oracle, sc)
        else:
            oracle = serialization.load_oracle(settings.oracle_file, sc)
        regions = abar_regions.build_arrangement(sc, rho, request.corank, oracle, strict=request.strict)
        result = abar_regions.contract_equivalence(regions)
        return serialization.abar_report_document(result)
