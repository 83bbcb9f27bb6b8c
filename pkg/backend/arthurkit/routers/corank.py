import logging

from fastapi import APIRouter
from fastapi.responses import PlainTextResponse

from ..engine import corank_engine
from ..engine.core_model import classify_parity, support_exponents
from ..engine.halfint import fmt
from ..models import ClassifyRequest, CorankReportDocument, CorankRequest, ParityResult
from ..services import serialization
from ..utils import domain_errors

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/corank", tags=["corank"])


@router.post("/classify", response_model=ParityResult)
def classify(request: ClassifyRequest):
    """Parity of π over a supercuspidal base, with its tempered reduction chain."""
    with domain_errors():
        pi = serialization.ldata_from_document(request.pi)
        sc = serialization.sc_from_document(request.sc)
        verdict = classify_parity(pi, sc)
        chain = None
        if pi.is_tempered and pi.kind == sc.kind:
            chain = [str(op) for op in corank_engine.tempered_chain(pi.tempered).ops]
        return ParityResult(
            ldata=str(pi),
            parity=verdict.parity,
            critical=verdict.critical,
            support={rho.name: [fmt(v) for v in values] for rho, values in support_exponents(pi, sc).items()},
            tempered_chain=chain,
        )


def _report(request: CorankRequest) -> corank_engine.CorankReport:
    sc = serialization.sc_from_document(request.sc)
    rho = sc.cusp(request.rho) or serialization.CuspRegistry(request.sc.cusps)(request.rho)
    return corank_engine.corank_report(sc, rho, request.corank)


@router.post("/report", response_model=CorankReportDocument)
def report(request: CorankRequest):
    """Arthur verdicts of the tabulated corank families, against their closed forms."""
    with domain_errors():
        return serialization.corank_report_document(_report(request))


@router.post("/report.md", response_class=PlainTextResponse)
def report_markdown(request: CorankRequest):
    with domain_errors():
        return serialization.corank_report_markdown(_report(request))
