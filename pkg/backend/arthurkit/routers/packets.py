from fastapi import APIRouter

from ..engine import packet_engine
from ..engine.symbols import format_compact
from ..models import ArthurParameterDocument, PacketListing, PacketMember
from ..services import serialization
from ..utils import domain_errors

router = APIRouter(prefix="/packets", tags=["packets"])


@router.post("", response_model=PacketListing)
def enumerate_packet(document: ArthurParameterDocument):
    """Π_ψ for a good-parity parameter, ordered by L-data."""
    with domain_errors():
        psi = serialization.psi_from_document(document)
        entries = packet_engine.enumerate_packet(psi)
        return PacketListing(
            psi=str(psi),
            size=len(entries),
            members=[PacketMember(symbol=format_compact(e.ems), ldata=str(e.ldata)) for e in entries],
        )
