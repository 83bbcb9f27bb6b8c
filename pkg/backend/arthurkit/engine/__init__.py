"""
Symbolic engine: value types, operators on extended multi-segments, packets,
the Arthur-type decision, corank tables and Π_Ā regions.
"""

from .arthur_decider import ArthurDecision, is_arthur_type, is_arthur_type_v2
from .core_model import (
    ArthurParameter,
    ArthurSummand,
    CuspLabel,
    EnhancedTempered,
    ExtendedMultiSegment,
    ExtendedSegment,
    LData,
    LSegment,
    SupercuspidalData,
)
from .packet_engine import enumerate_packet, intersection_set, pi_of, pi_of_variant2

__all__ = [
    "ArthurDecision",
    "ArthurParameter",
    "ArthurSummand",
    "CuspLabel",
    "EnhancedTempered",
    "ExtendedMultiSegment",
    "ExtendedSegment",
    "LData",
    "LSegment",
    "SupercuspidalData",
    "enumerate_packet",
    "intersection_set",
    "is_arthur_type",
    "is_arthur_type_v2",
    "pi_of",
    "pi_of_variant2",
]
