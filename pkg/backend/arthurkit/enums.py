from enum import Enum


class GroupKind(str, Enum):
    """Split classical group family."""

    SP = "Sp"  # Sp(2n), dual group SO(2n+1, C)
    ODD_SO = "SO"  # SO(2n+1), dual group Sp(2n, C)


class Duality(str, Enum):
    """Duality type of a supercuspidal representation of GL_d."""

    ORTHOGONAL = "orthogonal"
    SYMPLECTIC = "symplectic"
    NON_SELF_DUAL = "nonSelfDual"


class ParityClass(str, Enum):
    """Parity of a representation relative to its supercuspidal support."""

    NULL = "nullParity"
    GOOD = "goodParity"
    BAD = "badParity"


class OperatorKind(str, Enum):
    """Operators on extended multi-segments recorded in provenance trails."""

    ROW_EXCHANGE = "RowExchange"
    SHIFT = "Shift"
    ADD = "Add"
    UI = "UI"
    UI_INVERSE = "UIInv"
    DUAL_UI_DUAL = "DualUIDual"
    DUAL_UI_INVERSE_DUAL = "DualUIInvDual"
    PARTIAL_DUAL_MINUS = "PartialDualMinus"
    PARTIAL_DUAL_PLUS = "PartialDualPlus"
    DUAL = "Dual"


class UIType(str, Enum):
    """Case of a union-intersection."""

    ONE = "1"
    TWO = "2"
    THREE = "3"
    THREE_PRIME = "3'"
    NOT_APPLICABLE = "notApplicable"


class TempOpKind(str, Enum):
    """Tempered reduction cases."""

    I = "I"  # noqa: E741
    II = "II"
    III = "III"
    IV = "IV"
    V = "V"


class PrefilterVerdict(str, Enum):
    """Outcome of the cheap necessary conditions for Arthur type."""

    DEFINITELY_NOT = "definitelyNot"
    UNKNOWN = "unknown"


class AbarVerdict(str, Enum):
    """Membership of a point in the candidate unitary dual."""

    IN_ABAR = "inAbar"
    NOT_IN_ABAR = "notInAbar"
    UNKNOWN = "unknown"
