"""
Exact half-integers.

Every exponent the engine manipulates (segment ends, reducibility points,
twists of good-parity summands) lives in ½ℤ. ``HalfInt`` is a ``Fraction``
restricted to denominators 1 and 2; arithmetic falls back to plain
``Fraction`` so intermediate values such as α/3 never raise.
"""

from fractions import Fraction
from typing import Any

from ..exceptions import InvalidInputError, ParseError

HALF = Fraction(1, 2)


class HalfInt(Fraction):
    """A rational number with denominator 1 or 2."""

    __slots__ = ()

    def __new__(cls, value: Any = 0, denominator: int | None = None):
        try:
            self = super().__new__(cls, value, denominator)
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise InvalidInputError(f"Not a rational number: {value!r}") from exc
        if self.denominator not in (1, 2):
            raise InvalidInputError(f"{self} is not a half-integer")
        return self

    @classmethod
    def from_doubled(cls, doubled: int) -> "HalfInt":
        return cls(doubled, 2)

    @property
    def doubled(self) -> int:
        return int(self * 2)

    def __repr__(self) -> str:
        return f"HalfInt({fmt(self)!r})"


def half(value: Any) -> HalfInt:
    """Coerce ints, Fractions and strings like ``"-3/2"`` to ``HalfInt``."""
    if isinstance(value, HalfInt):
        return value
    if isinstance(value, str):
        try:
            value = Fraction(value.strip())
        except ValueError as exc:
            raise ParseError(f"Cannot read {value!r} as a half-integer") from exc
    if isinstance(value, float):
        value = Fraction(value).limit_denominator(2)
    return HalfInt(value)


def rational(value: Any) -> Fraction:
    """Coerce to an exact rational; strings may be ``"1/3"`` or ``"0.3"``."""
    if isinstance(value, Fraction):
        return value
    try:
        if isinstance(value, float):
            return Fraction(str(value))
        return Fraction(str(value).strip()) if isinstance(value, str) else Fraction(value)
    except (ValueError, TypeError) as exc:
        raise ParseError(f"Cannot read {value!r} as a rational number") from exc


def is_half_integral(value: Fraction) -> bool:
    return Fraction(value).denominator in (1, 2)


def is_integral(value: Fraction) -> bool:
    return Fraction(value).denominator == 1


def fmt(value: Fraction | int) -> str:
    """``3/2``, ``-1/2``, ``2``."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def sign_pow(exponent: Fraction | int) -> int:
    """(-1)^k for an integral k given in any exact form."""
    exponent = Fraction(exponent)
    if exponent.denominator != 1:
        raise InvalidInputError(f"(-1)^{fmt(exponent)} is undefined")
    return -1 if exponent.numerator % 2 else 1


def to_int(value: Fraction | int) -> int:
    value = Fraction(value)
    if value.denominator != 1:
        raise InvalidInputError(f"{fmt(value)} is not an integer")
    return value.numerator
