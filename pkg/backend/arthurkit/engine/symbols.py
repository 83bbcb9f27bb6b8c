"""
Text forms of extended multi-segments.

Compact form (parseable)::

    Sp:{([3,0];1,+),([3,2];1,+),([3,3];0,-)}@rho ∪ {([1,1];0,+)}@tau[2,symplectic]

The group prefix is optional; without it the family is inferred from the
parity of the rows. Blocks may be joined by ``∪`` or ``U``. The cusp suffix
``[dim,duality]`` is omitted for the default (1, orthogonal).

Matrix form (output only) draws every row over the columns B…A with
◁ ⊕ ⊖ ▷, or ``< + - >`` in ASCII mode.
"""

import re

from ..enums import Duality, GroupKind
from ..exceptions import ArthurkitError, ParseError
from .core_model import CuspLabel, ExtendedMultiSegment, ExtendedSegment
from .halfint import fmt

_NUMBER = r"-?\d+(?:/\d+)?"
_ROW = re.compile(
    rf"\(\s*\[\s*(?P<A>{_NUMBER})\s*,\s*(?P<B>{_NUMBER})\s*\]\s*[;,]\s*(?P<l>\d+)\s*,\s*(?P<eta>[+-]1?)\s*\)"
)
_CUSP = re.compile(r"@\s*(?P<name>[A-Za-z_][\w'~]*)(?:\[\s*(?P<dim>\d+)\s*,\s*(?P<duality>\w+)\s*\])?")
_PREFIX = re.compile(r"\s*(?P<kind>Sp|SO)\s*:")

GLYPHS = {"left": "◁", "right": "▷", "plus": "⊕", "minus": "⊖", "blank": "·"}
ASCII_GLYPHS = {"left": "<", "right": ">", "plus": "+", "minus": "-", "blank": "."}


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, char: str):
        if self.peek() != char:
            found = self.peek() or "end of input"
            raise ParseError(f"Expected {char!r} but found {found!r}", position=self.pos)
        self.pos += 1

    def match(self, pattern: re.Pattern):
        self.skip_ws()
        found = pattern.match(self.text, self.pos)
        if found:
            self.pos = found.end()
        return found

    def at_end(self) -> bool:
        return self.peek() == ""


def _parse_block(reader: _Reader) -> tuple[CuspLabel, list[ExtendedSegment]]:
    reader.expect("{")
    rows: list[ExtendedSegment] = []
    while reader.peek() != "}":
        start = reader.pos
        found = reader.match(_ROW)
        if not found:
            raise ParseError("Malformed extended segment", position=reader.pos)
        try:
            rows.append(
                ExtendedSegment(
                    found["A"],
                    found["B"],
                    int(found["l"]),
                    -1 if found["eta"].startswith("-") else 1,
                )
            )
        except ArthurkitError as exc:
            raise ParseError(exc.message, position=start) from exc
        if reader.peek() == ",":
            reader.pos += 1
        elif reader.peek() != "}":
            raise ParseError("Expected ',' or '}' after a row", position=reader.pos)
    reader.expect("}")
    cusp = reader.match(_CUSP)
    if cusp is None:
        return CuspLabel("rho"), rows
    duality = Duality.ORTHOGONAL
    if cusp["duality"]:
        try:
            duality = Duality(cusp["duality"])
        except ValueError as exc:
            raise ParseError(f"Unknown duality {cusp['duality']!r}", position=reader.pos) from exc
    return CuspLabel(cusp["name"], int(cusp["dim"] or 1), duality), rows


def parse_symbol(text: str, kind: GroupKind | None = None) -> ExtendedMultiSegment:
    """Read the compact form; raises ParseError with a character position."""
    reader = _Reader(text)
    prefix = reader.match(_PREFIX)
    if prefix:
        kind = GroupKind(prefix["kind"])
    blocks: list[tuple[CuspLabel, list[ExtendedSegment]]] = []
    while True:
        blocks.append(_parse_block(reader))
        nxt = reader.peek()
        if nxt in ("∪", "U"):
            reader.pos += 1
            continue
        break
    if not reader.at_end():
        raise ParseError(f"Unexpected trailing text {reader.text[reader.pos:]!r}", position=reader.pos)

    candidates = [kind] if kind else [GroupKind.SP, GroupKind.ODD_SO]
    if not any(rows for _, rows in blocks) and kind is None:
        candidates = [GroupKind.ODD_SO]
    last_error: ArthurkitError | None = None
    for candidate in candidates:
        try:
            return ExtendedMultiSegment(candidate, tuple((rho, tuple(rows)) for rho, rows in blocks))
        except ArthurkitError as exc:
            last_error = exc
    assert last_error is not None
    raise last_error


def _format_cusp(rho: CuspLabel) -> str:
    if rho.dim == 1 and rho.duality == Duality.ORTHOGONAL:
        return f"@{rho.name}"
    return f"@{rho.name}[{rho.dim},{rho.duality.value}]"


def format_row(row: ExtendedSegment) -> str:
    return f"([{fmt(row.A)},{fmt(row.B)}];{row.l},{'+' if row.eta == 1 else '-'})"


def format_compact(ems: ExtendedMultiSegment, with_kind: bool = True) -> str:
    """Inverse of :func:`parse_symbol`."""
    blocks = [
        "{" + ",".join(format_row(row) for row in rows) + "}" + _format_cusp(rho)
        for rho, rows in ems.blocks
    ]
    body = " ∪ ".join(blocks) if blocks else "{}"
    return f"{ems.kind.value}:{body}" if with_kind else body


def row_glyphs(row: ExtendedSegment, ascii_only: bool = False) -> list[str]:
    """Symbols of one row from B to A."""
    glyphs = ASCII_GLYPHS if ascii_only else GLYPHS
    middle = row.b - 2 * row.l
    out = [glyphs["left"]] * row.l
    sign = row.eta
    for _ in range(middle):
        out.append(glyphs["plus"] if sign == 1 else glyphs["minus"])
        sign = -sign
    out.extend([glyphs["right"]] * row.l)
    return out


def print_symbol(ems: ExtendedMultiSegment, ascii_only: bool = False) -> str:
    """Matrix-of-symbols rendering, one table per ρ-block."""
    glyphs = ASCII_GLYPHS if ascii_only else GLYPHS
    if not ems.blocks:
        return f"{ems.group.label}: trivial"
    lines = [f"{ems.group.label}"]
    for rho, rows in ems.blocks:
        low = min(row.B for row in rows)
        high = max(row.A for row in rows)
        columns = [low + k for k in range(int(high - low) + 1)]
        headers = [fmt(c) for c in columns]
        width = max(len(h) for h in headers) + 1
        label_width = max(len(rho.name), 2) + 1
        lines.append(" " * label_width + "".join(h.rjust(width) for h in headers))
        for row in rows:
            cells = [glyphs["blank"]] * len(columns)
            for offset, glyph in enumerate(row_glyphs(row, ascii_only)):
                cells[int(row.B - low) + offset] = glyph
            lines.append(rho.name.ljust(label_width) + "".join(c.rjust(width) for c in cells))
    return "\n".join(lines)
