"""Cell references, ranges and column-letter codes.

A :class:`CellRef` stores one value per axis plus a flag saying whether the
axis is fixed.  Fixed axes hold an absolute index.  Relative axes hold an
offset from the cell that owns the formula, so a formula shared between many
cells resolves differently at each of them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

from .errors import ParseError

MAX_ROW = 999
MAX_COL = 701  # "ZZ"
NROWS = MAX_ROW + 1
NCOLS = MAX_COL + 1

_AXIS = r"(?:(\d+)|\[([+-]?\d*)\])"
RC_RE = re.compile(rf"[Rr]{_AXIS}[Cc]{_AXIS}")
CR_RE = re.compile(rf"[Cc]{_AXIS}[Rr]{_AXIS}")
A0_RE = re.compile(r"(\$?)([A-Za-z]{1,2})(\$?)(\d+)")


def col_letters(col: int) -> str:
    """Column index to letters: 0 -> A, 25 -> Z, 26 -> AA, 701 -> ZZ."""
    if not 0 <= col <= MAX_COL:
        raise ValueError(f"column {col} out of range")
    if col < 26:
        return chr(65 + col)
    hi, lo = divmod(col - 26, 26)
    return chr(65 + hi) + chr(65 + lo)


def col_index(letters: str) -> int:
    letters = letters.upper()
    n = 0
    for ch in letters:
        n = n * 26 + (ord(ch) - 64)
    return n - 1


def in_bounds(row: int, col: int) -> bool:
    return 0 <= row <= MAX_ROW and 0 <= col <= MAX_COL


@dataclass(frozen=True, slots=True)
class CellRef:
    row: int
    col: int
    row_fixed: bool = False
    col_fixed: bool = False
    notation: str = "A0"

    def resolve(self, owner: tuple[int, int]) -> tuple[int, int]:
        """Absolute (row, col) as seen from ``owner``; may be out of bounds."""
        r = self.row if self.row_fixed else owner[0] + self.row
        c = self.col if self.col_fixed else owner[1] + self.col
        return r, c

    def anchored(self, owner: tuple[int, int]) -> CellRef:
        # A0 relative axes are written as absolute positions; turn them into
        # offsets from the owner.  Bracketed RC/CR axes already are offsets.
        if self.notation != "A0" or (self.row_fixed and self.col_fixed):
            return self
        row = self.row if self.row_fixed else self.row - owner[0]
        col = self.col if self.col_fixed else self.col - owner[1]
        return replace(self, row=row, col=col)


@dataclass(frozen=True, slots=True)
class Range:
    start: CellRef
    end: CellRef

    def corners(self, owner: tuple[int, int] = (0, 0)) -> tuple[tuple[int, int], tuple[int, int]]:
        return self.start.resolve(owner), self.end.resolve(owner)

    def anchored(self, owner: tuple[int, int]) -> Range:
        return Range(self.start.anchored(owner), self.end.anchored(owner))


def _axis(fixed_txt, rel_txt):
    if fixed_txt is not None:
        return int(fixed_txt), True
    rel_txt = rel_txt or "0"
    if rel_txt in "+-":
        rel_txt += "0"
    return int(rel_txt), False


def parse_cellref(lexeme: str) -> CellRef:
    """Parse a cell reference in A0, RC or CR notation.

    Relative A0 axes come back holding the written position; they become
    offsets once the parser anchors the formula at its owner cell.
    """
    m = RC_RE.fullmatch(lexeme)
    if m:
        row, rf = _axis(m.group(1), m.group(2))
        col, cf = _axis(m.group(3), m.group(4))
        ref = CellRef(row, col, rf, cf, "RC")
    elif m := CR_RE.fullmatch(lexeme):
        col, cf = _axis(m.group(1), m.group(2))
        row, rf = _axis(m.group(3), m.group(4))
        ref = CellRef(row, col, rf, cf, "CR")
    elif m := A0_RE.fullmatch(lexeme):
        col = col_index(m.group(2))
        row = int(m.group(4))
        ref = CellRef(row, col, m.group(3) == "$", m.group(1) == "$", "A0")
    else:
        raise ParseError(f"not a cell reference: {lexeme!r}")
    if ref.notation == "A0" or ref.row_fixed:
        if not 0 <= ref.row <= MAX_ROW:
            raise ParseError(f"row out of bounds in {lexeme!r}")
    if ref.notation == "A0" or ref.col_fixed:
        if not 0 <= ref.col <= MAX_COL:
            raise ParseError(f"column out of bounds in {lexeme!r}")
    return ref


def is_cell_name(text: str) -> bool:
    return bool(RC_RE.fullmatch(text) or CR_RE.fullmatch(text) or A0_RE.fullmatch(text))


def format_ref(ref: CellRef, owner: tuple[int, int], mode: str = "A0") -> str:
    """Render ``ref`` as the concrete cell it names from ``owner``."""
    r, c = ref.resolve(owner)
    if not in_bounds(r, c):
        return "#REF"
    if mode == "A0":
        return ("$" if ref.col_fixed else "") + col_letters(c) + ("$" if ref.row_fixed else "") + str(r)
    if mode == "RC":
        return f"R{r}C{c}"
    if mode == "CR":
        return f"C{c}R{r}"
    raise ValueError(f"unknown notation {mode!r}")


def traverse(start: tuple[int, int], end: tuple[int, int], direction: str = "byrows"):
    """Cells between two corners, walked from ``start`` towards ``end``."""
    r0, c0 = start
    r1, c1 = end
    rstep = 1 if r1 >= r0 else -1
    cstep = 1 if c1 >= c0 else -1
    rows = range(r0, r1 + rstep, rstep)
    cols = range(c0, c1 + cstep, cstep)
    if direction == "bycols":
        return [(r, c) for c in cols for r in rows]
    return [(r, c) for r in rows for c in cols]
