"""The sheet: sparse cells, symbol table, format stores and constants.

Cells are kept column-store style in parallel dicts keyed by ``(row, col)``:
formula handles, numeric values and string values.  A string-valued cell
also holds 0.0 in ``values`` so numeric readers never need to check.  The
evaluator binds these dicts directly, so they are mutated in place and never
rebound.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple

from .constants import CONSTANTS, DEFAULT_FORMAT
from .errors import SSError
from .funcs import Rng, builtin_registry
from .lexparse.nodes import Formula, Num, Str, anchor
from .refs import CellRef, Range, in_bounds, is_cell_name, traverse

Coord = tuple[int, int]

# one printf conversion for a double, optional surrounding text
_FORMAT_RE = re.compile(r"^(?:[^%]|%%)*%[-+ #0]*(?:\d+)?(?:\.\d+)?[eEfFgG](?:[^%]|%%)*$")


def check_format(fmt: str) -> str:
    if not _FORMAT_RE.match(fmt):
        raise SSError(f"bad format string {fmt!r}")
    return fmt


class Extent(NamedTuple):
    min_row: int
    max_row: int
    min_col: int
    max_col: int


class CellView(NamedTuple):
    formula: Formula | None
    value: float | str | None
    format: str | None


@dataclass
class Symbol:
    formula: Formula


class Sheet:
    def __init__(self):
        self.formulas: dict[Coord, Formula] = {}
        self.values: dict[Coord, float] = {}
        self.strings: dict[Coord, str] = {}
        self.cell_formats: dict[Coord, str] = {}
        self.row_formats: dict[int, str] = {}
        self.col_formats: dict[int, str] = {}
        self.global_format = DEFAULT_FORMAT
        self.symbols: dict[str, Formula] = {}
        self.sym_values: dict[str, float] = {}
        self.sym_strings: dict[str, str] = {}
        self.mode = "A0"
        self.direction = "byrows"
        self.rng = Rng()
        self.functions = builtin_registry(self.rng)

    @property
    def constants(self):
        return CONSTANTS

    # cells
    def cell(self, coord: Coord) -> CellView:
        return CellView(self.formulas.get(coord), self.value(coord), self.cell_formats.get(coord))

    def value(self, coord: Coord) -> float | str | None:
        """Raw cached value: float, str, or None for a cell never given one."""
        if coord in self.strings:
            return self.strings[coord]
        return self.values.get(coord)

    def number(self, coord: Coord) -> float:
        return self.values.get(coord, 0.0)

    def is_defined(self, coord: Coord) -> bool:
        return coord in self.formulas

    def set_formula(self, coord: Coord, formula: Formula) -> None:
        """Attach ``formula`` to a cell.

        The cached value is kept until the next evaluation, except that a
        literal formula's value is known already and is stored at once.
        """
        if not in_bounds(*coord):
            raise SSError(f"cell {coord} outside the grid")
        self.formulas[coord] = formula
        root = formula.root
        if isinstance(root, Num):
            self.values[coord] = root.value
            self.strings.pop(coord, None)
        elif isinstance(root, Str):
            self.values[coord] = 0.0
            self.strings[coord] = root.value
        else:
            self.values.setdefault(coord, 0.0)
            self.strings.pop(coord, None)

    def clear_cell(self, coord: Coord) -> None:
        self.formulas.pop(coord, None)
        self.values.pop(coord, None)
        self.strings.pop(coord, None)

    def assign_range_list(self, rng: Range, items, direction: str | None = None) -> None:
        """Give each cell of ``rng`` its own formula, paired in traversal order.

        Items arrive as parsed at the origin and are anchored at their own
        destination, so relative references point where they were written.
        """
        coords = self.traverse(rng, direction)
        if len(coords) != len(items):
            raise SSError(f"range has {len(coords)} cells but the list has {len(items)} items")
        for coord, item in zip(coords, items):
            self.set_formula(coord, Formula(anchor(item, coord)))

    # symbols
    def define_symbol(self, name: str, formula: Formula) -> None:
        if is_cell_name(name):
            raise SSError(f"{name!r} is a cell name and cannot be a variable")
        if name in CONSTANTS:
            raise SSError(f"{name!r} is a constant")
        self.symbols[name] = formula
        root = formula.root
        if isinstance(root, Num):
            self.sym_values[name] = root.value
            self.sym_strings.pop(name, None)
        elif isinstance(root, Str):
            self.sym_values[name] = 0.0
            self.sym_strings[name] = root.value
        else:
            self.sym_values.setdefault(name, 0.0)
            self.sym_strings.pop(name, None)

    def symbol_value(self, name: str) -> float | str | None:
        if name in self.sym_strings:
            return self.sym_strings[name]
        return self.sym_values.get(name)

    # geometry
    def resolve(self, ref: CellRef, owner: Coord = (0, 0)) -> Coord:
        r, c = ref.resolve(owner)
        if not in_bounds(r, c):
            raise SSError(f"reference resolves outside the grid at ({r}, {c})")
        return r, c

    def traverse(self, rng: Range, direction: str | None = None, owner: Coord = (0, 0)) -> list[Coord]:
        start = self.resolve(rng.start, owner)
        end = self.resolve(rng.end, owner)
        return traverse(start, end, direction or self.direction)

    def used_extent(self) -> Extent | None:
        if not self.formulas:
            return None
        rows = [r for r, _ in self.formulas]
        cols = [c for _, c in self.formulas]
        return Extent(min(rows), max(rows), min(cols), max(cols))

    def extent_range(self) -> Range | None:
        ext = self.used_extent()
        if ext is None:
            return None
        return Range(CellRef(ext.min_row, ext.min_col, True, True),
                     CellRef(ext.max_row, ext.max_col, True, True))

    # formats
    def resolve_format(self, coord: Coord) -> str:
        fmt = self.cell_formats.get(coord)
        if fmt is None:
            fmt = self.row_formats.get(coord[0])
        if fmt is None:
            fmt = self.col_formats.get(coord[1])
        return fmt if fmt is not None else self.global_format
