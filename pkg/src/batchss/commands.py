"""Sheet-level commands and the text they print.

These functions take the sheet (and an evaluator where expressions are
involved) and either mutate it or return output text; routing that text to
a sink is the session's job.
"""

from __future__ import annotations

from typing import Callable

from .errors import SSError
from .evaluator import Evaluator
from .lexparse.nodes import Formula, Num
from .lexparse.render import format_number, format_string, render_formula
from .model import Coord, Sheet, check_format
from .refs import Range, col_letters

STDOUT_NAMES = ("stdout", "-")


def cmd_copy(sheet: Sheet, dest: Range, src: Range, direction: str | None = None) -> None:
    """Pair destination and source cells in traversal order and share formulas.

    Source cells are read live, so a destination that overlaps its source
    picks up formulas copied earlier in the same command.
    """
    dcoords = sheet.traverse(dest, direction)
    scoords = sheet.traverse(src, direction)
    if len(dcoords) != len(scoords):
        raise SSError(f"copy: destination has {len(dcoords)} cells, source has {len(scoords)}")
    for d, s in zip(dcoords, scoords):
        if d == s:
            continue
        formula = sheet.formulas.get(s)
        if formula is None:
            sheet.clear_cell(d)
        else:
            sheet.set_formula(d, formula)


def cmd_fill(sheet: Sheet, ev: Evaluator, rng: Range, start, increment,
             direction: str | None = None) -> None:
    first = _number(ev.eval_tree(start))
    step = _number(ev.eval_tree(increment))
    for i, coord in enumerate(sheet.traverse(rng, direction)):
        sheet.set_formula(coord, Formula(Num(first + i * step)))


def _number(v) -> float:
    return 0.0 if isinstance(v, str) else float(v)


def cmd_format(sheet: Sheet, word: str, fmt: str | None = None, rng: Range | None = None,
               index: int | None = None) -> None:
    if word in ("A0", "RC", "CR"):
        sheet.mode = word
        return
    check_format(fmt)
    if word == "global":
        sheet.global_format = fmt
    elif word == "row":
        sheet.row_formats[index] = fmt
    elif word == "col":
        sheet.col_formats[index] = fmt
    elif word == "range":
        for coord in sheet.traverse(rng):
            sheet.cell_formats[coord] = fmt
    else:
        raise SSError(f"format: unknown scope {word!r}")


# printing -----------------------------------------------------------------

def _axes(sheet: Sheet, rng: Range) -> tuple[range, range]:
    (r0, c0), (r1, c1) = sheet.resolve(rng.start), sheet.resolve(rng.end)
    rstep = 1 if r1 >= r0 else -1
    cstep = 1 if c1 >= c0 else -1
    return range(r0, r1 + rstep, rstep), range(c0, c1 + cstep, cstep)


def col_label(sheet: Sheet, col: int) -> str:
    return col_letters(col) if sheet.mode == "A0" else str(col)


def grid_text(sheet: Sheet, rng: Range, cell_text: Callable[[Coord], str],
              direction: str | None = None) -> str:
    """Tab-separated grid with column labels on top and row labels down the side.

    With ``bycols`` the grid is transposed: one output line per column.
    """
    rows, cols = _axes(sheet, rng)
    if (direction or sheet.direction) == "bycols":
        header = [str(r) for r in rows]
        lines = ["\t" + "\t".join(header)]
        for c in cols:
            fields = [cell_text((r, c)) for r in rows]
            lines.append((col_label(sheet, c) + "\t" + "\t".join(fields)).rstrip("\t"))
    else:
        header = [col_label(sheet, c) for c in cols]
        lines = ["\t" + "\t".join(header)]
        for r in rows:
            fields = [cell_text((r, c)) for c in cols]
            lines.append((str(r) + "\t" + "\t".join(fields)).rstrip("\t"))
    return "\n".join(lines) + "\n"


def format_value(sheet: Sheet, coord: Coord) -> str:
    value = sheet.value(coord)
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    return sheet.resolve_format(coord) % value


def print_values(sheet: Sheet, rng: Range, direction: str | None = None) -> str:
    return grid_text(sheet, rng, lambda k: format_value(sheet, k), direction)


def print_formulas(sheet: Sheet, rng: Range, direction: str | None = None) -> str:
    def text(k):
        f = sheet.formulas.get(k)
        return "" if f is None else render_formula(f.root, k, sheet.mode)
    return grid_text(sheet, rng, text, direction)


def print_pointers(sheet: Sheet, rng: Range, direction: str | None = None) -> str:
    def text(k):
        f = sheet.formulas.get(k)
        return "" if f is None else f"{f.id:x}"
    return grid_text(sheet, rng, text, direction)


def print_symbols(sheet: Sheet) -> str:
    lines = []
    for name, f in sheet.symbols.items():
        line = f"{name} = {render_formula(f.root, (0, 0), sheet.mode)}"
        if not f.is_literal:
            value = sheet.symbol_value(name)
            line += " = " + (format_string(value) if isinstance(value, str) else format_number(value or 0.0))
        lines.append(line)
    return "".join(line + "\n" for line in lines)


def print_macros(macros: dict[str, str]) -> str:
    return "".join(f"#define {name} {text}".rstrip() + "\n" for name, text in macros.items())


def print_constants(sheet: Sheet) -> str:
    return "".join(f"{name} = {value:.15g}\n" for name, value in sheet.constants.items())


def print_functions(sheet: Sheet) -> str:
    return "".join(line + "\n" for line in sheet.functions.listing())


def print_formats(sheet: Sheet) -> str:
    lines = [f'global "{sheet.global_format}"']
    lines += [f'row {r} "{f}"' for r, f in sorted(sheet.row_formats.items())]
    lines += [f'col {col_label(sheet, c)} "{f}"' for c, f in sorted(sheet.col_formats.items())]
    for (r, c), f in sorted(sheet.cell_formats.items()):
        lines.append(f'cell {col_letters(c)}{r} "{f}"')
    return "".join(line + "\n" for line in lines)


def cmd_print(sheet: Sheet, selectors, rng: Range | None = None, direction: str | None = None,
              macros: dict[str, str] | None = None) -> str:
    """Render each selector in the order given; blocks are separated by a blank line."""
    blocks = []
    area = rng if rng is not None else sheet.extent_range()
    for sel in selectors:
        if sel == "symbols":
            blocks.append(print_symbols(sheet))
        elif sel == "macros":
            blocks.append(print_macros(macros or {}))
        elif sel == "constants":
            blocks.append(print_constants(sheet))
        elif sel == "functions":
            blocks.append(print_functions(sheet))
        elif sel == "formats":
            blocks.append(print_formats(sheet))
        elif area is None:
            blocks.append("")
        elif sel == "values":
            blocks.append(print_values(sheet, area, direction))
        elif sel == "formulas":
            blocks.append(print_formulas(sheet, area, direction))
        elif sel == "pointers":
            blocks.append(print_pointers(sheet, area, direction))
        else:
            raise SSError(f"print: unknown selector {sel!r}")
    return "\n".join(b for b in blocks if b)


def cmd_plot(sheet: Sheet, kind: str, rng: Range | None = None, direction: str | None = None) -> str:
    """Plot data at full precision.

    ``plot``/``plot2d`` write one line per range row (per column with
    ``bycols``).  ``plot3d`` writes ``row col value`` triples in blocks, one
    block per row, separated by blank lines, the layout surface plotters read.
    """
    area = rng if rng is not None else sheet.extent_range()
    if area is None:
        return ""
    rows, cols = _axes(sheet, area)
    outer, inner = (cols, rows) if (direction or sheet.direction) == "bycols" else (rows, cols)

    def coord(i, j):
        return (j, i) if outer is cols else (i, j)

    if kind == "plot3d":
        blocks = []
        for i in outer:
            lines = []
            for j in inner:
                r, c = coord(i, j)
                lines.append(f"{r} {c} {sheet.number((r, c)):.17g}\n")
            blocks.append("".join(lines))
        return "\n".join(blocks)
    return "".join(
        " ".join(f"{sheet.number(coord(i, j)):.17g}" for j in inner) + "\n" for i in outer
    )
