"""Formula evaluation and iterative sheet recalculation.

Formula trees are translated into Python expression source and compiled.
Two flavours are produced from the same generator: a function of the owner
cell ``(r, c)`` for one-off evaluation, and straight-line "sweep" functions
where every owner is a constant, so every cell key folds to a tuple literal.
A sweep evaluates its cells in order and stores each value immediately
(Gauss-Seidel style), reporting whether anything changed bitwise.
"""

from __future__ import annotations

import logging
import math
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Callable

from .constants import CONSTANTS
from .funcs import fmod, ldexp
from .lexparse.nodes import (
    Assign, Binary, Call, Formula, IncDec, Num, RangeArg, Ref, Str, Sym, Ternary, Unary,
)
from .model import Sheet
from .refs import MAX_COL, MAX_ROW, Range, traverse

log = logging.getLogger(__name__)

Coord = tuple[int, int]

_COMPARE = {"<", "<=", ">", ">=", "==", "!="}
_ARITH = {"+", "-", "*"}
_CHUNK = 800  # cells per generated sweep function


@dataclass
class ConvergenceReport:
    iterations: int
    converged: bool
    changes: list[bool] = field(default_factory=list)

    @property
    def message(self) -> str:
        n = self.iterations
        noun = "iteration" if n == 1 else "iterations"
        if self.converged:
            return f"ss_eval: converged after {n} {noun}"
        return f"ss_eval: still changing after {n} {noun}"


def same_value(a, b) -> bool:
    """Bitwise equality for floats (NaN equals NaN, 0.0 differs from -0.0)."""
    if isinstance(a, str) or isinstance(b, str):
        return a == b
    if a is None or b is None:
        return a is b
    if a != a:
        return b != b
    return a == b and (a != 0.0 or math.copysign(1.0, a) == math.copysign(1.0, b))


def snapshot(sheet: Sheet) -> dict:
    snap = {("cell", k): sheet.value(k) for k in sheet.formulas}
    snap.update((("sym", name), sheet.symbol_value(name)) for name in sheet.symbols)
    return snap


def detect_change(before: dict, after: dict) -> bool:
    return any(not same_value(before[k], after.get(k)) for k in before) or before.keys() != after.keys()


def fdiv(a: float, b: float) -> float:
    """IEEE division by zero."""
    if a != a or a == 0.0:
        return math.nan
    return math.copysign(math.inf, a) * math.copysign(1.0, b)


class EvalContext:
    """What a template-style function sees: the owner cell and the sheet."""

    def __init__(self, evaluator: Evaluator, owner: Coord):
        self.evaluator = evaluator
        self.sheet = evaluator.sheet
        self.owner = owner

    def eval(self, node) -> float:
        v = self.evaluator.eval_tree(node, self.owner)
        return 0.0 if isinstance(v, str) else v

    def values(self, args) -> list[float]:
        """Contributions of ``args`` as a range function counts them."""
        out = []
        for arg in args:
            if isinstance(arg, RangeArg):
                s, e = arg.range.corners(self.owner)
                out.extend(self.evaluator.range_values(s, e))
            elif isinstance(arg, Ref):
                out.extend(self.evaluator.cell_values(arg.ref.resolve(self.owner)))
            else:
                out.append(self.eval(arg))
        return out


class Compiler:
    """Generates Python source for formula trees."""

    def __init__(self, ev: Evaluator):
        self.ev = ev
        self.consts: dict[str, object] = {}
        self.ntemp = 0

    def temp(self) -> str:
        self.ntemp += 1
        return f"_t{self.ntemp}"

    def const(self, value) -> str:
        name = f"K{len(self.consts)}"
        self.consts[name] = value
        return name

    @staticmethod
    def axis(value: int, fixed: bool, base) -> str:
        if fixed:
            return str(value)
        if isinstance(base, int):
            return str(base + value)
        if value == 0:
            return base
        return f"{base}{value:+d}"

    def key(self, ref, R, C) -> str:
        return f"({self.axis(ref.row, ref.row_fixed, R)}, {self.axis(ref.col, ref.col_fixed, C)})"

    def number(self, x: float) -> str:
        if x != x:
            return "NAN"
        if math.isinf(x):
            return "INF" if x > 0 else "(-INF)"
        text = repr(float(x))
        return f"({text})" if x < 0 or text.startswith("-") else text

    def expr(self, node, R, C) -> str:
        if isinstance(node, Num):
            return self.number(node.value)
        if isinstance(node, Str):
            return "0.0"
        if isinstance(node, Ref):
            return f"G({self.key(node.ref, R, C)}, 0.0)"
        if isinstance(node, Sym):
            if node.name in CONSTANTS:
                return self.number(CONSTANTS[node.name])
            return f"SG({node.name!r}, 0.0)"
        if isinstance(node, Unary):
            a = self.expr(node.operand, R, C)
            if node.op == "-":
                return f"(-{a})"
            if node.op == "+":
                return a
            return f"(0.0 if {a} else 1.0)"
        if isinstance(node, Binary):
            return self.binary(node.op, node.left, node.right, R, C)
        if isinstance(node, Ternary):
            c = self.expr(node.cond, R, C)
            return f"({self.expr(node.then, R, C)} if {c} else {self.expr(node.other, R, C)})"
        if isinstance(node, Assign):
            if node.op == "=":
                value = self.expr(node.value, R, C)
            else:
                value = self.binary(node.op[:-1], node.target, node.value, R, C)
            return self.store(node.target, value, R, C)
        if isinstance(node, IncDec):
            delta = "1.0" if node.op == "++" else "-1.0"
            if node.prefix:
                return self.store(node.target, f"({self.expr(node.target, R, C)} + {delta})", R, C)
            if isinstance(node.target, Ref):
                return f"postc({self.key(node.target.ref, R, C)}, {delta})"
            return f"posts({node.target.name!r}, {delta})"
        if isinstance(node, Call):
            return self.call(node, R, C)
        if isinstance(node, RangeArg):
            self.ev.diagnose("a range is only allowed as a function argument")
            return "0.0"
        raise TypeError(f"cannot compile {node!r}")

    def store(self, target, value: str, R, C) -> str:
        if isinstance(target, Ref):
            return f"setc({self.key(target.ref, R, C)}, {value})"
        return f"sets({target.name!r}, {value})"

    def binary(self, op, left, right, R, C) -> str:
        a = self.expr(left, R, C)
        b = self.expr(right, R, C)
        if op in _ARITH:
            return f"({a} {op} {b})"
        if op == "/":
            if isinstance(right, Num) and right.value != 0 and math.isfinite(right.value):
                return f"({a} / {b})"
            ta, tb = self.temp(), self.temp()
            # both operands evaluated once, left to right, before choosing
            return f"({ta} / {tb} if (({ta} := {a}), ({tb} := {b}))[1] else fdiv({ta}, {tb}))"
        if op in _COMPARE:
            return f"(1.0 if {a} {op} {b} else 0.0)"
        if op == "&&":
            return f"(1.0 if {a} and {b} else 0.0)"
        if op == "||":
            return f"(1.0 if {a} or {b} else 0.0)"
        if op == "&":
            return f"(1.0 if ({a} != 0.0) & ({b} != 0.0) else 0.0)"
        if op == "|":
            return f"(1.0 if ({a} != 0.0) | ({b} != 0.0) else 0.0)"
        if op == "^":
            return f"(1.0 if ({a} != 0.0) != ({b} != 0.0) else 0.0)"
        if op == "%":
            return f"fmod({a}, {b})"
        if op == "<<":
            return f"ldexp({a}, {b})"
        if op == ">>":
            return f"ldexp({a}, -{b})"
        raise ValueError(f"unknown operator {op!r}")

    def call(self, node: Call, R, C) -> str:
        entry = self.ev.sheet.functions.get(node.name)
        if entry is None:
            self.ev.diagnose(f"unknown function {node.name!r}")
            return "0.0"
        args = node.args
        if entry.arity is not None and len(args) != entry.arity:
            self.ev.diagnose(f"{node.name} takes {entry.arity} argument(s), got {len(args)}")
            return "0.0"
        fname = self.const(entry.impl)
        owner = f"({R}, {C})"
        if entry.template:
            return f"{fname}({self.const(args)}, CTX({owner}))"
        if entry.kind == "range":
            parts = []
            for arg in args:
                if isinstance(arg, RangeArg):
                    rng = arg.range
                    parts.append(f"*rv({self.key(rng.start, R, C)}, {self.key(rng.end, R, C)})")
                elif isinstance(arg, Ref):
                    parts.append(f"*cv({self.key(arg.ref, R, C)})")
                else:
                    parts.append(self.expr(arg, R, C))
            return f"{fname}([{', '.join(parts)}])"
        out = []
        for i, arg in enumerate(args):
            if i == entry.lvalue_slot:
                if not isinstance(arg, (Ref, Sym)) or (isinstance(arg, Sym) and arg.name in CONSTANTS):
                    self.ev.diagnose(f"argument {i + 1} of {node.name} must be a cell or symbol")
                    return "0.0"
                out.append(f"lambda _v: {self.store(arg, '_v', R, C)}")
            elif isinstance(arg, RangeArg):
                self.ev.diagnose(f"{node.name} does not take a range")
                return "0.0"
            else:
                out.append(self.expr(arg, R, C))
        return f"{fname}({', '.join(out)})"


_BOUND = ("G", "V", "SG", "S", "setc", "sets", "postc", "posts", "fdiv", "fmod",
          "ldexp", "rv", "cv", "CTX", "INF", "NAN", "cs", "sstr", "ssym")
_PARAMS = ", ".join(f"{n}={n}" for n in _BOUND)


class Evaluator:
    def __init__(self, sheet: Sheet, diag: Callable[[str], None] | None = None,
                 trace: Callable[[str], None] | None = None):
        self.sheet = sheet
        self.diag = diag
        self.trace = trace
        self.flag = [False]
        self.ns = self._namespace()
        self._formula_cache: dict[int, tuple[Formula, int, Callable]] = {}
        self._node_cache: dict[int, tuple[object, int, Callable]] = {}
        self._plan_cache: OrderedDict = OrderedDict()

    def diagnose(self, msg: str) -> None:
        if self.diag is not None:
            self.diag(msg)
        else:
            log.warning(msg)

    # runtime helpers bound into generated code
    def _namespace(self) -> dict:
        sheet = self.sheet
        V, S = sheet.values, sheet.sym_values
        strings, sym_strings, formulas = sheet.strings, sheet.sym_strings, sheet.formulas
        flag = self.flag

        def setc(k, v):
            if 0 <= k[0] <= MAX_ROW and 0 <= k[1] <= MAX_COL:
                if k in strings:
                    del strings[k]
                    flag[0] = True
                elif not same_value(V.get(k), v):
                    flag[0] = True
                V[k] = v
            return v

        def sets(name, v):
            if name in sym_strings:
                del sym_strings[name]
                flag[0] = True
            elif not same_value(S.get(name), v):
                flag[0] = True
            S[name] = v
            return v

        def postc(k, delta):
            old = V.get(k, 0.0)
            setc(k, old + delta)
            return old

        def posts(name, delta):
            old = S.get(name, 0.0)
            sets(name, old + delta)
            return old

        def sstr(k, s):
            changed = strings.get(k) != s or V.get(k) != 0.0
            strings[k] = s
            V[k] = 0.0
            return changed

        def ssym(name, s):
            changed = sym_strings.get(name) != s or S.get(name) != 0.0
            sym_strings[name] = s
            S[name] = 0.0
            return changed

        return {
            "G": V.get, "V": V, "SG": S.get, "S": S,
            "setc": setc, "sets": sets, "postc": postc, "posts": posts,
            "fdiv": fdiv, "fmod": fmod, "ldexp": ldexp,
            "rv": self.range_values, "cv": self.cell_values,
            "CTX": lambda owner: EvalContext(self, owner),
            "INF": math.inf, "NAN": math.nan, "cs": math.copysign,
            "sstr": sstr, "ssym": ssym, "__builtins__": __builtins__,
        }

    def range_values(self, start: Coord, end: Coord) -> list[float]:
        formulas, V = self.sheet.formulas, self.sheet.values
        return [V.get(k, 0.0) for k in traverse(start, end) if k in formulas]

    def cell_values(self, coord: Coord) -> list[float]:
        if coord in self.sheet.formulas:
            return [self.sheet.values.get(coord, 0.0)]
        return []

    def _build(self, source: str, name: str, consts: dict) -> Callable:
        code = compile(source, "<formula>", "exec")
        local: dict = {}
        exec(code, {**self.ns, **consts}, local)
        return local[name]

    # single formulas
    def compile_node(self, node) -> Callable:
        """Function of the owner ``(r, c)`` returning the node's value."""
        comp = Compiler(self)
        if isinstance(node, Str):
            body = repr(node.value)
        else:
            body = comp.expr(node, "r", "c")
        return self._build(f"def _f(r, c, {_PARAMS}):\n    return {body}\n", "_f", comp.consts)

    def eval_tree(self, node, owner: Coord = (0, 0)):
        """Evaluate a formula tree at ``owner``; side effects happen as in a sweep."""
        version = self.sheet.functions.version
        hit = self._node_cache.get(id(node))
        if hit is None or hit[0] is not node or hit[1] != version:
            if len(self._node_cache) > 4096:
                self._node_cache.clear()
            hit = (node, version, self.compile_node(node))
            self._node_cache[id(node)] = hit
        return hit[2](*owner)

    # sweeps
    def _step_source(self, comp: Compiler, kind: str, key, formula: Formula) -> list[str]:
        root = formula.root
        if kind == "sym":
            if isinstance(root, Str):
                return [f"    if ssym({key!r}, {root.value!r}): ch = True"]
            expr = comp.expr(root, 0, 0)
            slot = f"S[{key!r}]"
        else:
            if isinstance(root, Str):
                return [f"    if sstr({key!r}, {root.value!r}): ch = True"]
            expr = comp.expr(root, key[0], key[1])
            slot = f"V[{key!r}]"
        return [
            f"    v = {expr}",
            f"    o = {slot}",
            "    if v != o or (v == 0.0 and cs(1.0, v) != cs(1.0, o)):",
            "        if v == v or o == o: ch = True",
            f"    {slot} = v",
        ]

    def _plan_function(self, steps: list[tuple[str, object, Formula]]) -> Callable:
        key = (self.sheet.functions.version, tuple((k, n, f.id) for k, n, f in steps))
        fn = self._plan_cache.get(key)
        if fn is not None:
            self._plan_cache.move_to_end(key)
            return fn
        comp = Compiler(self)
        chunks = []
        for i in range(0, max(len(steps), 1), _CHUNK):
            lines = [f"def _s(ch=False, {_PARAMS}):"]
            for kind, k, formula in steps[i:i + _CHUNK]:
                lines.extend(self._step_source(comp, kind, k, formula))
            lines.append("    return ch")
            chunks.append(self._build("\n".join(lines) + "\n", "_s", comp.consts))
        if len(chunks) == 1:
            fn = chunks[0]
        else:
            def fn(chunks=tuple(chunks)):
                ch = False
                for part in chunks:
                    ch = part() or ch
                return ch
        self._plan_cache[key] = fn
        if len(self._plan_cache) > 64:
            self._plan_cache.popitem(last=False)
        return fn

    def _symbol_steps(self):
        return [("sym", name, f) for name, f in self.sheet.symbols.items()]

    def _iterate(self, steps, iterations: int, label: str) -> ConvergenceReport:
        sweep = self._plan_function(steps)
        flag = self.flag
        changes = []
        for i in range(1, iterations + 1):
            flag[0] = False
            changed = sweep()
            if flag[0]:
                changed = True
            changes.append(changed)
            if self.trace is not None:
                self.trace(f"{label}: iteration {i}: {'changed' if changed else 'unchanged'}")
            if not changed:
                return ConvergenceReport(i, True, changes)
        return ConvergenceReport(iterations, False, changes)

    def eval_symbols(self, iterations: int = 2) -> ConvergenceReport:
        """Evaluate only the symbol table, in definition order."""
        return self._iterate(self._symbol_steps(), max(1, iterations), "eval symbols")

    def eval_sheet(self, iterations: int = 2) -> ConvergenceReport:
        """Symbols, then a forward and a backward sweep over the used cells."""
        forward = [("cell", k, self.sheet.formulas[k]) for k in sorted(self.sheet.formulas)]
        steps = self._symbol_steps() + forward + forward[::-1]
        return self._iterate(steps, max(1, iterations), "eval")

    def eval_range(self, rng: Range, iterations: int = 2, direction: str | None = None) -> ConvergenceReport:
        """Symbols, then one directed pass over the defined cells of ``rng``."""
        formulas = self.sheet.formulas
        coords = self.sheet.traverse(rng, direction)
        cells = [("cell", k, formulas[k]) for k in coords if k in formulas]
        return self._iterate(self._symbol_steps() + cells, max(1, iterations), "eval range")


__all__ = [
    "ConvergenceReport", "EvalContext", "Evaluator", "detect_change", "fdiv",
    "same_value", "snapshot",
]
