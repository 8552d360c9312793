from __future__ import annotations

import math

from ..refs import format_ref
from .nodes import Assign, Binary, Call, IncDec, ListNode, Num, RangeArg, Ref, Str, Sym, Ternary, Unary

_OPERATOR_NODES = (Unary, Binary, Ternary, Assign, IncDec)


def format_number(x: float) -> str:
    """Shortest text that reads back as exactly ``x``."""
    if math.isnan(x):
        return "(0.0/0.0)"
    if math.isinf(x):
        return "HUGE_VAL" if x > 0 else "-HUGE_VAL"
    text = repr(float(x))
    return text[:-2] if text.endswith(".0") else text


def format_string(s: str) -> str:
    return f"'{s}'" if '"' in s else f'"{s}"'


def render_formula(node, owner: tuple[int, int] = (0, 0), mode: str = "A0") -> str:
    """Formula text as seen from ``owner``.

    Every operator below the root is parenthesized, so the text parses back
    to the same tree regardless of precedence.
    """
    return _render(node, owner, mode, True)


def _render(node, owner, mode, root):
    if isinstance(node, Num):
        text = format_number(node.value)
        return text if root or not text.startswith("-") else f"({text})"
    if isinstance(node, Str):
        return format_string(node.value)
    if isinstance(node, Ref):
        return format_ref(node.ref, owner, mode)
    if isinstance(node, Sym):
        return node.name
    if isinstance(node, RangeArg):
        start = format_ref(node.range.start, owner, mode)
        end = format_ref(node.range.end, owner, mode)
        return start if start == end and node.range.start == node.range.end else f"{start}:{end}"
    if isinstance(node, Call):
        return f"{node.name}({','.join(_render(a, owner, mode, True) for a in node.args)})"
    if isinstance(node, ListNode):
        return "{" + ", ".join(_render(a, owner, mode, True) for a in node.items) + "}"
    sub = lambda n: _render(n, owner, mode, False)  # noqa: E731
    if isinstance(node, Unary):
        text = node.op + sub(node.operand)
    elif isinstance(node, Binary):
        text = sub(node.left) + node.op + sub(node.right)
    elif isinstance(node, Ternary):
        text = f"{sub(node.cond)} ? {sub(node.then)} : {sub(node.other)}"
    elif isinstance(node, Assign):
        text = f"{sub(node.target)} {node.op} {sub(node.value)}"
    elif isinstance(node, IncDec):
        text = node.op + sub(node.target) if node.prefix else sub(node.target) + node.op
    else:
        raise TypeError(f"cannot render {node!r}")
    return text if root else f"({text})"
