"""Formula trees and parsed statements.

Nodes are immutable.  Whole formulas are wrapped in :class:`Formula`, the
shared handle that ``copy`` hands to several cells at once.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from ..refs import CellRef, Range


class Node:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Num(Node):
    value: float


@dataclass(frozen=True, slots=True)
class Str(Node):
    value: str


@dataclass(frozen=True, slots=True)
class Ref(Node):
    ref: CellRef


@dataclass(frozen=True, slots=True)
class Sym(Node):
    name: str


@dataclass(frozen=True, slots=True)
class Unary(Node):
    op: str  # - + ! ~
    operand: Node


@dataclass(frozen=True, slots=True)
class Binary(Node):
    op: str
    left: Node
    right: Node


@dataclass(frozen=True, slots=True)
class Ternary(Node):
    cond: Node
    then: Node
    other: Node


@dataclass(frozen=True, slots=True)
class Assign(Node):
    op: str  # = or a compound form such as +=
    target: Ref | Sym
    value: Node


@dataclass(frozen=True, slots=True)
class IncDec(Node):
    op: str  # ++ or --
    target: Ref | Sym
    prefix: bool


@dataclass(frozen=True, slots=True)
class RangeArg(Node):
    range: Range


@dataclass(frozen=True, slots=True)
class Call(Node):
    name: str
    args: tuple[Node, ...]


@dataclass(frozen=True, slots=True)
class ListNode(Node):
    items: tuple[Node, ...]


def children(node: Node) -> tuple[Node, ...]:
    if isinstance(node, Unary):
        return (node.operand,)
    if isinstance(node, Binary):
        return (node.left, node.right)
    if isinstance(node, Ternary):
        return (node.cond, node.then, node.other)
    if isinstance(node, Assign):
        return (node.target, node.value)
    if isinstance(node, IncDec):
        return (node.target,)
    if isinstance(node, (Call, ListNode)):
        return node.args if isinstance(node, Call) else node.items
    return ()


def walk(node: Node):
    yield node
    for ch in children(node):
        yield from walk(ch)


def anchor(node: Node, owner: tuple[int, int]) -> Node:
    """Rewrite relative A0 references as offsets from ``owner``."""
    if isinstance(node, Ref):
        return Ref(node.ref.anchored(owner))
    if isinstance(node, RangeArg):
        return RangeArg(node.range.anchored(owner))
    if isinstance(node, Unary):
        return Unary(node.op, anchor(node.operand, owner))
    if isinstance(node, Binary):
        return Binary(node.op, anchor(node.left, owner), anchor(node.right, owner))
    if isinstance(node, Ternary):
        return Ternary(anchor(node.cond, owner), anchor(node.then, owner), anchor(node.other, owner))
    if isinstance(node, Assign):
        return Assign(node.op, anchor(node.target, owner), anchor(node.value, owner))
    if isinstance(node, IncDec):
        return IncDec(node.op, anchor(node.target, owner), node.prefix)
    if isinstance(node, Call):
        return Call(node.name, tuple(anchor(a, owner) for a in node.args))
    if isinstance(node, ListNode):
        return ListNode(tuple(anchor(a, owner) for a in node.items))
    return node


_ids = itertools.count(0x1000)


class Formula:
    """Shared handle to a formula tree; ``id`` is what ``print pointers`` shows."""

    __slots__ = ("root", "id", "__weakref__")

    def __init__(self, root: Node):
        self.root = root
        self.id = next(_ids)

    def __repr__(self):
        return f"Formula({self.root!r}, id={self.id:x})"

    @property
    def is_literal(self) -> bool:
        return isinstance(self.root, (Num, Str))


# statements ---------------------------------------------------------------

@dataclass(frozen=True)
class FormulaAssign:
    target: CellRef | str  # absolute cell or symbol name
    root: Node
    line: int = 0


@dataclass(frozen=True)
class RangeListAssign:
    range: Range
    items: tuple[Node, ...]
    line: int = 0


@dataclass(frozen=True)
class Command:
    keyword: str
    ranges: tuple[Range, ...] = ()
    exprs: tuple[Node, ...] = ()
    filename: str | None = None
    files: tuple[str, ...] = ()
    selectors: tuple[str, ...] = ()
    direction: str | None = None
    word: str | None = None
    fmt: str | None = None
    index: int | None = None
    line: int = 0
    text: str = field(default="", compare=False)
