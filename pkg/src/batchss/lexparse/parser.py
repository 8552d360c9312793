"""Recursive-descent parser for formulas and commands.

Binary operators use precedence climbing over the C table; assignment and
the conditional operator are right associative as in C.
"""

from __future__ import annotations

from ..constants import CONSTANTS
from ..errors import ParseError
from ..refs import Range, col_index, in_bounds, parse_cellref
from .lexer import Token, tokenize
from .nodes import (
    Assign, Binary, Call, Command, FormulaAssign, IncDec, Num, RangeArg,
    RangeListAssign, Ref, Str, Sym, Ternary, Unary, anchor,
)

BINARY_PREC = {
    "||": 1,
    "&&": 2,
    "|": 3,
    "^": 4,
    "&": 5,
    "==": 6, "!=": 6,
    "<": 7, "<=": 7, ">": 7, ">=": 7,
    "<<": 8, ">>": 8,
    "+": 9, "-": 9,
    "*": 10, "/": 10, "%": 10,
}
ASSIGN_OPS = frozenset("= += -= *= /= %= <<= >>= &= ^= |=".split())
UNARY_OPS = frozenset("! ~ - +".split())

PRINT_SELECTORS = (
    "macros", "symbols", "formulas", "values", "formats", "pointers",
    "constants", "functions",
)


class Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0

    # token helpers
    def peek(self, k: int = 0) -> Token | None:
        i = self.pos + k
        return self.toks[i] if i < len(self.toks) else None

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of statement", self._line())
        self.pos += 1
        return tok

    def at_end(self) -> bool:
        return self.pos >= len(self.toks)

    def _line(self) -> int | None:
        if self.toks:
            return self.toks[min(self.pos, len(self.toks) - 1)].line
        return None

    def error(self, msg: str) -> ParseError:
        return ParseError(msg, self._line())

    def expect_punct(self, ch: str) -> Token:
        tok = self.next()
        if not tok.is_punct(ch):
            raise ParseError(f"expected {ch!r}, got {tok.lexeme!r}", tok.line)
        return tok

    def _is_range_start(self) -> bool:
        a, colon, b = self.peek(), self.peek(1), self.peek(2)
        return (a is not None and a.kind == "cell" and colon is not None
                and colon.is_op(":") and b is not None and b.kind == "cell")

    # expressions
    def parse_expression(self):
        left = self.parse_ternary()
        tok = self.peek()
        if tok is not None and tok.kind == "op" and tok.value in ASSIGN_OPS:
            self.pos += 1
            if not isinstance(left, (Ref, Sym)):
                raise ParseError("assignment to something that is not a cell or symbol", tok.line)
            self._check_target(left, tok.line)
            return Assign(tok.value, left, self.parse_expression())
        return left

    def parse_ternary(self):
        cond = self.parse_binary(1)
        tok = self.peek()
        if tok is not None and tok.is_op("?"):
            self.pos += 1
            then = self.parse_expression()
            colon = self.next()
            if not colon.is_op(":"):
                raise ParseError("expected ':' in conditional expression", colon.line)
            return Ternary(cond, then, self.parse_ternary())
        return cond

    def parse_binary(self, min_prec: int):
        left = self.parse_unary()
        while True:
            tok = self.peek()
            if tok is None or tok.kind != "op":
                return left
            prec = BINARY_PREC.get(tok.value)
            if prec is None or prec < min_prec:
                return left
            self.pos += 1
            right = self.parse_binary(prec + 1)
            left = Binary(tok.value, left, right)

    def parse_unary(self):
        tok = self.peek()
        if tok is not None and tok.kind == "op":
            if tok.value in ("++", "--"):
                self.pos += 1
                target = self.parse_unary()
                if not isinstance(target, (Ref, Sym)):
                    raise ParseError(f"{tok.value} needs a cell or symbol", tok.line)
                self._check_target(target, tok.line)
                return IncDec(tok.value, target, True)
            if tok.value in UNARY_OPS:
                self.pos += 1
                operand = self.parse_unary()
                # a signed number is a literal, so "a0 = -3;" is valued at once
                if tok.value == "-" and isinstance(operand, Num):
                    return Num(-operand.value)
                return Unary(tok.value, operand)
        return self.parse_postfix()

    def parse_postfix(self):
        node = self.parse_primary()
        while (tok := self.peek()) is not None and tok.is_op("++", "--"):
            if not isinstance(node, (Ref, Sym)):
                raise ParseError(f"{tok.value} needs a cell or symbol", tok.line)
            self._check_target(node, tok.line)
            self.pos += 1
            node = IncDec(tok.value, node, False)
        return node

    def parse_primary(self):
        tok = self.next()
        if tok.kind == "number":
            return Num(tok.value)
        if tok.kind == "string":
            return Str(tok.value)
        if tok.kind == "cell":
            return Ref(parse_cellref(tok.lexeme))
        if tok.kind in ("ident", "command"):
            nxt = self.peek()
            if nxt is not None and nxt.is_punct("("):
                return self.parse_call(tok.lexeme)
            return Sym(tok.lexeme)
        if tok.is_punct("("):
            node = self.parse_expression()
            self.expect_punct(")")
            return node
        raise ParseError(f"unexpected {tok.lexeme!r}", tok.line)

    def parse_call(self, name: str):
        self.expect_punct("(")
        args = []
        if not self.peek_punct(")"):
            while True:
                args.append(self.parse_arg())
                if self.peek_punct(","):
                    self.pos += 1
                    continue
                break
        self.expect_punct(")")
        return Call(name, tuple(args))

    def parse_arg(self):
        if self._is_range_start():
            return RangeArg(self.parse_range(check=False))
        return self.parse_expression()

    def peek_punct(self, ch: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.is_punct(ch)

    def parse_range(self, check: bool = True) -> Range:
        tok = self.next()
        if tok.kind != "cell":
            raise ParseError(f"expected a cell or range, got {tok.lexeme!r}", tok.line)
        start = parse_cellref(tok.lexeme)
        end = start
        nxt = self.peek()
        if nxt is not None and nxt.is_op(":"):
            self.pos += 1
            tok = self.next()
            if tok.kind != "cell":
                raise ParseError(f"expected a cell after ':', got {tok.lexeme!r}", tok.line)
            end = parse_cellref(tok.lexeme)
        rng = Range(start, end)
        for corner in rng.corners() if check else ():
            if not in_bounds(*corner):
                raise ParseError("range outside the grid", tok.line)
        return rng

    def _check_target(self, node, line):
        if isinstance(node, Sym) and node.name in CONSTANTS:
            raise ParseError(f"cannot assign to constant {node.name}", line)

    # statements
    def parse_statement(self):
        if self.at_end():
            return None
        first = self.peek()
        line = first.line
        if first.kind == "command":
            return self.parse_command()
        if first.kind == "cell" and self._range_list_ahead():
            rng = self.parse_range()
            self.next()  # '='
            return RangeListAssign(rng, self.parse_list(), line)
        expr = self.parse_expression()
        self._finish()
        if isinstance(expr, Assign):
            target, root = expr.target, (expr.value if expr.op == "=" else expr)
        elif isinstance(expr, IncDec):
            target, root = expr.target, expr
        else:
            raise ParseError("statement is not an assignment", line)
        if isinstance(target, Sym):
            return FormulaAssign(target.name, anchor(root, (0, 0)), line)
        owner = target.ref.resolve((0, 0))
        if not in_bounds(*owner):
            raise ParseError("assignment target outside the grid", line)
        return FormulaAssign(owner, anchor(root, owner), line)

    def _range_list_ahead(self) -> bool:
        k = 3 if self._is_range_start() else 1
        eq, brace = self.peek(k), self.peek(k + 1)
        return (eq is not None and eq.is_op("=") and brace is not None
                and brace.is_punct("{"))

    def parse_list(self) -> tuple:
        self.expect_punct("{")
        items = []
        if not self.peek_punct("}"):
            while True:
                items.append(self.parse_expression())
                if self.peek_punct(","):
                    self.pos += 1
                    continue
                break
        self.expect_punct("}")
        self._finish()
        return tuple(items)

    def _finish(self):
        if not self.at_end():
            tok = self.peek()
            if tok.is_op(":"):
                raise ParseError("a range is not allowed here", tok.line)
            raise ParseError(f"unexpected {tok.lexeme!r}", tok.line)

    # commands
    def parse_command(self) -> Command:
        kw = self.next()
        line = kw.line
        direction = None
        if kw.value not in ("byrows", "bycols"):
            kept = self.toks[: self.pos]
            for tok in self.toks[self.pos:]:
                if tok.kind == "command" and tok.value in ("byrows", "bycols"):
                    direction = tok.value
                else:
                    kept.append(tok)
            self.toks = kept
        handler = getattr(self, "_cmd_" + kw.value.replace("2d", "").replace("3d", ""))
        fields = handler() or {}
        self._finish()
        return Command(kw.value, direction=direction, line=line, **fields)

    def _cmd_byrows(self):
        return None

    _cmd_bycols = _cmd_exit = _cmd_quit = _cmd_byrows

    def _filename(self) -> str | None:
        tok = self.peek()
        if tok is None:
            return None
        if tok.kind == "string" or (tok.kind == "ident" and tok.value == "stdout"):
            self.pos += 1
            return tok.value
        if tok.is_op("-") and (self.pos + 1 == len(self.toks) or self.peek(1).kind != "number"):
            self.pos += 1
            return "-"
        return None

    def _cmd_copy(self):
        dest = self.parse_range()
        src = self.parse_range()
        return {"ranges": (dest, src)}

    def _cmd_debug(self):
        tok = self.peek()
        if tok is None:
            return {"word": "on"}
        self.pos += 1
        word = tok.lexeme.lower()
        if word not in ("on", "off"):
            raise ParseError("debug takes on or off", tok.line)
        return {"word": word}

    def _cmd_eval(self):
        fields = {}
        tok = self.peek()
        if tok is not None and tok.kind == "ident" and tok.value == "symbols":
            self.pos += 1
            fields["word"] = "symbols"
        elif tok is not None and tok.kind == "cell":
            fields["ranges"] = (self.parse_range(),)
        tok = self.peek()
        if tok is not None and tok.kind == "ident" and tok.value == "symbols":
            raise ParseError("eval takes a range or symbols, not both", tok.line)
        if not self.at_end():
            fields["exprs"] = (self.parse_expression(),)
        return fields

    def _cmd_fill(self):
        rng = self.parse_range()
        start = self.parse_expression()
        self.expect_punct(",")
        inc = self.parse_expression()
        return {"ranges": (rng,), "exprs": (start, inc)}

    def _cmd_format(self):
        tok = self.peek()
        if tok is None:
            raise self.error("format needs a notation or a format string")
        if tok.kind == "string":
            self.pos += 1
            return {"fmt": tok.value, "word": "global"}
        if tok.lexeme.upper() in ("A0", "RC", "CR") and self.pos + 1 == len(self.toks):
            self.pos += 1
            return {"word": tok.lexeme.upper()}
        if tok.kind == "ident" and tok.value in ("row", "col"):
            self.pos += 1
            idx_tok = self.next()
            if idx_tok.kind == "number":
                index = int(idx_tok.value)
            elif tok.value == "col" and idx_tok.kind == "ident" and len(idx_tok.lexeme) <= 2:
                index = col_index(idx_tok.lexeme)
            else:
                raise ParseError(f"bad {tok.value} index {idx_tok.lexeme!r}", idx_tok.line)
            return {"word": tok.value, "index": index, "fmt": self._fmt_string()}
        if tok.kind == "ident" and tok.value in ("cell", "range"):
            self.pos += 1
        rng = self.parse_range()
        return {"word": "range", "ranges": (rng,), "fmt": self._fmt_string()}

    def _fmt_string(self) -> str:
        tok = self.next()
        if tok.kind != "string":
            raise ParseError("expected a quoted format string", tok.line)
        return tok.value

    def _cmd_load(self):
        files = []
        while not self.at_end():
            tok = self.next()
            if tok.kind not in ("string", "ident"):
                raise ParseError("load takes file names", tok.line)
            files.append(tok.value)
        if not files:
            raise self.error("load needs a file name")
        return {"files": tuple(files)}

    def _cmd_output(self):
        name = self._filename()
        if name is None:
            raise self.error("output needs a file name")
        return {"filename": name}

    def _cmd_plot(self):
        fields = {"filename": self._filename()}
        if not self.at_end():
            fields["ranges"] = (self.parse_range(),)
        return fields

    def _cmd_print(self):
        fields = {"filename": self._filename()}
        tok = self.peek()
        if tok is not None and tok.kind == "cell":
            fields["ranges"] = (self.parse_range(),)
        selectors = []
        while not self.at_end():
            tok = self.next()
            word = tok.lexeme
            if word == "all":
                selectors.extend(PRINT_SELECTORS)
            elif word in PRINT_SELECTORS:
                selectors.append(word)
            else:
                raise ParseError(f"unknown print selector {word!r}", tok.line)
        fields["selectors"] = tuple(selectors) or ("values",)
        return fields

    def _cmd_srand(self):
        return {"exprs": (self.parse_expression(),)}


def parse_expression(text_or_tokens) -> object:
    """Parse a standalone expression (no owner anchoring)."""
    toks = tokenize(text_or_tokens) if isinstance(text_or_tokens, str) else text_or_tokens
    p = Parser(list(toks))
    node = p.parse_expression()
    p._finish()
    return node


def parse_formula(text: str, owner: tuple[int, int] = (0, 0)):
    """Parse formula text as if it were written into the cell ``owner``."""
    return anchor(parse_expression(text), owner)


def parse_statement(tokens: list[Token]):
    return Parser(list(tokens)).parse_statement()


def split_statements(tokens: list[Token]) -> tuple[list[list[Token]], list[Token]]:
    """Cut a token stream at ``;``.  Returns complete statements and the rest."""
    out, cur = [], []
    for tok in tokens:
        if tok.is_punct(";"):
            out.append(cur)
            cur = []
        else:
            cur.append(tok)
    return out, cur


def parse_program(text: str) -> list:
    stmts, rest = split_statements(tokenize(text))
    if rest:
        raise ParseError("missing ';' at end of input", rest[-1].line)
    return [s for s in (parse_statement(t) for t in stmts) if s is not None]


__all__ = [
    "Parser", "parse_expression", "parse_formula", "parse_statement",
    "parse_program", "split_statements",
]
