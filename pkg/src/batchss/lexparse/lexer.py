from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import LexError
from ..refs import A0_RE, CR_RE, RC_RE

COMMANDS = frozenset({
    "byrows", "bycols", "copy", "debug", "eval", "exit", "fill", "format",
    "load", "output", "plot", "plot2d", "plot3d", "print", "quit", "srand",
})

KEYWORD_OPS = {"NOT": "!", "AND": "&&", "XOR": "^", "OR": "||"}

# longest first so lexing is greedy
OPERATORS = sorted(
    """<<= >>= ++ -- += -= *= /= %= &= ^= |= << >> <= >= == != && ||
    + - * / % < > = ! ~ & ^ | ? :""".split(),
    key=len, reverse=True,
)
PUNCT = frozenset(",;(){}")

_TAIL = r"(?![A-Za-z0-9_$\[])"
_CELL_RE = re.compile(
    rf"(?:{RC_RE.pattern}|{CR_RE.pattern}|{A0_RE.pattern}){_TAIL}"
)
_IDENT_RE = re.compile(r"[A-Za-z_]\w*")
_NUMBER_RE = re.compile(r"0[xX][0-9a-fA-F]+|(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_SPACE_RE = re.compile(r"\s+")


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # ident | cell | number | string | op | punct | command
    lexeme: str
    line: int = 1
    value: object = None

    def is_op(self, *ops: str) -> bool:
        return self.kind == "op" and self.value in ops

    def is_punct(self, ch: str) -> bool:
        return self.kind == "punct" and self.lexeme == ch

    def __repr__(self):
        return f"<{self.kind} {self.lexeme!r}>"


def tokenize(text: str, line: int = 1) -> list[Token]:
    """Split preprocessed text into tokens.

    Identifiers shaped like cell references get kind ``cell``; the parser
    decodes them.  String tokens keep only their contents.
    """
    tokens: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            j = _SPACE_RE.match(text, i).end()
            line += text.count("\n", i, j)
            i = j
            continue
        if ch in "\"'":
            j = text.find(ch, i + 1)
            nl = text.find("\n", i + 1)
            if j < 0 or (0 <= nl < j):
                raise LexError("unterminated string", line)
            tokens.append(Token("string", text[i:j + 1], line, text[i + 1:j]))
            i = j + 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            m = _NUMBER_RE.match(text, i)
            lex = m.group()
            val = float(int(lex, 16)) if lex[:2] in ("0x", "0X") else float(lex)
            tokens.append(Token("number", lex, line, val))
            i = m.end()
            continue
        if ch.isalpha() or ch in "_$":
            m = _CELL_RE.match(text, i)
            if m:
                tokens.append(Token("cell", m.group(), line))
                i = m.end()
                continue
            m = _IDENT_RE.match(text, i)
            if not m:
                raise LexError(f"illegal character {ch!r}", line)
            word = m.group()
            up = word.upper()
            if up in KEYWORD_OPS:
                tokens.append(Token("op", word, line, KEYWORD_OPS[up]))
            elif word in COMMANDS:
                tokens.append(Token("command", word, line, word))
            else:
                tokens.append(Token("ident", word, line, word))
            i = m.end()
            continue
        if ch in PUNCT:
            tokens.append(Token("punct", ch, line, ch))
            i += 1
            continue
        for op in OPERATORS:
            if text.startswith(op, i):
                tokens.append(Token("op", op, line, op))
                i += len(op)
                break
        else:
            raise LexError(f"illegal character {ch!r}", line)
    return tokens
