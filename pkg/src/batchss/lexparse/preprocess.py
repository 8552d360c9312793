"""Comment stripping, line continuation and ``#define`` macros.

The preprocessor is fed one physical line at a time so standard input can be
handled incrementally; :func:`preprocess` wraps it for whole texts.
"""

from __future__ import annotations

import re

from ..errors import LexError

_DEFINE_RE = re.compile(r"\s*#\s*define\s+([A-Za-z_]\w*)(?:\s+(.*?))?\s*$")
_IDENT_RE = re.compile(r"[A-Za-z_$][\w$]*")


class Preprocessor:
    def __init__(self, macros: dict[str, str] | None = None):
        self.macros: dict[str, str] = {} if macros is None else macros
        self._pending = ""
        self._pending_line = 0
        self._in_comment = False
        self._comment_line = 0
        self._was_in_comment = False
        self.lineno = 0

    def feed(self, line: str) -> tuple[int, str] | None:
        """Process one physical line (without its newline).

        Returns ``(first_line_number, text)`` for each completed logical line,
        or None while a continuation or macro definition swallows it.
        """
        self.lineno += 1
        if not self._pending:
            self._pending_line = self.lineno
        if line.endswith("\\") and not self._in_comment:
            self._pending += line[:-1]
            return None
        logical = self._pending + line
        self._pending = ""
        start = self._pending_line
        text = self._strip_comments(logical)
        m = _DEFINE_RE.match(text)
        if m and not self._was_in_comment:
            self.macros[m.group(1)] = m.group(2) or ""
            return None
        return start, self.expand(text)

    def finish(self) -> None:
        """Flush state at end of input; complain about an open comment."""
        self._pending = ""
        if self._in_comment:
            self._in_comment = False
            raise LexError("unterminated block comment", self._comment_line)

    def _strip_comments(self, text: str) -> str:
        self._was_in_comment = self._in_comment
        out = []
        i, n = 0, len(text)
        quote = None
        while i < n:
            ch = text[i]
            if self._in_comment:
                j = text.find("*/", i)
                if j < 0:
                    return "".join(out)
                self._in_comment = False
                out.append(" ")
                i = j + 2
                continue
            if quote:
                out.append(ch)
                if ch == quote:
                    quote = None
                i += 1
            elif ch in "\"'":
                quote = ch
                out.append(ch)
                i += 1
            elif text.startswith("//", i):
                break
            elif text.startswith("/*", i):
                self._in_comment = True
                self._comment_line = self.lineno
                i += 2
            else:
                out.append(ch)
                i += 1
        return "".join(out)

    def expand(self, text: str) -> str:
        """Single-pass whole-token macro substitution outside string literals."""
        if not self.macros:
            return text
        out = []
        i, n = 0, len(text)
        while i < n:
            ch = text[i]
            if ch in "\"'":
                j = text.find(ch, i + 1)
                j = n if j < 0 else j + 1
                out.append(text[i:j])
                i = j
                continue
            m = _IDENT_RE.match(text, i)
            if m and (i == 0 or not (text[i - 1].isalnum() or text[i - 1] in "_.")):
                word = m.group()
                out.append(self.macros.get(word, word))
                i = m.end()
                continue
            out.append(ch)
            i += 1
        return "".join(out)


def preprocess(source: str, macros: dict[str, str] | None = None) -> str:
    """Preprocess a complete input unit and return the resulting text."""
    pp = Preprocessor(macros)
    lines = []
    for raw in source.split("\n"):
        got = pp.feed(raw)
        if got is not None:
            lines.append(got[1])
    pp.finish()
    return "\n".join(lines)
