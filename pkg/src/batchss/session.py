"""A processing session: input streams in, statements executed, output routed."""

from __future__ import annotations

import sys
from typing import TextIO

from . import commands
from .errors import LexError, SSError
from .evaluator import Evaluator
from .funcs import trunc_int
from .lexparse.lexer import tokenize
from .lexparse.nodes import Command, Formula, FormulaAssign, RangeListAssign
from .lexparse.parser import parse_statement, split_statements
from .lexparse.preprocess import Preprocessor
from .model import Sheet

MAX_LOAD_DEPTH = 32


class Session:
    def __init__(self, out: TextIO | None = None, err: TextIO | None = None):
        self.stdout = out if out is not None else sys.stdout
        self.err = err if err is not None else sys.stderr
        self.sheet = Sheet()
        self.macros: dict[str, str] = {}
        self.evaluator = Evaluator(self.sheet, diag=self._eval_diag, trace=self._trace)
        self.output: TextIO = self.stdout
        self.debug = False
        self.done = False
        self.errors = 0
        self.last_report = None
        self._files: dict[str, TextIO] = {}
        self._source = "<stdin>"
        self._line = 0
        self._depth = 0

    # diagnostics
    def report(self, severity: str, message: str, line: int | None = None,
               source: str | None = None) -> None:
        where = source or self._source
        if line:
            where += f":{line}"
        self.err.write(f"{where}: {severity}: {message}\n")
        self.err.flush()
        if severity == "error":
            self.errors += 1

    def _eval_diag(self, message: str) -> None:
        self.report("error", message, self._line)

    def _trace(self, message: str) -> None:
        if self.debug:
            self.err.write(f"debug: {message}\n")

    # sinks
    def sink(self, name: str | None) -> TextIO:
        if name is None:
            return self.output
        if name in commands.STDOUT_NAMES:
            return self.stdout
        f = self._files.get(name)
        if f is None:
            try:
                f = open(name, "w")
            except OSError as exc:
                raise SSError(f"cannot open {name!r} for writing: {exc.strerror}") from None
            self._files[name] = f
        return f

    def write(self, text: str, name: str | None = None) -> None:
        if not text:
            return
        out = self.sink(name)
        out.write(text)
        out.flush()

    def close(self) -> None:
        for f in self._files.values():
            f.close()
        self._files.clear()

    # input
    def run_text(self, text: str, source: str = "<string>") -> None:
        """Run a complete input unit (a file's contents or a script string)."""
        reader = StatementReader(self, source)
        for line in text.split("\n"):
            if self.done:
                break
            reader.feed(line)
        reader.close()

    def run_file(self, path: str) -> bool:
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            self.report("error", f"cannot read {path}: {exc.strerror}", source=path)
            return False
        if self._depth >= MAX_LOAD_DEPTH:
            self.report("error", f"load nested too deeply at {path}")
            return False
        self._depth += 1
        try:
            self.run_text(text, path)
        finally:
            self._depth -= 1
        return True

    def run_stream(self, stream: TextIO, source: str = "<stdin>") -> None:
        """Read a stream line by line, executing each statement once complete."""
        reader = StatementReader(self, source)
        for line in stream:
            if self.done:
                break
            reader.feed(line.rstrip("\n"))
        reader.close()

    # execution
    def execute(self, stmt) -> None:
        self.sheet.rng.reset_cache()
        self._line = getattr(stmt, "line", 0)
        if self.debug:
            self.err.write(f"debug: {self._source}:{self._line}: {stmt}\n")
        sheet = self.sheet
        if isinstance(stmt, FormulaAssign):
            if isinstance(stmt.target, str):
                sheet.define_symbol(stmt.target, Formula(stmt.root))
            else:
                sheet.set_formula(stmt.target, Formula(stmt.root))
        elif isinstance(stmt, RangeListAssign):
            sheet.assign_range_list(stmt.range, stmt.items)
        elif isinstance(stmt, Command):
            self.run_command(stmt)
        else:
            raise TypeError(f"not a statement: {stmt!r}")

    def run_command(self, cmd: Command) -> None:
        sheet, ev = self.sheet, self.evaluator
        kw = cmd.keyword
        if kw in ("byrows", "bycols"):
            sheet.direction = kw
        elif kw == "copy":
            commands.cmd_copy(sheet, cmd.ranges[0], cmd.ranges[1], cmd.direction)
        elif kw == "debug":
            self.debug = cmd.word == "on"
        elif kw == "eval":
            self.cmd_eval(cmd)
        elif kw in ("exit", "quit"):
            self.done = True
        elif kw == "fill":
            commands.cmd_fill(sheet, ev, cmd.ranges[0], cmd.exprs[0], cmd.exprs[1], cmd.direction)
        elif kw == "format":
            rng = cmd.ranges[0] if cmd.ranges else None
            commands.cmd_format(sheet, cmd.word, cmd.fmt, rng, cmd.index)
        elif kw == "load":
            for path in cmd.files:
                if self.done:
                    break
                saved = self._source
                self.run_file(path)
                self._source = saved
        elif kw == "output":
            self.output = self.sink(cmd.filename)
        elif kw in ("plot", "plot2d", "plot3d"):
            rng = cmd.ranges[0] if cmd.ranges else None
            self.write(commands.cmd_plot(sheet, kw, rng, cmd.direction), cmd.filename)
        elif kw == "print":
            rng = cmd.ranges[0] if cmd.ranges else None
            text = commands.cmd_print(sheet, cmd.selectors, rng, cmd.direction, self.macros)
            self.write(text, cmd.filename)
        elif kw == "srand":
            seed = ev.eval_tree(cmd.exprs[0])
            sheet.rng.seed(0 if isinstance(seed, str) else trunc_int(seed))
        else:
            raise SSError(f"unknown command {kw!r}")

    def cmd_eval(self, cmd: Command):
        iterations = 2
        if cmd.exprs:
            n = self.evaluator.eval_tree(cmd.exprs[0])
            if isinstance(n, str) or not n == n or n < 1:
                raise SSError("eval: number of iterations must be at least 1")
            iterations = int(min(n, 1e12))
        ev = self.evaluator
        if cmd.word == "symbols":
            report = ev.eval_symbols(iterations)
        elif cmd.ranges:
            report = ev.eval_range(cmd.ranges[0], iterations, cmd.direction)
        else:
            report = ev.eval_sheet(iterations)
        self.last_report = report
        self.err.write(report.message + "\n")
        self.err.flush()
        return report


class StatementReader:
    """Turns lines of one input unit into executed statements."""

    def __init__(self, session: Session, source: str):
        self.session = session
        self.source = source
        self.pp = Preprocessor(session.macros)
        self.pending: list = []

    def feed(self, line: str) -> None:
        s = self.session
        try:
            got = self.pp.feed(line)
        except LexError as exc:
            s.report("error", exc.message, exc.line, self.source)
            return
        if got is None:
            return
        lineno, text = got
        try:
            self.pending.extend(tokenize(text, lineno))
        except LexError as exc:
            s.report("error", exc.message, exc.line, self.source)
            self.pending = []
            return
        stmts, self.pending = split_statements(self.pending)
        for toks in stmts:
            if s.done:
                return
            self._run(toks)

    def _run(self, toks) -> None:
        s = self.session
        s._source = self.source
        try:
            stmt = parse_statement(toks)
            if stmt is not None:
                s.execute(stmt)
        except SSError as exc:
            line = exc.line or (toks[0].line if toks else None)
            s.report("error", exc.message, line, self.source)

    def close(self) -> None:
        s = self.session
        try:
            self.pp.finish()
        except LexError as exc:
            s.report("error", exc.message, exc.line, self.source)
        if self.pending and not s.done:
            s.report("error", "statement not terminated by ';'", self.pending[0].line, self.source)
        self.pending = []
