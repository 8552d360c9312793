"""Batch driver: ``ss [file ...]``.

Files named on the command line run first, in order; standard input is then
read for further statements.  Data goes to standard output (or wherever the
script redirects it); diagnostics and convergence messages go to standard
error.
"""

from __future__ import annotations

import os
import sys
from typing import TextIO

from .session import Session


def run(argv: list[str], stdin: TextIO | None = None, stdout: TextIO | None = None,
        stderr: TextIO | None = None) -> int:
    """Process ``argv`` file names then ``stdin``; return the exit status."""
    session = Session(out=stdout, err=stderr)
    status = 0
    try:
        for path in argv:
            if session.done:
                break
            if not session.run_file(path):
                status = 1
        if not session.done:
            session.run_stream(stdin if stdin is not None else sys.stdin)
    finally:
        session.close()
    return status


def main() -> None:
    try:
        status = run(sys.argv[1:])
    except BrokenPipeError:
        # reader went away (``ss x.ss | head``); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        status = 1
    sys.exit(status)


if __name__ == "__main__":
    main()
