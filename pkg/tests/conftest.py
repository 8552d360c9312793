import io
import sys
from pathlib import Path

import pytest

from batchss import Session

SCRIPTS = Path(__file__).parent / "scripts"


class Run:
    """Result of running a script in a fresh session."""

    def __init__(self, text: str):
        self.out_buf, self.err_buf = io.StringIO(), io.StringIO()
        self.session = Session(out=self.out_buf, err=self.err_buf)
        self.session.run_text(text)
        self.session.close()

    @property
    def out(self) -> str:
        return self.out_buf.getvalue()

    @property
    def err(self) -> str:
        return self.err_buf.getvalue()

    @property
    def sheet(self):
        return self.session.sheet

    def value(self, name: str):
        from batchss.refs import parse_cellref
        ref = parse_cellref(name)
        return self.sheet.value((ref.row, ref.col))


@pytest.fixture
def run():
    return Run


@pytest.fixture
def script():
    def read(name: str) -> str:
        return (SCRIPTS / name).read_text()
    return read


def pytest_configure(config):
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 5000))
