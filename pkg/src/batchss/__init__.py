"""Batch spreadsheet processor with C-syntax formulas and convergent cycles."""

from .errors import LexError, ParseError, RegistrationError, SSError
from .evaluator import ConvergenceReport, EvalContext, Evaluator
from .funcs import FunctionEntry, Rng, register_user_function, user_function
from .model import Sheet
from .session import Session

__version__ = "0.1.0"


def run_script(text: str, out=None, err=None) -> Session:
    """Run ``text`` in a fresh session and return it for inspection."""
    import io

    session = Session(out=out if out is not None else io.StringIO(),
                      err=err if err is not None else io.StringIO())
    session.run_text(text)
    return session


__all__ = [
    "ConvergenceReport", "EvalContext", "Evaluator", "FunctionEntry", "LexError",
    "ParseError", "RegistrationError", "Rng", "SSError", "Session", "Sheet",
    "register_user_function", "run_script", "user_function",
]
