"""Numeric and range functions, the pseudo-random generator, and the
registration contract for user functions.

Every built-in is an ordinary Python function whose docstring starts with
its arity followed by a one-line description (``"2 arc tangent of y/x"``).
The registry reads arity and description from there, so adding a function
is a matter of writing it and listing it.  ``*`` marks a variadic arity.
"""

from __future__ import annotations

import importlib
import json
import math
import time as _time
from dataclasses import dataclass
from typing import Callable

from .constants import CONSTANTS
from .errors import RegistrationError

RAND_MAX = 32767


class Rng:
    """Portable C library ``rand``: 31-bit LCG, 15-bit outputs."""

    def __init__(self, seed: int = 1):
        self.seed(seed)

    def seed(self, seed: int) -> None:
        self.state = int(seed) & 0xFFFFFFFF
        self._spare = None

    def rand(self) -> int:
        self.state = (self.state * 1103515245 + 12345) & 0x7FFFFFFF
        return (self.state >> 16) & RAND_MAX

    def drand(self) -> float:
        return self.rand() / (RAND_MAX + 1.0)

    def irand(self, i: int) -> int:
        return int(i * (self.rand() / (RAND_MAX + 1.0)))

    def nrand(self) -> float:
        if self._spare is not None:
            z, self._spare = self._spare, None
            return z
        u1 = 1.0 - self.drand()  # (0, 1]
        u2 = self.drand()
        rad = math.sqrt(-2.0 * math.log(u1))
        self._spare = rad * math.sin(2.0 * math.pi * u2)
        return rad * math.cos(2.0 * math.pi * u2)

    def reset_cache(self) -> None:
        self._spare = None


@dataclass
class FunctionEntry:
    """One callable function.

    ``impl`` receives plain floats unless ``template`` is set, in which case
    it is called as ``impl(arg_nodes, ctx)`` and may evaluate or expand its
    arguments through the context.  Range functions without ``template``
    receive the list of contributing values.
    """

    name: str
    kind: str  # numeric | range
    arity: int | None  # None = variadic
    description: str
    impl: Callable
    lvalue_slot: int | None = None
    template: bool = False
    builtin: bool = False

    def signature(self) -> str:
        n = "*" if self.arity is None else str(self.arity)
        return f"{self.name}({n}) {self.kind} - {self.description}"


def parse_header(doc: str | None) -> tuple[int | None, str]:
    """Arity and description from a function's first documentation line."""
    first = (doc or "").strip().splitlines()[0] if (doc or "").strip() else ""
    head, _, desc = first.partition(" ")
    if head == "*":
        return None, desc.strip()
    try:
        return int(head), desc.strip()
    except ValueError:
        raise RegistrationError(f"function header must start with an arity: {first!r}") from None


# --- numeric library -------------------------------------------------------

def _safe(fn):
    """Map Python math exceptions onto C results (NaN / HUGE_VAL)."""
    def wrapper(*args):
        try:
            return float(fn(*args))
        except ValueError:
            return math.nan
        except OverflowError:
            return math.inf
    wrapper.__name__ = fn.__name__
    return wrapper


def _unary(fn, desc):
    safe = _safe(fn)
    safe.__doc__ = f"1 {desc}"
    return safe


def _log(x):
    if x == 0:
        return -math.inf
    return math.log(x)


def _log10(x):
    if x == 0:
        return -math.inf
    return math.log10(x)


def _sqrt(x):
    if x == math.inf:
        return math.inf
    return math.sqrt(x)


def _ceil(x):
    return x if not math.isfinite(x) else float(math.ceil(x))


def _floor(x):
    return x if not math.isfinite(x) else float(math.floor(x))


def _pow(x, y):
    """2 x raised to the power y"""
    try:
        return float(math.pow(x, y))
    except ValueError:
        return math.nan
    except OverflowError:
        if x < 0 and float(y).is_integer() and int(y) % 2:
            return -math.inf
        return math.inf


def _atan2(y, x):
    """2 arc tangent of y/x"""
    return math.atan2(y, x)


def fmod(x, y):
    """2 floating-point remainder of x/y"""
    if y == 0 or math.isinf(x) or math.isnan(x) or math.isnan(y):
        return math.nan
    return math.fmod(x, y)


def ldexp(x, n):
    """2 x times 2 to the power n"""
    if math.isnan(n):
        return math.nan
    if math.isinf(n):
        return x * math.inf if n > 0 else x * 0.0
    try:
        return math.ldexp(x, int(n))
    except OverflowError:
        return math.copysign(math.inf, x)


def _frexp(x, store):
    """2 mantissa of x; the exponent is stored in the second argument"""
    if not math.isfinite(x):
        store(0.0)
        return x
    m, e = math.frexp(x)
    store(float(e))
    return m


def _modf(x, store):
    """2 fractional part of x; the integer part is stored in the second argument"""
    if math.isinf(x):
        store(x)
        return math.copysign(0.0, x)
    frac, whole = math.modf(x)
    store(whole)
    return frac


NUMERIC_1 = {
    "sin": (math.sin, "sine"),
    "cos": (math.cos, "cosine"),
    "tan": (math.tan, "tangent"),
    "asin": (math.asin, "arc sine"),
    "acos": (math.acos, "arc cosine"),
    "atan": (math.atan, "arc tangent"),
    "sinh": (math.sinh, "hyperbolic sine"),
    "cosh": (math.cosh, "hyperbolic cosine"),
    "tanh": (math.tanh, "hyperbolic tangent"),
    "exp": (math.exp, "e raised to the power x"),
    "log": (_log, "natural logarithm"),
    "log10": (_log10, "base 10 logarithm"),
    "sqrt": (_sqrt, "square root"),
    "ceil": (_ceil, "smallest integral value not less than x"),
    "floor": (_floor, "largest integral value not greater than x"),
    "fabs": (math.fabs, "absolute value"),
}


# --- range functions -------------------------------------------------------
# Each receives the values of the defined cells and plain expressions, in
# argument order.

def avg(values):
    """* average"""
    return math.fsum(values) / len(values) if values else 0.0


def count(values):
    """* number of cells defined"""
    return float(len(values))


def majority(values):
    """* non-zero if majority are non-zero"""
    return 1.0 if 2 * sum(1 for v in values if v != 0) > len(values) else 0.0


def rmax(values):
    """* maximum"""
    return max(values) if values else 0.0


def rmin(values):
    """* minimum"""
    return min(values) if values else 0.0


def prod(values):
    """* product"""
    if not values:
        return 0.0
    return math.prod(values)


def stdev(values):
    """* standard deviation"""
    n = len(values)
    if n < 2:
        return 0.0
    mean = math.fsum(values) / n
    return math.sqrt(math.fsum((v - mean) ** 2 for v in values) / (n - 1))


def rsum(values):
    """* sum"""
    return math.fsum(values)


RANGE_FUNCS = {
    "avg": avg, "count": count, "majority": majority, "max": rmax,
    "min": rmin, "prod": prod, "stdev": stdev, "sum": rsum,
}


# --- registry --------------------------------------------------------------

class FunctionRegistry(dict):
    """Name -> :class:`FunctionEntry`.  ``version`` bumps on every change."""

    version = 0

    def add(self, entry: FunctionEntry) -> None:
        if entry.name in self:
            raise RegistrationError(f"function {entry.name!r} is already defined")
        if entry.name in CONSTANTS:
            raise RegistrationError(f"{entry.name!r} is a constant")
        self[entry.name] = entry
        self.version += 1

    def listing(self) -> list[str]:
        return [self[name].signature() for name in sorted(self)]


def _entry(name, fn, kind="numeric", lvalue_slot=None):
    arity, desc = parse_header(fn.__doc__)
    return FunctionEntry(name, kind, arity, desc, fn, lvalue_slot=lvalue_slot, builtin=True)


def builtin_registry(rng: Rng) -> FunctionRegistry:
    """A fresh registry holding every built-in, bound to ``rng``."""
    reg = FunctionRegistry()
    for name, (fn, desc) in NUMERIC_1.items():
        reg.add(_entry(name, _unary(fn, desc)))
    reg.add(_entry("atan2", _atan2))
    reg.add(_entry("fmod", fmod))
    reg.add(_entry("ldexp", ldexp))
    reg.add(_entry("pow", _pow))
    reg.add(_entry("frexp", _frexp, lvalue_slot=1))
    reg.add(_entry("modf", _modf, lvalue_slot=1))

    def rand():
        """0 pseudo-random integer, 0<=rand()<=RAND_MAX"""
        return float(rng.rand())

    def srand(seed):
        """1 seed the pseudo-random generator"""
        rng.seed(trunc_int(seed))
        return 0.0

    def irand(i):
        """1 pseudo-random integer, 0<=irand(i)<=i-1"""
        return float(rng.irand(trunc_int(i)))

    def drand():
        """0 pseudo-random value, uniform over [0,1)"""
        return rng.drand()

    def nrand():
        """0 pseudo-random value, standard normal distribution"""
        return rng.nrand()

    def time():
        """0 seconds since the epoch"""
        return float(int(_time.time()))

    for fn in (rand, srand, irand, drand, nrand, time):
        reg.add(_entry(fn.__name__, fn))
    for name, fn in RANGE_FUNCS.items():
        reg.add(_entry(name, fn, kind="range"))
    return reg


def trunc_int(x: float) -> int:
    if not math.isfinite(x):
        return 0
    return int(x)


def register_user_function(registry: FunctionRegistry, entry: FunctionEntry) -> None:
    """Add a user function.  Collisions with existing names are rejected."""
    if entry.kind not in ("numeric", "range"):
        raise RegistrationError(f"unknown function kind {entry.kind!r}")
    entry.builtin = False
    registry.add(entry)


def user_function(kind: str = "numeric", name: str | None = None):
    """Decorator building a template-style :class:`FunctionEntry`.

    The decorated callable takes ``(arg_nodes, ctx)`` and returns a float;
    its docstring's first line gives arity and description.
    """
    def wrap(fn):
        arity, desc = parse_header(fn.__doc__)
        return FunctionEntry(name or fn.__name__, kind, arity, desc, fn, template=True)
    return wrap


def load_manifest(text: str) -> list[FunctionEntry]:
    """Entries from a JSON manifest.

    Each item names a function and points at a template-style callable::

        [{"name": "double2", "kind": "numeric", "arity": 1,
          "description": "twice its argument", "callable": "mymod:double2"}]
    """
    entries = []
    for item in json.loads(text):
        try:
            module, _, attr = item["callable"].partition(":")
            fn = getattr(importlib.import_module(module), attr)
            arity = item.get("arity")
            entries.append(FunctionEntry(
                item["name"], item.get("kind", "numeric"),
                None if arity in (None, "*") else int(arity),
                item.get("description", ""), fn, template=True,
            ))
        except (KeyError, ImportError, AttributeError, ValueError) as exc:
            raise RegistrationError(f"bad manifest entry {item!r}: {exc}") from None
    return entries
