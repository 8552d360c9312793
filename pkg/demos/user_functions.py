"""
Adding functions
================

A function is a Python callable plus a one-line header giving its arity and
a description.  Template-style callables receive the argument trees and an
evaluation context, so they decide what to evaluate and when.
"""

import json
import sys

from batchss import FunctionEntry, RegistrationError, Session, register_user_function, user_function
from batchss.funcs import load_manifest


@user_function("numeric")
def hypot(args, ctx):
    """2 length of the hypotenuse"""
    x, y = (ctx.eval(a) for a in args)
    return (x * x + y * y) ** 0.5


@user_function("range", name="span")
def value_span(args, ctx):
    """* largest minus smallest defined value"""
    values = ctx.values(args)
    return max(values) - min(values) if values else 0.0


session = Session(out=sys.stdout)
register_user_function(session.sheet.functions, hypot)
register_user_function(session.sheet.functions, value_span)

session.run_text("a0:a3 = {3, 9, -2, 4}; b0 = hypot(a0, a3); b1 = span(a0:a3, 10); eval; print values;")

# a manifest names callables by module and attribute
manifest = json.dumps([{"name": "half", "kind": "numeric", "arity": 1,
                        "description": "half its argument", "callable": "demo_funcs:half"}])
sys.modules["demo_funcs"] = type(sys)("demo_funcs")
sys.modules["demo_funcs"].half = lambda args, ctx: ctx.eval(args[0]) / 2
for entry in load_manifest(manifest):
    register_user_function(session.sheet.functions, entry)
session.run_text("b2 = half(a1); eval; print b0:b2 values;")

# registered functions are listed with their headers; built-in names are taken
for line in session.sheet.functions.listing():
    if line.split("(")[0] in ("half", "hypot", "span"):
        print(line)
try:
    register_user_function(session.sheet.functions,
                           FunctionEntry("sum", "range", None, "clash", lambda a, c: 0.0, template=True))
except RegistrationError as exc:
    print("rejected:", exc)
