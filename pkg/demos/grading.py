"""
Scaling student scores
======================

A five-line sheet: scores in column B, their mean in a symbol, and a
scaled grade in column A that is written once and copied down.
"""

import sys

from batchss import Session

SCRIPT = """
a0:d0 = { "grade", "score", "avg", "stdev"};
mean=avg(b1:b5); c1=mean; d1=stdev(b1:b5);
a1=80+15*(b1-mean)/$d$1; copy a2:a5 a1:a4;
b1:b5 = { 57, 67, 92, 87, 76 }; eval;
"""

session = Session(out=sys.stdout)
session.run_text(SCRIPT)

# the symbol table, then the values at the default "%.2f"
session.run_text("print symbols values;")

# A1..A5 print as five formulas, each seen from its own cell...
session.run_text("print a0:a5 formulas;")
# ...but they are one shared formula, as the pointer ids show
session.run_text("print a0:b5 pointers;")

sheet = session.sheet
print("A3 is", round(sheet.value((3, 0)), 2), "and D1 is", round(sheet.value((1, 3)), 2))
