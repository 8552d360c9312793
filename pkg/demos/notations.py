"""
Cell references and ranges
==========================

Three spellings for a cell (A0, RC, CR), fixed and relative axes, and
ranges whose corner order sets the traversal direction.
"""

from batchss import run_script

# the same rectangle four ways
for spelling in ("A0:B9", "A0:C1R9", "R0C0:R9C1", "C0R0:R9C1"):
    s = run_script(f"fill {spelling} 1, 1; x = sum({spelling}); eval symbols 1;")
    print(f"{spelling:10} sum = {s.sheet.symbol_value('x')}")

# reversed corners walk the range backwards
s = run_script("b0:b4 = {10, 20, 30, 40, 50}; copy a0:a4 b4:b0; eval; print values;")
print(s.stdout.getvalue())

# one formula rendered in each display mode; $ marks a fixed axis
s = run_script("c2 = b2 + $A$1 * R[-1]C[]; print formulas;"
               "format RC; print formulas; format CR; print formulas;")
print(s.stdout.getvalue())

# bycols fills down the columns first
s = run_script("bycols; fill a0:c1 1, 1; byrows; print values;")
print(s.stdout.getvalue())
