"""
Iterating to a fixed point
==========================

Cells may depend on themselves.  Evaluation sweeps the sheet forward and
back until a full iteration changes nothing, so a convergent cycle is just
an iterative algorithm laid out in cells.
"""

import io
import math

from batchss import run_script

# Newton's method: a0 holds the previous estimate, b0 the next one
for x in (2, 9, 1e6):
    s = run_script(f"x = {x}; a0 = b0 ? b0 : x/2; b0 = (a0+x/a0)/2; eval 50;")
    b0 = s.sheet.value((0, 1))
    print(f"sqrt({x:g}) ~ {b0!r}  (math.sqrt {math.sqrt(x)!r})  {s.last_report.message}")

# Relaxation on a 7x7 plate: every interior cell is the mean of its neighbours.
# One row is written by hand, the rest is copied from it.
PLATE = """
R1C1=(R[]C[-1]+R[]C[+1]+R[-1]C[]+R[+1]C[])/4;
copy r1c2:r1c5 r1c1:r1c4;
copy r2c1:r5c5 r1c1:r4c5;
fill r0c0:r0c6 1, 0; fill r1c0:r6c0 1, 0;
fill r1c6:r6c6 0, 0; fill r6c1:r6c5 0, 0;
format "%.4f"; format RC;
eval; eval 1000; print values;
"""
err = io.StringIO()
s = run_script(PLATE, err=err)
print(s.stdout.getvalue())
print(err.getvalue())

# a corner of the plate as plot3d blocks ("row col value"), ready for a surface plotter
s.stdout.seek(0)
s.stdout.truncate()
s.run_text("plot3d r1c1:r2c3;")
print(s.stdout.getvalue())
