"""
Monte Carlo with accumulators
=============================

Assignment operators write through to the sheet, so ``+=`` and ``++``
accumulate across evaluation passes.  A range evaluation makes exactly one
pass per iteration, so an iteration count doubles as a sample count.
"""

import io
import math

from batchss import run_script

# running mean of uniform deviates: c0 counts, b0 sums, d0 averages
s = run_script("a0 = drand(); b0 += a0; d0 = b0/++c0; eval a0:d0 1000; format \"%.4f\"; print values;")
print(s.stdout.getvalue())

# histogram of 20000 normal deviates over 60 bins on [-3, 3)
HIST = """
sample = nrand(); trials += 1;
fill a1:a61 -3, 0.1;
c1 += (sample>=a1)&&(sample<a2) ? 1 : 0;
b1 = c1/trials; copy b2:c60 b1:c59;
eval c1:b60 20000; plot a1:b60;
"""
s = run_script(HIST, err=io.StringIO())
for line in s.stdout.getvalue().splitlines()[::6]:
    x, freq = map(float, line.split())
    density = math.exp(-(x + 0.05) ** 2 / 2) / math.sqrt(2 * math.pi) * 0.1
    print(f"{x:+.1f} {freq:.4f} {'#' * round(freq * 400):<40} normal {density:.4f}")

# same seed, same stream
a = run_script("srand 7; a0 = irand(6) + 1; eval a0:a0 1;").sheet.value((0, 0))
b = run_script("srand 7; a0 = irand(6) + 1; eval a0:a0 1;").sheet.value((0, 0))
print("two dice rolled with seed 7:", a, b)
