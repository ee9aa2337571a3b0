"""Convergence study for the zero-boundary Poisson solver.

A smooth manufactured solution gives a known answer, and halving h should
cut the error by about four. The same check is what the `study` CLI
subcommand tabulates, here driven directly through the library.
"""

import math
import time

from spball import manufactured_poisson_error

print(f"{'n':>4}  {'rel L2 error':>14}  {'order':>6}  {'seconds':>8}")
previous = None
for n in (4, 8, 16, 32):
    t0 = time.perf_counter()
    err = manufactured_poisson_error(n)
    dt = time.perf_counter() - t0
    order = "" if previous is None else f"{math.log(previous / err) / math.log(2):.3f}"
    print(f"{n:>4}  {err:>14.6e}  {order:>6}  {dt:>8.3f}")
    previous = err
