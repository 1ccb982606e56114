"""Running DE through a tabulated detector transfer instead of a closed form.

Useful when the front end is characterized empirically: sample the transfer
on a grid, load it as a table, and run the same threshold machinery.  Here
the table is sampled from the dicode formula itself, so the tabulated
threshold must land on the analytic one to within interpolation error.
"""
import io

import numpy as np

from scde import (RegularEnsemble, dec_transfer, forward_de, jit_threshold,
                  load_transfer_table, make_channel)

ENS = RegularEnsemble(5, 15)
EPS = 0.34

grid = np.linspace(0.0, 1.0, 257)
rows = "\n".join(f"{x:.8f},{dec_transfer(EPS, x):.10f}" for x in grid)
table = load_transfer_table(io.StringIO("x,f\n" + rows))

ch_exact = make_channel("dec", EPS)
ch_table = make_channel("custom", EPS, table=table)

tr_e = forward_de(ENS, ch_exact)
tr_t = forward_de(ENS, ch_table)
print(f"eps = {EPS}: exact DE {tr_e.iterations} iters "
      f"(zero: {tr_e.converged_to_zero}), tabulated {tr_t.iterations} iters "
      f"(zero: {tr_t.converged_to_zero})")

# a 257-point table keeps the threshold to ~1e-5
thr = jit_threshold(ENS, channel="dec")
print(f"analytic threshold  {thr:.6f}")

lo, hi = 0.0, 1.0
while hi - lo > 1e-6:
    mid = 0.5 * (lo + hi)
    tab = load_transfer_table(io.StringIO("x,f\n" + "\n".join(
        f"{x:.8f},{dec_transfer(mid, x):.10f}" for x in grid)))
    if forward_de(ENS, make_channel("custom", mid, table=tab)).converged_to_zero:
        lo = mid
    else:
        hi = mid
print(f"tabulated threshold {0.5 * (lo + hi):.6f}")
