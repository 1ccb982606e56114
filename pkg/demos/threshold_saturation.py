"""Threshold saturation of the coupled (5,15) ensemble on the dicode channel.

The uncoupled threshold sits at 0.3635; coupling lifts it almost to the
area-theorem ceiling of 1/2.  Short chains already get most of the way,
at the price of rate loss O(w/L).
"""
import time

import numpy as np

from scde import (CoupledEnsemble, RegularEnsemble, design_rate,
                  jit_threshold, jit_threshold_coupled)

W = 5
print(f"uncoupled (5,15): threshold "
      f"{jit_threshold(RegularEnsemble(5, 15)):.6f}, rate 2/3\n")

print(f"{'L':>4} {'design rate':>12} {'threshold':>10} {'seconds':>8}")
for L in (4, 8, 16, 32, 64):
    ens = CoupledEnsemble(5, 15, L, W)
    t0 = time.time()
    # generous bracket; small chains overshoot 1/2 thanks to boundary help
    thr = jit_threshold_coupled(ens, "dec", lo=0.40, hi=0.70, tol_eps=1e-4)
    print(f"{L:4d} {design_rate(ens):12.6f} {thr:10.5f} {time.time()-t0:8.1f}")

print("\nthreshold exceeds 1/2 for small L because the ensemble rate is "
      "well below 2/3 there;\nas L grows the rate climbs back to 2/3 and the "
      "threshold pins to the 1/2 ceiling.")
