"""Locate the stabilization threshold alpha_c across pulse sizes.

For each half-width L the sign change of M11 along the family y -> pulse
is bisected; the measured alpha_c is printed against the closed-form
prediction sqrt(nu)/2 (1 - pi^2/48L^2).  At desk-scale L the measured
threshold still sits a few percent *above* sqrt(nu)/2 -- the printed gap
column makes the finite-size offset visible rather than hiding it.

This is the slow demo (a dozen certified solves + eigensolves per L).
"""

import argparse
import math
import time

from glpulse.params import ModelParams
from glpulse.stability import find_alpha_c

parser = argparse.ArgumentParser()
parser.add_argument("--sizes", type=float, nargs="+", default=[2.5, 3.0, 4.0])
args = parser.parse_args()

print(f"{'L':>5} {'nu':>10} {'y_c':>8} {'alpha_c':>12} {'formula':>12} "
      f"{'2a_c/sqrt(nu)':>14} {'evals':>6} {'secs':>6}")
for L in args.sizes:
    t0 = time.time()
    res = find_alpha_c(ModelParams.from_L(L))
    ratio = 2.0 * res.alpha_c / math.sqrt(res.nu)
    print(f"{L:5.2f} {res.nu:10.3e} {res.y_c:8.4f} {res.alpha_c:12.5e} "
          f"{res.alpha_c_formula:12.5e} {ratio:14.4f} "
          f"{len(res.evaluations):6d} {time.time()-t0:6.1f}")

print("\ny_c tracks (1/2) ln L; the ratio column -> 1 from above as L grows.")
