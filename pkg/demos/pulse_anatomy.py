"""Walk through the construction of one skewed pulse, printing each layer.

The solve is assembled the same way the library does it internally --
flat profile, gauge, shrink direction, the eps root, then the corrected
Newton solve -- so the printout doubles as a map of the data structures.

Usage:  python3 pulse_anatomy.py [L] [y]     (defaults 5.0 1.0)
Add --plot to save pulse_anatomy.png next to this script.
"""

import math
import os
import sys

import numpy as np

from glpulse.ansatz import ansatz_coefficients, eps_flat, solve_pulse
from glpulse.grids import Grid
from glpulse.operators import shrink_mode
from glpulse.params import ModelParams
from glpulse.phase import solve_phase
from glpulse.profiles import eval_profile

argv = [a for a in sys.argv[1:] if a != "--plot"]
PLOT = "--plot" in sys.argv
L = float(argv[0]) if len(argv) > 0 else 5.0
y = float(argv[1]) if len(argv) > 1 else 1.0

params = ModelParams.from_L(L, y=y)
flat = params.flat()
print(f"pulse point       L = {L}, y = {y}   (nu = {params.nu:.3e})")
print(f"flat point        L_flat = {flat.L:.4f}, nu_flat = {flat.nu:.3e}")
print(f"mismatch          kappa = {params.kappa:.3e}")

# layer 1: the real profile and its gauge at the flat point
grid = Grid.for_params(params)
prof = eval_profile(flat, grid.x)
ph = solve_phase(flat, grid, prof=prof)
lam, s = shrink_mode(flat, grid, prof=prof)
print(f"\nprofile peak      R(0) = {prof.R[len(grid.x)//2]:.6f}")
print(f"gauge             theta = {ph.theta:.6f}, max|q| = {np.max(np.abs(ph.q)):.4f}")
print(f"shrink eigenvalue lambda = {lam:.3e}   (lambda/nu_flat = {lam/flat.nu:.3f})")

# layer 2: the eps ansatz -- quadratures against the shrink direction
a = ansatz_coefficients(flat, grid, s, ph, prof=prof)
e0 = eps_flat(a, params.kappa)
print(f"\nansatz            a = ({a[0]:.4f}, {a[1]:.4f}, {a[2]:.4f}, {a[3]:.4f})")
print(f"root              eps_flat = {e0:.6e}  -> alpha ~ {math.sqrt(e0):.6e}")

# layer 3: the certified correction
state = solve_pulse(params, grid=grid)
cert = state.certificate
print(f"\ncorrected         eps = {state.eps:.6e}  alpha = {state.alpha:.6e}")
print(f"correction ratio  eps/eps_flat = {state.eps/e0:.4f}")
print(f"residual          |G| = {state.residual_norm:.2e}")
print(f"certificate       d0 = {cert.d0:.2e}, K = {cert.K:.2e}, "
      f"contraction a = {cert.a:.3f}, iterations = {cert.iterations}")
print(f"a-posteriori ball |U - U0| <= {cert.bound1:.2e}")

if PLOT:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    ax1.plot(grid.x, state.xi, label="amplitude xi")
    ax1.plot(grid.x, prof.r, "--", label="flat profile r")
    ax1.legend(); ax1.set_ylabel("amplitude")
    ax2.plot(grid.x, state.eta, label="gauge eta")
    ax2.plot(grid.x, ph.q, "--", label="flat gauge q")
    ax2.legend(); ax2.set_xlabel("x"); ax2.set_ylabel("gauge")
    out = os.path.join(os.path.dirname(os.path.abspath(__file__)),
                       "pulse_anatomy.png")
    fig.savefig(out, dpi=120, bbox_inches="tight")
    print(f"\nwrote {out}")
