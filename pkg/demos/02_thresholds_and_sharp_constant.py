#!/usr/bin/env python3
"""
The three explicit thresholds and the sharp interpolation constant
==================================================================

In the mass-supercritical regime the (gradient-norm, mass-norm) plane splits
into three regions separated by explicit power-law curves gamma_* < r_* <
rho_*.  Below gamma_* the solution is provably global; above r_* an explicit
blow-up datum exists; rho_* is where that datum's energy changes sign.

All three curves are algebraic functions of a single number: the L^2 norm of
the unit ground state, which also determines the sharp Gagliardo-Nirenberg
constant.  We evaluate everything and confirm the sharp constant against an
independent direct minimization of the Weinstein quotient.
"""

import numpy as np

from nlslab import (ModelParams, ThresholdSet, classify_plane_point,
                    gn_constant_formula, gn_constant_minimize, solve_shooting)

params = ModelParams(dim=1, alpha=8.0, lam=1.0, omega=1.0)
R = solve_shooting(params)
ts = ThresholdSet.from_ground_state(R)

print(f"||R|| = {R.l2:.12f}")
print(f"C*    = {ts.C_star:.12f}  (closed form)")

# independent check: minimize the Weinstein quotient directly
c_min = gn_constant_minimize(params, init=R)
print(f"C*    = {c_min:.12f}  (direct minimization, "
      f"gap {abs(c_min - ts.C_star) / ts.C_star:.1e})")

# --- the curves over two decades of gradient norm --------------------------
print(f"\n{'b':>8} {'gamma*(b)':>12} {'r*(b)':>12} {'rho*(b)':>12}")
for b in np.geomspace(0.1, 10.0, 9):
    g, r, rho = ts.gamma_star(b), ts.r_star(b), ts.rho_star(b)
    print(f"{b:8.3f} {g:12.6f} {r:12.6f} {rho:12.6f}")

# all three are the same power law in b; only the prefactor differs
print(f"\ngamma*/r* = {ts.gamma_star(1.0) / ts.r_star(1.0):.12f}"
      f"  (= 2^(-1/6) = {2 ** (-1 / 6):.12f})")
print(f"rho*/r*   = {ts.rho_star(1.0) / ts.r_star(1.0):.12f}"
      f"  (= 2^(+1/6) = {2 ** (1 / 6):.12f})")

# --- classify a few points of the plane ------------------------------------
print()
for a, b in ((0.5, 1.0), (1.4, 1.0), (1.6, 1.0), (2.5, 1.0)):
    lab = classify_plane_point(ts, a, b)
    extra = f", E sign {lab.e_sign}" if lab.e_sign else ""
    print(f"mass {a:4.2f}, gradient {b:4.2f}  ->  {lab.label}{extra}")
