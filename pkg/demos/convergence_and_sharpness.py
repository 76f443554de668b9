#!/usr/bin/env python3
# Solver validation against the self-similar solution, then the sharpness fit:
# the fitted Gaussian exponent of a numerical run matches zeta_B(p).
#
# Usage:
#   python3 demos/convergence_and_sharpness.py
import numpy as np

from trudinger.constants import zeta_barenblatt
from trudinger.exact import ExactSolution, tail_radius
from trudinger.fields import Field, RadialGrid
from trudinger.solver import SolverConfig, convergence_study, run
from trudinger.verify import sharpness_fit

for p, n in [(2.0, 3), (3.0, 1)]:
    print(f"convergence p = {p}, n = {n}, t: 1 -> 2")
    print(f"  {'cells':>6s} {'linf':>10s} {'l1':>10s} {'order':>6s} {'mass drift':>11s}")
    for row in convergence_study(p, n, [128, 256, 512, 1024]):
        order = "" if row.order_linf is None else f"{row.order_linf:6.2f}"
        print(f"  {row.cells:6d} {row.linf:10.3e} {row.l1:10.3e} {order:>6s} {row.mass_drift:11.1e}")

print("\nsharpness: fitted exponent of -log(u t^{n/p}) against (r/t^{1/p})^{p/(p-1)}")
for p in (1.5, 2.0, 3.0):
    sol = ExactSolution.barenblatt(p, 1)
    grid = RadialGrid(sol.manifold(), tail_radius(p, 2.0, 1e-13), 512)
    trace = run(Field(sol(grid.centers, 1.0), 1.0), 2.0, np.linspace(1.0, 2.0, 5), grid, SolverConfig(p=p))
    slope, _, _ = sharpness_fit(trace, p, 1, (1.0, 2.0))
    zb = zeta_barenblatt(p)
    print(f"  p = {p}: slope = {slope:.6f}, zeta_B = {zb:.6f}, rel. diff = {abs(slope / zb - 1):.2e}, "
          f"steps = {trace.meta['steps']}")
