#!/usr/bin/env python3
# Evolve a compactly supported bump and evaluate the estimate chain along the
# trace: norm monotonicity, integral maximum principle, Davies-Gaffney tails,
# neighbourhood decay, the L^lambda decay rate and the sub-Gaussian envelope.
#
# Usage:
#   python3 demos/inequalities_on_a_bump.py [p]
import math
import sys

import numpy as np

from trudinger.constants import zeta_barenblatt
from trudinger.fields import RadialGrid
from trudinger.geometry import ModelManifold, Region
from trudinger.solver import SolverConfig, bump_initial, run
from trudinger.verify import (
    RegularFunctionSpec,
    WeightFunction,
    check_davies_gaffney,
    check_integral_max_principle,
    check_lambda_decay,
    check_norm_monotonicity,
    check_subgaussian_envelope,
    neighborhood_decay_stability,
)

p = float(sys.argv[1]) if len(sys.argv) > 1 else 2.0
lam = max(p, p / (p - 1))
rho = 3.0
A = Region(1.0)
t_end = 2.0 ** math.ceil(math.log2(2 * rho**p))

grid = RadialGrid(ModelManifold.euclidean(1), 40.0, 640)
envelope_Ts = [1.0, 1.5, 2.0, 3.0, 4.0]
times = np.union1d(np.concatenate([[0.0], np.geomspace(0.01, t_end, 48)]), envelope_Ts)
trace = run(bump_initial(grid, 1.0), t_end, times, grid, SolverConfig(p=p))
print(f"p = {p}, lambda = {lam}, t_end = {t_end}: {trace.meta['steps']} steps, "
      f"clip_count = {trace.meta['clip_count']}")


def report(name, results):
    bad = sum(not r.passed for r in results)
    worst = max(r.lhs / r.rhs for r in results if r.rhs > 0)
    print(f"  {name:<28s} {len(results):4d} checks, {bad} failed, max lhs/rhs = {worst:.4f}")


report("norm monotonicity", check_norm_monotonicity(trace, [1.0, 2.0, lam, math.inf]))
xi = WeightFunction.davies_gaffney(p, lam, A.with_rho(rho), s=2 * t_end + 1)
report("integral max principle", check_integral_max_principle(trace, lam, xi))
for ratio in (1.0, 2.0, 4.0):
    report(f"Davies-Gaffney r/t^(1/p)={ratio:g}", check_davies_gaffney(trace, lam, A, ratio=ratio))

first, second, stab = neighborhood_decay_stability(trace, lam, rho, RegularFunctionSpec((lam - 1) / p), A)
print(f"  neighbourhood decay: C_fit = {first.C_fit:.4g} (rho), {second.C_fit:.4g} (doubled window), "
      f"ratio = {stab:.3f}, C_theory = {first.C_theory:.4g}")

slope, _ = check_lambda_decay(trace, lam, 1, p)
print(f"  L^lambda decay slope = {slope:.4f}, predicted {-(lam - 1) / p:.4f}")

zb = zeta_barenblatt(p)
for c in (zb / 2, 2 * zb):
    rep = check_subgaussian_envelope(trace, p, 1, A, c, Ts=envelope_Ts)
    print(f"  envelope c = {c:.4f}: C_report = {rep.C_report:.4g}, window ratio = {rep.window_ratio:.3f}, "
          f"growth across z = {rep.growth:.3g}")
