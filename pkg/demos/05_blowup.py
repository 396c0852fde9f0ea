"""Finite-time blow-up for a > 0, b > 0, Z > 0.

The weighted mass R(t) = int u exp(-Z|x|/2) dx satisfies a differential
inequality R' >= lambda R + beta R^p + gamma R^(2p-1).  Above its positive
root R1 this forces blow-up before an explicit time bound.  The script
compares that bound with the time the scheme detects blow-up and prints
the slack of the inequality along the run.
"""

import numpy as np

from huxdelta import POSITIVE_CASE, EvolutionConfig, Grid, blowup_certificate, simulate
from huxdelta.evolution import check_R_inequality, initial_condition, weighted_R

grid = Grid()
P = POSITIVE_CASE.with_Z(2.0)
g = initial_condition("weighted:1.5", P, grid)
R0 = weighted_R(g, P.Z, grid)
cert = blowup_certificate(P, R0)
print(f"lambda={cert.lambdaB:.4f} beta={cert.betaB:.4f} gamma={cert.gammaB:.4f}  R1={cert.R1:.6f}")
print(f"R0={R0:.6f} (R0/R1={R0 / cert.R1:.3f})  time bound {cert.Tbound:.4f}")

tr = simulate(g, P, EvolutionConfig(dt=1e-3, Tmax=2.0, grid=grid, record_every=1))
print(f"terminal: {tr.terminal}  detected at t={tr.t_detect}")

rep = check_R_inequality(tr, cert)
print(f"inequality slack: min {rep.min_slack:.3g}, tolerance {rep.tol:.3g}, over {rep.records} records")
for i in np.linspace(0, tr.times.size - 2, 6).astype(int):
    print(f"  t={tr.times[i]:.3f}  R={tr.R[i]:.5g}  slack={rep.slack[i]:+.3g}")
