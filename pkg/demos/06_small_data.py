"""Small data decays.

For -w large enough compared with Z^2/4, a small even bump shrinks to zero
and the energy S is non-increasing along the flow.
"""

import numpy as np

from huxdelta import FIGURE1, POSITIVE_CASE, EvolutionConfig, Grid, simulate

grid = Grid()
x = grid.x
for name, P in (("figure-1", FIGURE1), ("positive b", POSITIVE_CASE)):
    for Z in (-2.0, 0.0, 2.0):
        Q = P.with_Z(Z)
        g = 0.05 * np.exp(-x**2)
        tr = simulate(g, Q, EvolutionConfig(dt=1e-3, Tmax=10.0, grid=grid, record_every=10))
        dS = float(np.max(np.diff(tr.S)))
        print(f"{name:>10} Z={Z:+.0f}: H1_Z norm {tr.h1z[0]:.3e} -> {tr.h1z[-1]:.3e} at t={tr.times[-1]:g}, "
              f"max increase of S {dS:+.1e}")
