"""How the second eigenvalue crosses zero as the defect is switched on.

At Z = 0 the second eigenvalue Pi_2 of -L_Z is the translation zero mode.
It moves off zero linearly in Z with a slope that has a closed form in
terms of phi(0), phi''(0) and ||phi'||^2, and the numerical central
difference recovers it.
"""

import numpy as np

from huxdelta import FIGURE1, POSITIVE_CASE, Grid, pi2_scan

grid = Grid()
Zs = np.linspace(-0.2, 0.2, 9)
for name, P in (("figure-1", FIGURE1), ("positive b", POSITIVE_CASE)):
    curve = pi2_scan(P, Zs, grid)
    print(f"\n{name}")
    print(f"{'Z':>7} {'Pi_2':>12} {'neg count':>9}")
    for Z, lam, n in zip(curve.Zs, curve.pi2, curve.neg_counts):
        print(f"{Z:+7.3f} {lam:+12.6e} {n:9d}")
    rel = abs(curve.beta_numeric / curve.beta_closed - 1)
    print(f"slope: numeric {curve.beta_numeric:.6f}  closed form {curve.beta_closed:.6f}  rel diff {rel:.1e}")
