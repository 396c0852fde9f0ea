"""Linear growth away from an unstable pinned wave.

Start at the discrete equilibrium plus 1e-4 times an eigenvector of -L_Z and
watch |u - phi| in L2.  Along an unstable direction it grows at the rate
given by minus the eigenvalue; along a stable one it does not grow.
"""

from huxdelta import FIGURE1, EvolutionConfig, Grid, eigenvalue_k, eigenvector, simulate
from huxdelta.evolution import growth_rate, l2_norm, rate_over
from huxdelta.spectral import linearised_operator

grid = Grid()
eps = 1e-4
for Z, k in ((2.0, 1), (-2.0, 1), (-2.0, 2), (2.0, 2)):
    P = FIGURE1.with_Z(Z)
    op, u = linearised_operator(P, grid)
    lam = eigenvalue_k(op, k)
    phin = l2_norm(u, grid)
    cfg = EvolutionConfig(dt=1e-3, Tmax=8.0, grid=grid, record_every=1, stop_deviation=2e-2 * phin)
    tr = simulate(u + eps * eigenvector(op, lam), P, cfg, reference=u)
    if lam < 0:
        rate = growth_rate(tr, eps, 1e-2 * phin)
        print(f"Z={Z:+.0f} v{k}: measured rate {rate:.4f}  predicted {-lam:.4f}")
    else:
        lam1 = -eigenvalue_k(op, 1)
        rate = rate_over(tr, 0.0, 1.0 / lam1)
        print(f"Z={Z:+.0f} v{k}: eigenvalue {lam:+.4f}, rate over [0, 1/lambda_1] {rate:+.4f}")
