"""Morse index of the linearisation -L_Z around the pinned wave.

Sturm counts on the tridiagonal discretisation give the number of negative
eigenvalues exactly; bisection plus inverse iteration give the eigenpairs.
Z > 0 leaves one unstable direction, Z < 0 two, and Z = 0 keeps the
translation zero mode.
"""

import numpy as np

from huxdelta import FIGURE1, POSITIVE_CASE, Grid, morse_index
from huxdelta.spectral import sign_changes

grid = Grid()
for name, P in (("figure-1", FIGURE1), ("positive b", POSITIVE_CASE)):
    print(f"\n{name}: a={P.a} b={P.b} p={P.p} w={P.w}")
    for Z in (-2.0, 0.0, 2.0):
        rep = morse_index(P.with_Z(Z), grid)
        lams = ", ".join(f"{lam:+.5f}" for lam in rep.eigenvalues[:4])
        nodes = [sign_changes(v) for v in rep.eigenvectors[:3]]
        extra = f"  zero mode #{rep.zero_mode + 1}" if rep.zero_mode is not None else ""
        print(f"  Z={Z:+.0f}: negative count {rep.neg_count}  eigenvalues [{lams}]  "
              f"nodes {nodes}{extra}")
    print(f"  continuous spectrum starts at -w = {-P.w:g}")

# the count is stable under grid refinement
for N in (1000, 2000, 4000):
    rep = morse_index(FIGURE1.with_Z(-2.0), Grid(N=N), vectors=False)
    print(f"N={N}: Z=-2 count {rep.neg_count}, lowest {np.round(rep.eigenvalues[:2], 5).tolist()}")
