"""Eigenvalue counting and eigenpairs of symmetric tridiagonal operators.

Counts come from the Sturm sequence (signed pivots of the shifted LDL^T
factorisation); individual eigenvalues from bisection on those counts, and
eigenvectors from shifted inverse iteration.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.linalg import solve_banded

from .equilibrium import make_profile
from .model import ModelParams, validate
from .operators import Grid, TridiagonalOperator, assemble_minusLZ, discrete_equilibrium

log = logging.getLogger(__name__)

PIVOT_FLOOR = 1e-300
ZERO_MODE_BAND = 5e-4
EPS = np.finfo(float).eps


class PivotBreakdown(ArithmeticError):
    pass


class NoIsolation(ValueError):
    pass


@njit(cache=True)
def _sturm_count(diag, off2, shift):
    n = diag.size
    count = 0
    d = diag[0] - shift
    if abs(d) < PIVOT_FLOOR:
        return -1
    if d < 0.0:
        count += 1
    for j in range(1, n):
        d = (diag[j] - shift) - off2[j - 1] / d
        if abs(d) < PIVOT_FLOOR:
            return -1
        if d < 0.0:
            count += 1
    return count


def inertia_below(op: TridiagonalOperator, shift: float, retries: int = 4) -> int:
    """Number of eigenvalues of ``op`` strictly below ``shift``."""
    off2 = op.off * op.off
    s = float(shift)
    for attempt in range(retries + 1):
        c = _sturm_count(op.diag, off2, s)
        if c >= 0:
            if attempt:
                log.info("Sturm pivot breakdown at shift %r; counted at %r instead", shift, s)
            return int(c)
        s = s + 1e-12 * abs(s) + 1e-14
    raise PivotBreakdown(f"zero pivot persists near shift {shift!r}")


def gershgorin(op: TridiagonalOperator) -> tuple[float, float]:
    r = np.zeros(op.size)
    r[:-1] += np.abs(op.off)
    r[1:] += np.abs(op.off)
    return float(np.min(op.diag - r)), float(np.max(op.diag + r))


def eigenvalue_k(op: TridiagonalOperator, k: int, tol: float | None = None) -> float:
    """k-th smallest eigenvalue (k >= 1) by bisection.

    The default tolerance is a few ulps of the operator scale, well inside
    the 1e-10 * scale contract; convergence studies need the headroom.
    """
    if not 1 <= k <= op.size:
        raise ValueError(f"k must lie in [1, {op.size}], got {k}")
    lo, hi = gershgorin(op)
    if tol is None:
        tol = 8.0 * EPS * max(op.scale, 1.0)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if inertia_below(op, mid) >= k:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def eigenvalues_below(op: TridiagonalOperator, bound: float) -> np.ndarray:
    n = inertia_below(op, bound)
    return np.array([eigenvalue_k(op, k) for k in range(1, n + 1)])


def _normalise(v: np.ndarray, grid: Grid) -> np.ndarray:
    v = v / math.sqrt(grid.h * float(v @ v))
    c = grid.center
    if abs(v[c]) >= 1e-8:
        return v if v[c] > 0 else -v
    return v if v[c + 1] - v[c] > 0 else -v


def eigenvector(op: TridiagonalOperator, lam: float, iterations: int = 3) -> np.ndarray:
    """Eigenvector for an isolated eigenvalue near ``lam`` with h * |v|^2 = 1.

    Sign: v(0) > 0, or if v(0) vanishes (odd modes), v'(0+) > 0.
    """
    sep = 1e-8
    if inertia_below(op, lam + sep) - inertia_below(op, lam - sep) >= 2:
        raise NoIsolation(f"two or more eigenvalues within {sep} of {lam!r}")
    scale = max(op.scale, 1.0)
    shift = lam + 64.0 * EPS * scale
    ab = op.banded(shift)
    rng = np.random.default_rng(12345)
    v = rng.standard_normal(op.size)
    for _ in range(iterations):
        v = solve_banded((1, 1), ab, v)
        if not np.all(np.isfinite(v)):
            shift += 1e3 * EPS * scale
            ab = op.banded(shift)
            v = rng.standard_normal(op.size)
            continue
        v /= np.linalg.norm(v)
    v = _normalise(v, op.grid)
    res = op @ v - lam * v
    if np.linalg.norm(res) > 1e-8 * np.linalg.norm(v) * scale:
        log.warning("inverse iteration residual %.3e at lambda=%r", np.linalg.norm(res), lam)
    return v


def essential_margin(grid: Grid) -> float:
    return max(10.0 * grid.h**2, 1e-6)


def zero_mode_band(params: ModelParams, grid: Grid, potential: str = "discrete") -> float:
    """Half-width of the band that classifies the lattice remnant of the Z = 0 kernel.

    Linearising at the discrete equilibrium leaves an exponentially small
    remnant, so a fixed band applies; the closed-form potential leaves an
    O(h^2) remnant and the band scales accordingly.
    """
    if potential == "discrete":
        return ZERO_MODE_BAND
    k = params.kappa * (params.p - 1.0)
    return max(10.0 * k**2 * grid.h**2, 100.0 * math.exp(-2.0 * params.kappa * grid.L))


@dataclass
class SpectrumReport:
    Z: float
    neg_count: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    kernel_gap: float
    edge: float
    grid: Grid
    potential: str
    zero_band: float
    zero_mode: int | None = None
    nodes: np.ndarray = field(default=None, repr=False)

    def to_json(self) -> dict:
        return {
            "Z": self.Z,
            "neg_count": self.neg_count,
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "kernel_gap": self.kernel_gap,
        }


def linearised_operator(params: ModelParams, grid: Grid, potential: str = "discrete"):
    """Return (-L_Z, node values of the equilibrium it linearises about)."""
    if potential == "discrete":
        u = discrete_equilibrium(params, grid)
        return assemble_minusLZ(params, None, grid, samples=u), u
    if potential == "closed_form":
        prof = make_profile(params)
        op = assemble_minusLZ(params, prof, grid)
        return op, prof(grid.x)
    raise ValueError(f"unknown potential {potential!r}")


def morse_index(params: ModelParams, grid: Grid | None = None, potential: str = "discrete",
                vectors: bool = True) -> SpectrumReport:
    """Negative-eigenvalue count of -L_Z and its discrete eigenpairs below the edge -w."""
    validate(params)
    grid = grid or Grid()
    op, nodes = linearised_operator(params, grid, potential)
    tol_edge = 1e-9 * op.scale
    neg = inertia_below(op, -tol_edge)
    edge = -params.w
    lams = eigenvalues_below(op, edge - essential_margin(grid))
    vecs = np.array([eigenvector(op, lam) for lam in lams]) if vectors and lams.size else np.empty((0, op.size))
    gap = float(np.min(np.abs(lams))) if lams.size else math.inf
    band = zero_mode_band(params, grid, potential)
    zero = None
    if params.Z == 0.0:
        near = np.flatnonzero(np.abs(lams) <= band)
        zero = int(near[0]) if near.size else None
    return SpectrumReport(Z=params.Z, neg_count=neg, eigenvalues=lams, eigenvectors=vecs, kernel_gap=gap,
                          edge=edge, grid=grid, potential=potential, zero_band=band, zero_mode=zero,
                          nodes=nodes)


def sign_changes(v: np.ndarray, rel_floor: float = 1e-6) -> int:
    """Interior sign changes of v, ignoring entries below rel_floor * max|v|."""
    s = np.sign(v[np.abs(v) > rel_floor * np.max(np.abs(v))])
    return int(np.count_nonzero(s[1:] != s[:-1]))


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    return float(u @ v / (np.linalg.norm(u) * np.linalg.norm(v)))
