"""The second eigenvalue Pi_2(Z) of -L_Z near Z = 0 and the identities behind its slope."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .equilibrium import make_profile, phi_at, phi_prime_at
from .model import ModelParams, f, f2
from .operators import Grid, apply, assemble_minusLZ
from .spectral import eigenvalue_k, eigenvector, essential_margin, linearised_operator, inertia_below


@dataclass
class PerturbationCurve:
    Zs: np.ndarray
    pi2: np.ndarray
    omega2: np.ndarray
    neg_counts: np.ndarray
    outside_window: list = field(default_factory=list)
    beta_numeric: float | None = None
    beta_closed: float | None = None
    chi0: np.ndarray | None = None
    psi0: np.ndarray | None = None


def pi2_scan(params0: ModelParams, Zs, grid: Grid | None = None, potential: str = "discrete") -> PerturbationCurve:
    """Second eigenpair of -L_Z along Zs; eigenvectors are sign-aligned to their predecessor."""
    grid = grid or Grid()
    Zs = np.asarray(sorted(float(z) for z in Zs))
    pi2, vecs, counts, flagged = [], [], [], []
    edge = -params0.w - essential_margin(grid)
    for Z in Zs:
        op, _ = linearised_operator(params0.with_Z(Z), grid, potential)
        lam = eigenvalue_k(op, 2)
        if lam >= edge:
            flagged.append(float(Z))
        v = eigenvector(op, lam)
        if vecs and float(v @ vecs[-1]) < 0:
            v = -v
        pi2.append(lam)
        vecs.append(v)
        counts.append(inertia_below(op, -1e-9 * op.scale))
    curve = PerturbationCurve(Zs=Zs, pi2=np.array(pi2), omega2=np.array(vecs), neg_counts=np.array(counts),
                              outside_window=flagged)
    curve.beta_closed = beta_closed_form(params0, grid)
    pos = Zs[Zs > 0]
    for d in pos:
        if np.any(np.isclose(Zs, -d)):
            curve.beta_numeric = beta_numeric(curve, float(d))
            break
    return curve


def pi2_at(params0: ModelParams, Z: float, grid: Grid | None = None, potential: str = "discrete") -> float:
    op, _ = linearised_operator(params0.with_Z(Z), grid or Grid(), potential)
    return eigenvalue_k(op, 2)


def _gauss_legendre_sq(fun, a: float, b: float, panels: int, order: int = 20) -> float:
    t, wts = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        x = 0.5 * (hi - lo) * t + 0.5 * (hi + lo)
        total += 0.5 * (hi - lo) * float(wts @ fun(x) ** 2)
    return total


def dphi_norm_sq(params0: ModelParams, L: float, panels: int = 64) -> float:
    """||phi'||^2 of the Z = 0 profile on [-L, L] by composite Gauss-Legendre."""
    prof = make_profile(params0.with_Z(0.0))
    return 2.0 * _gauss_legendre_sq(lambda x: phi_prime_at(x, prof), 0.0, L, panels)


def beta_closed_form(params0: ModelParams, grid: Grid | None = None, panels: int = 64) -> float:
    """phi(0) (-phi''(0)) / ||phi'||^2 at Z = 0, with phi''(0) = -w phi(0) - f(phi(0))."""
    grid = grid or Grid()
    p0 = params0.with_Z(0.0)
    u0 = float(phi_at(0.0, make_profile(p0)))
    d2 = -p0.w * u0 - float(f(u0, p0))
    return u0 * (-d2) / dphi_norm_sq(p0, grid.L, panels)


def beta_numeric(curve: PerturbationCurve, delta: float) -> float:
    """Central difference (Pi_2(delta) - Pi_2(-delta)) / (2 delta) read off a scan."""
    i = int(np.argmin(np.abs(curve.Zs - delta)))
    j = int(np.argmin(np.abs(curve.Zs + delta)))
    if not (math.isclose(curve.Zs[i], delta) and math.isclose(curve.Zs[j], -delta)):
        raise ValueError(f"scan lacks the pair +-{delta}")
    return float((curve.pi2[i] - curve.pi2[j]) / (2.0 * delta))


def beta_numeric_at(params0: ModelParams, delta: float, grid: Grid | None = None, potential: str = "discrete") -> float:
    grid = grid or Grid()
    return (pi2_at(params0, delta, grid, potential) - pi2_at(params0, -delta, grid, potential)) / (2.0 * delta)


def check_identity_tal(params0: ModelParams, grid: Grid | None = None) -> float:
    """max |-L_0 (-w phi - f(phi)) - f''(phi) phi'^2| over the interior nodes."""
    grid = grid or Grid()
    p0 = params0.with_Z(0.0)
    prof = make_profile(p0)
    x = grid.x
    u = phi_at(x, prof)
    g = -p0.w * u - f(u, p0)
    lhs = apply(assemble_minusLZ(p0, prof, grid), g)
    rhs = f2(u, p0) * phi_prime_at(x, prof) ** 2
    return float(np.max(np.abs(lhs - rhs)))


def tal_scale(params0: ModelParams, grid: Grid | None = None) -> float:
    """sup |f''(phi) phi'^2|, the magnitude of either side of the identity."""
    grid = grid or Grid()
    p0 = params0.with_Z(0.0)
    prof = make_profile(p0)
    u = phi_at(grid.x, prof)
    return float(np.max(np.abs(f2(u, p0) * phi_prime_at(grid.x, prof) ** 2)))


def chi0(params0: ModelParams, grid: Grid | None = None, delta_chi: float = 1e-3) -> np.ndarray:
    """Node values of d phi_{w,Z} / dZ at Z = 0 by central differences."""
    grid = grid or Grid()
    up = phi_at(grid.x, make_profile(params0.with_Z(delta_chi)))
    dn = phi_at(grid.x, make_profile(params0.with_Z(-delta_chi)))
    return (up - dn) / (2.0 * delta_chi)


def delemaduro_terms(params0: ModelParams, grid: Grid | None, test_vectors, delta_chi: float = 1e-3) -> list[dict]:
    """Both sides of h <-L_0 chi_0, psi> = phi(0) psi(0) for each node vector psi."""
    grid = grid or Grid()
    p0 = params0.with_Z(0.0)
    prof = make_profile(p0)
    Lchi = apply(assemble_minusLZ(p0, prof, grid), chi0(p0, grid, delta_chi))
    u0 = float(phi_at(0.0, prof))
    out = []
    for psi in test_vectors:
        psi = np.asarray(psi, dtype=float)
        lhs = grid.h * float(Lchi @ psi)
        rhs = u0 * float(psi[grid.center])
        out.append({"lhs": lhs, "rhs": rhs, "discrepancy": abs(lhs - rhs), "psi_sup": float(np.max(np.abs(psi)))})
    return out


def check_delemaduro(params0: ModelParams, grid: Grid | None, test_vectors, delta_chi: float = 1e-3) -> float:
    """Worst discrepancy over the test vectors; see :func:`delemaduro_terms`."""
    return max(t["discrepancy"] for t in delemaduro_terms(params0, grid, test_vectors, delta_chi))


def psi0(params0: ModelParams, grid: Grid | None = None, delta: float = 1e-2, potential: str = "discrete") -> np.ndarray:
    """d Omega_2 / dZ at 0 by central differences of sign-aligned eigenvectors."""
    grid = grid or Grid()
    vs = []
    for Z in (-delta, delta):
        op, _ = linearised_operator(params0.with_Z(Z), grid, potential)
        vs.append(eigenvector(op, eigenvalue_k(op, 2)))
    if float(vs[0] @ vs[1]) < 0:
        vs[1] = -vs[1]
    return (vs[1] - vs[0]) / (2.0 * delta)
