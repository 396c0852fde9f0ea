"""Closed-form equilibrium profiles and their verification.

The Z = 0 profile is

    phi(y) = [-w / (alpha + A cosh((p-1) kappa y))]^(1/(p-1)),   A = sqrt(alpha^2 - beta_q w),

and the defect profile folds and shifts it, phi_Z(x) = phi(|x| - s), with the shift
chosen so that phi_Z'(0+) - phi_Z'(0-) = -Z phi_Z(0).  That condition reads
R(s) = -Z / (2 kappa) for the odd increasing map R below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .model import ModelParams, RegimeViolation, f, potential_F, validate


class NoConvergence(RuntimeError):
    pass


def R_of(s, params: ModelParams):
    """A sinh(u) / (alpha + A cosh(u)) with u = (p-1) kappa s; odd, increasing, into (-1, 1)."""
    A = params.amp
    u = (params.p - 1.0) * params.kappa * np.asarray(s, dtype=float)
    return A * np.sinh(u) / (params.alpha + A * np.cosh(u))


def _R_prime(s: float, params: ModelParams) -> float:
    A, al = params.amp, params.alpha
    k = (params.p - 1.0) * params.kappa
    u = k * s
    return k * A * (al * math.cosh(u) + A) / (al + A * math.cosh(u)) ** 2


@dataclass(frozen=True)
class ShiftSolve:
    target: float
    s: float
    method: str
    residual: float


def _invert_R(r: float, params: ModelParams) -> tuple[float, str]:
    A, al = params.amp, params.alpha
    k = (params.p - 1.0) * params.kappa
    if r == 0.0:
        return 0.0, "closed_form"
    if abs(r) <= 0.999:
        # A (sinh u - r cosh u) = r alpha  and  sinh u - r cosh u = sqrt(1-r^2) sinh(u - artanh r)
        u = math.atanh(r) + math.asinh(r * al / (A * math.sqrt(1.0 - r * r)))
        return u / k, "closed_form"
    # Newton on R from the asymptotic guess; R saturates, so damp the steps
    s = math.copysign(math.log(2.0 * al / (A * (1.0 - abs(r))) + 1.0) / k, r)
    for _ in range(200):
        g = float(R_of(s, params)) - r
        if abs(g) <= 1e-15:
            break
        step = g / _R_prime(s, params)
        s -= max(min(step, 1.0 / k), -1.0 / k)
    return s, "newton"


def solve_shift(params: ModelParams) -> ShiftSolve:
    """Shift s with R(s) = -Z / (2 kappa)."""
    validate(params)
    target = -params.Z / (2.0 * params.kappa)
    if not abs(target) < 1.0:
        raise RegimeViolation("Z^2/4 >= -w", "|Z| >= 2 sqrt(-w)")
    s, method = _invert_R(target, params)
    residual = abs(float(R_of(s, params)) - target)
    return ShiftSolve(target=target, s=s, method=method, residual=residual)


def _phi_unshifted(y, params: ModelParams):
    k = (params.p - 1.0) * params.kappa
    return (-params.w / (params.alpha + params.amp * np.cosh(k * y))) ** (1.0 / (params.p - 1.0))


@dataclass(frozen=True)
class EquilibriumProfile:
    params: ModelParams
    shift: float
    peak: float
    kappa: float
    amp: float

    def __call__(self, x):
        return phi_at(x, self)

    def derivative(self, x):
        return phi_prime_at(x, self)


def make_profile(params: ModelParams) -> EquilibriumProfile:
    sol = solve_shift(params)
    peak = float(_phi_unshifted(-sol.s, params))
    return EquilibriumProfile(params=params, shift=sol.s, peak=peak, kappa=params.kappa, amp=params.amp)


def phi_at(x, profile: EquilibriumProfile):
    y = np.abs(np.asarray(x, dtype=float)) - profile.shift
    return _phi_unshifted(y, profile.params)


def phi_prime_at(x, profile: EquilibriumProfile):
    """Analytic derivative; at x = +0.0 / -0.0 it returns the right / left limit.

    Uses phi'(y) / phi(y) = -kappa R(y) for the unshifted profile.
    """
    x = np.asarray(x, dtype=float)
    y = np.abs(x) - profile.shift
    side = np.copysign(1.0, x)
    out = -profile.kappa * _phi_unshifted(y, profile.params) * R_of(y, profile.params) * side
    return out[()] if out.ndim == 0 else out


def jump_residual(profile: EquilibriumProfile) -> float:
    """|phi'(0+) - phi'(0-) + Z phi(0)| relative to phi(0)."""
    Z = profile.params.Z
    jump = phi_prime_at(0.0, profile) - phi_prime_at(-0.0, profile)
    return abs(jump + Z * phi_at(0.0, profile)) / phi_at(0.0, profile)


def stationary_residual(profile: EquilibriumProfile, xs, h_fd: float = 1e-3) -> float:
    """max |phi'' + w phi + f(phi)| over xs, with phi'' from 5-point central differences."""
    xs = np.asarray(xs, dtype=float)
    if np.any(np.abs(xs) <= 2.0 * h_fd):
        raise ValueError("stencil would straddle the defect at x = 0")
    ph = lambda t: phi_at(t, profile)
    d2 = (
        -ph(xs + 2 * h_fd) + 16 * ph(xs + h_fd) - 30 * ph(xs) + 16 * ph(xs - h_fd) - ph(xs - 2 * h_fd)
    ) / (12.0 * h_fd**2)
    params = profile.params
    u = ph(xs)
    return float(np.max(np.abs(d2 + params.w * u + f(u, params))))


def first_integral_residual(profile: EquilibriumProfile, xs) -> float:
    """max |phi'^2 + 2 F(phi)| over xs, relative to max phi'^2."""
    xs = np.asarray(xs, dtype=float)
    if np.any(xs == 0.0):
        raise ValueError("xs must exclude 0")
    d = phi_prime_at(xs, profile)
    u = phi_at(xs, profile)
    res = np.abs(d**2 + 2.0 * potential_F(u, profile.params))
    return float(np.max(res) / np.max(d**2))


def b0_profile_at(x, params: ModelParams):
    """Profile for b = 0 written with sech^2 and an artanh shift."""
    if params.b != 0.0:
        raise ValueError("b0_profile_at needs b == 0")
    validate(params)
    p, w, a = params.p, params.w, params.a
    kap = math.sqrt(-w)
    arg = (p - 1.0) * kap * np.abs(np.asarray(x, dtype=float)) / 2.0 + math.atanh(params.Z / (2.0 * kap))
    return ((p + 1.0) * (-w) / (2.0 * a) / np.cosh(arg) ** 2) ** (1.0 / (p - 1.0))


@dataclass(frozen=True)
class ShootingResult:
    x: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    tail_amplitude: float
    x_start: float


def shooting_oracle(params: ModelParams, L: float = 6.0, tol: float = 1e-12, n: int = 601) -> ShootingResult:
    """Integrate phi'' = -w phi - f(phi) inward from a linear tail and shoot on its amplitude.

    The tail phi = c exp(-kappa x) is imposed far out (where phi ~ 1e-11 of the
    peak), and c is adjusted until phi'(0+) = -(Z/2) phi(0).  Samples on [0, L]
    are returned.  Nothing from the closed form is used except a rough scale
    for the amplitude bracket.
    """
    validate(params)
    kap = params.kappa
    w = params.w
    # where the linear tail is accurate to ~1e-11 relative
    x_start = max(L, 26.0 / kap)

    def rhs(_, y):
        return [y[1], -w * y[0] - f(y[0], params)]

    def integrate(c, dense=False):
        y0 = [c * math.exp(-kap * x_start), -kap * c * math.exp(-kap * x_start)]
        return solve_ivp(rhs, (x_start, 0.0), y0, method="DOP853", rtol=tol, atol=tol * 1e-12,
                         dense_output=dense)

    def mismatch(c):
        sol = integrate(c)
        u0, du0 = sol.y[0, -1], sol.y[1, -1]
        return du0 + 0.5 * params.Z * u0

    # rough tail amplitude of the Z = 0 profile: phi ~ (2(-w)/A)^(1/(p-1)) e^{-kappa x}
    c_ref = (2.0 * (-w) / params.amp) ** (1.0 / (params.p - 1.0))
    lo, hi = 0.1 * c_ref, 10.0 * c_ref
    g_lo, g_hi = mismatch(lo), mismatch(hi)
    if not (np.isfinite(g_lo) and np.isfinite(g_hi)) or g_lo * g_hi > 0:
        raise NoConvergence(f"shooting bracket [{lo!r}, {hi!r}] does not straddle a root")
    c = brentq(mismatch, lo, hi, xtol=1e-15 * c_ref, rtol=1e-15, maxiter=200)
    sol = integrate(c, dense=True)
    xs = np.linspace(0.0, L, n)
    Y = sol.sol(xs)
    return ShootingResult(x=xs, phi=Y[0], dphi=Y[1], tail_amplitude=c, x_start=x_start)
