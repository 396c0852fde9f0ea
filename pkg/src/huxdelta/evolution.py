"""Time evolution of u_t = -(A_Z - w) u + f(u) on the truncated grid.

One step of the linearly implicit scheme solves

    (I + dt (A_Z - w)) u_next = u + dt f(u),

so diffusion and the defect are implicit and the reaction is explicit.  The
fixed points of the step are exactly the discrete equilibria, for every dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.linalg import lapack

from .model import ModelParams, f
from .operators import Grid, assemble_AZ, discrete_equilibrium
from .equilibrium import make_profile, phi_at

COMPLETED = "completed"
BLOWUP = "blowup"
SATURATED = "instability_saturated"


class NonFinite(FloatingPointError):
    pass


class WindowTooShort(ValueError):
    pass


class NotApplicable(ValueError):
    pass


@dataclass(frozen=True)
class EvolutionConfig:
    dt: float = 1e-3
    Tmax: float = 1.0
    grid: Grid = field(default_factory=Grid)
    blow_threshold: float = 1e6
    record_every: int = 10
    stop_deviation: float | None = None

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")


@lru_cache(maxsize=32)
def _factor(Z: float, w: float, grid: Grid, dt: float):
    op = assemble_AZ(grid, Z)
    dl = dt * op.off
    d = 1.0 + dt * (op.diag - w)
    dl, d, du, du2, ipiv, info = lapack.dgttrf(dl, d, dl.copy())
    if info != 0:
        raise np.linalg.LinAlgError(f"dgttrf failed with info={info}")
    return dl, d, du, du2, ipiv


def step(u: np.ndarray, params: ModelParams, config: EvolutionConfig) -> np.ndarray:
    """One linearly implicit step."""
    dl, d, du, du2, ipiv = _factor(params.Z, params.w, config.grid, config.dt)
    with np.errstate(over="ignore", invalid="ignore"):
        rhs = u + config.dt * f(u, params)
    out, info = lapack.dgttrs(dl, d, du, du2, ipiv, rhs)
    if info != 0 or not np.all(np.isfinite(out)):
        raise NonFinite("non-finite entries after step")
    return out


def l2_norm(u: np.ndarray, grid: Grid) -> float:
    return math.sqrt(grid.h * float(u @ u))


def _grad_sq(u: np.ndarray, grid: Grid) -> float:
    du = np.diff(u, prepend=0.0, append=0.0) / grid.h
    return grid.h * float(du @ du)


def energy_S(u: np.ndarray, params: ModelParams, grid: Grid) -> float:
    """Discrete S = h sum[(Du)^2/2 - w u^2/2 - a|u|^(p+1)/(p+1) - b|u|^(2p)/(2p)] - Z u(0)^2/2.

    Its gradient divided by h is (A_Z - w) u - f(u), so the scheme is a
    discrete gradient flow of S.
    """
    h, p = grid.h, params.p
    au = np.abs(u)
    bulk = -params.w * float(u @ u) / 2.0 - params.a * float(np.sum(au ** (p + 1.0))) / (p + 1.0) \
        - params.b * float(np.sum(au ** (2.0 * p))) / (2.0 * p)
    return 0.5 * _grad_sq(u, grid) + h * bulk - params.Z * u[grid.center] ** 2 / 2.0


def h1z_norm(u: np.ndarray, params: ModelParams, grid: Grid) -> float:
    """sqrt(|u'|^2 + (-w + a1)|u|^2 - Z u(0)^2) with a1 = max(0, Z^2/4 + w) + 1."""
    a1 = max(0.0, params.Z**2 / 4.0 + params.w) + 1.0
    val = _grad_sq(u, grid) + (-params.w + a1) * grid.h * float(u @ u) - params.Z * u[grid.center] ** 2
    return math.sqrt(max(val, 0.0))


def weighted_R(u: np.ndarray, Z: float, grid: Grid) -> float:
    """Trapezoidal integral of u exp(-Z|x|/2); the Dirichlet end values are zero."""
    return grid.h * float(np.sum(u * np.exp(-0.5 * Z * np.abs(grid.x))))


@dataclass
class EvolutionTrace:
    times: np.ndarray
    l2: np.ndarray
    h1z: np.ndarray
    S: np.ndarray
    R: np.ndarray
    deviation: np.ndarray
    min_u: np.ndarray
    max_u: np.ndarray
    terminal: str
    t_detect: float | None
    u_final: np.ndarray = field(repr=False)

    def rows(self):
        for i in range(self.times.size):
            yield self.times[i], self.l2[i], self.h1z[i], self.S[i], self.R[i]


def simulate(g: np.ndarray, params: ModelParams, config: EvolutionConfig,
             reference: np.ndarray | None = None) -> EvolutionTrace:
    """Step from ``g`` until Tmax, blow-up or (optionally) saturation of ``|u - reference|``.

    Blow-up means the L2 norm passes ``blow_threshold`` or the step produces
    non-finite values; ``t_detect`` is the time of the last finite state.
    """
    grid = config.grid
    u = np.array(g, dtype=float)
    nsteps = int(round(config.Tmax / config.dt))
    rec = {k: [] for k in ("t", "l2", "h1z", "S", "R", "dev", "min", "max")}

    def record(t, v):
        with np.errstate(over="ignore", invalid="ignore"):
            _record(t, v)

    def _record(t, v):
        rec["t"].append(t)
        rec["l2"].append(l2_norm(v, grid))
        rec["h1z"].append(h1z_norm(v, params, grid))
        rec["S"].append(energy_S(v, params, grid))
        rec["R"].append(weighted_R(v, params.Z, grid) if params.Z > 0 else math.nan)
        rec["dev"].append(l2_norm(v - reference, grid) if reference is not None else math.nan)
        rec["min"].append(float(np.min(v)))
        rec["max"].append(float(np.max(v)))

    record(0.0, u)
    terminal, t_detect = COMPLETED, None
    for n in range(1, nsteps + 1):
        t = n * config.dt
        try:
            nxt = step(u, params, config)
        except NonFinite:
            terminal, t_detect = BLOWUP, (n - 1) * config.dt
            break
        u = nxt
        l2 = l2_norm(u, grid)
        if not math.isfinite(l2) or l2 > config.blow_threshold:
            if math.isfinite(l2):
                record(t, u)
                t_detect = t
            else:
                t_detect = (n - 1) * config.dt
            terminal = BLOWUP
            break
        if config.stop_deviation is not None and reference is not None \
                and l2_norm(u - reference, grid) > config.stop_deviation:
            record(t, u)
            terminal = SATURATED
            break
        if n % config.record_every == 0 or n == nsteps:
            record(t, u)
    arr = {k: np.array(v) for k, v in rec.items()}
    return EvolutionTrace(times=arr["t"], l2=arr["l2"], h1z=arr["h1z"], S=arr["S"], R=arr["R"],
                          deviation=arr["dev"], min_u=arr["min"], max_u=arr["max"],
                          terminal=terminal, t_detect=t_detect, u_final=u)


def _slope(t: np.ndarray, y: np.ndarray) -> float:
    return float(np.polyfit(t, np.log(y), 1)[0])


def growth_rate(trace: EvolutionTrace, eps: float, upper: float) -> float:
    """Least-squares slope of log|u - phi| while it lies in [10 eps, upper].

    ``upper`` is normally 1e-2 |phi|.  Only the first contiguous stretch
    inside the window is used.
    """
    dev = trace.deviation
    inside = (dev >= 10.0 * eps) & (dev <= upper)
    idx = np.flatnonzero(inside)
    if idx.size:
        stop = np.flatnonzero(np.diff(idx) > 1)
        idx = idx[: stop[0] + 1] if stop.size else idx
    if idx.size < 10:
        raise WindowTooShort(f"only {idx.size} records inside the linear window")
    return _slope(trace.times[idx], dev[idx])


def rate_over(trace: EvolutionTrace, t0: float, t1: float) -> float:
    """Least-squares slope of log|u - phi| over records with t0 <= t <= t1."""
    m = (trace.times >= t0) & (trace.times <= t1)
    if np.count_nonzero(m) < 10:
        raise WindowTooShort(f"only {np.count_nonzero(m)} records in [{t0}, {t1}]")
    return _slope(trace.times[m], trace.deviation[m])


@dataclass(frozen=True)
class BlowupCertificate:
    lambdaB: float
    betaB: float
    gammaB: float
    z1: float
    R1: float
    R1_root: float
    R0: float
    Tbound: float
    p: float

    def h(self, s):
        """lambda s + beta s^p + gamma s^(2p-1)."""
        return self.lambdaB * s + self.betaB * s**self.p + self.gammaB * s ** (2 * self.p - 1)

    def to_json(self) -> dict:
        return {"lambda": self.lambdaB, "beta": self.betaB, "gamma": self.gammaB, "R1": self.R1,
                "Tbound": self.Tbound if math.isfinite(self.Tbound) else None}


def blowup_constants(params: ModelParams) -> tuple[float, float, float]:
    a, b, p, w, Z = params.a, params.b, params.p, params.w, params.Z
    lam = w + Z * Z / 4.0
    beta = a * (Z / 4.0) ** ((p - 1.0) / p)
    gamma = b * (Z / 4.0) ** (2.0 * (p - 1.0) / (2.0 * p - 1.0))
    return lam, beta, gamma


def time_bound(R0: float, params: ModelParams, lam: float, beta: float, gamma: float) -> float:
    """Integral of 1 / (lam s + beta s^p + gamma s^(2p-1)) over [R0, inf)."""
    p = params.p
    q = 2.0 * p - 1.0

    def integrand(t):
        s = math.exp(t)
        return s / (lam * s + beta * s**p + gamma * s**q)

    # beyond S_inf the integrand is below 2/(gamma s^q) and the tail is < 1e-10
    s_tail = (2.0 / (gamma * (q - 1.0) * 1e-10)) ** (1.0 / (q - 1.0))
    s_tail = max(s_tail, (2.0 * abs(lam) / gamma) ** (1.0 / (q - 1.0)), 10.0 * R0)
    val, _ = quad(integrand, math.log(R0), math.log(s_tail), epsabs=1e-8, epsrel=1e-12, limit=400)
    return val


def blowup_certificate(params: ModelParams, R0: float) -> BlowupCertificate:
    """Constants lambda, beta, gamma, z1, R1 and the blow-up time bound for R(0) = R0."""
    a, b, p, w, Z = params.a, params.b, params.p, params.w, params.Z
    if not (Z > 0 and a > 0 and b > 0 and Z * Z / 4.0 < -w):
        raise NotApplicable("needs Z > 0, a > 0, b > 0 and Z^2/4 < -w")
    lam, beta, gamma = blowup_constants(params)
    bl = beta / lam
    z1 = (-bl - math.sqrt(bl * bl - 4.0 * gamma / lam)) / 2.0
    R1 = (z1 * lam / gamma) ** (1.0 / (p - 1.0))
    y = (-beta + math.sqrt(beta * beta - 4.0 * gamma * lam)) / (2.0 * gamma)
    R1_root = y ** (1.0 / (p - 1.0))
    T = time_bound(R0, params, lam, beta, gamma) if R0 > R1 else math.inf
    return BlowupCertificate(lambdaB=lam, betaB=beta, gammaB=gamma, z1=z1, R1=R1, R1_root=R1_root,
                             R0=R0, Tbound=T, p=p)


@dataclass(frozen=True)
class InequalityReport:
    min_slack: float
    tol: float
    holds: bool
    positivity_lost: bool
    records: int
    slack: np.ndarray = field(repr=False)


def check_R_inequality(trace: EvolutionTrace, cert: BlowupCertificate) -> InequalityReport:
    """Minimum of R' - (lambda R + beta R^p + gamma R^(2p-1)) over positive interior records."""
    t, R = trace.times, trace.R
    dR = np.gradient(R, t)
    positive = trace.min_u >= -1e-10 * np.maximum(np.abs(trace.min_u), trace.max_u)
    use = positive.copy()
    use[0] = use[-1] = False
    use &= np.isfinite(dR) & np.isfinite(R)
    slack = dR - cert.h(R)
    tol = 1e-2 * float(np.max(np.abs(dR[use]))) if np.any(use) else 0.0
    m = float(np.min(slack[use])) if np.any(use) else math.nan
    return InequalityReport(min_slack=m, tol=tol, holds=bool(m >= -tol), positivity_lost=bool(not positive.all()),
                            records=int(np.count_nonzero(use)), slack=slack)


def initial_condition(kind: str, params: ModelParams, grid: Grid) -> np.ndarray:
    """Initial node vector from a short descriptor.

    ``equilibrium``            node-exact discrete equilibrium
    ``profile``                closed-form profile samples
    ``equilibrium+eig:k:eps``  discrete equilibrium plus eps times the k-th eigenvector of -L_Z
    ``gaussian:amp:width``     amp exp(-(x/width)^2)
    ``weighted:amp``           amp R1 (Z/2) exp(-Z|x|/2), so that R(0) is about amp R1
    """
    x = grid.x
    head, *rest = kind.split(":")
    if head == "equilibrium":
        return discrete_equilibrium(params, grid)
    if head == "profile":
        return phi_at(x, make_profile(params))
    if head == "equilibrium+eig":
        from .spectral import eigenvalue_k, eigenvector, linearised_operator

        k, eps = int(rest[0]), float(rest[1])
        op, u = linearised_operator(params, grid, "discrete")
        return u + eps * eigenvector(op, eigenvalue_k(op, k))
    if head == "gaussian":
        amp, width = float(rest[0]), float(rest[1])
        return amp * np.exp(-((x / width) ** 2))
    if head == "weighted":
        amp = float(rest[0])
        cert = blowup_certificate(params, 0.0)
        return amp * cert.R1 * (params.Z / 2.0) * np.exp(-0.5 * params.Z * np.abs(x))
    raise ValueError(f"unknown initial condition {kind!r}")
