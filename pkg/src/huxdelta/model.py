"""Model parameters, admissible regimes and the nonlinearity.

The equation is

    u_t - u_xx = Z delta(x) u + w u + a u^p + b u^(2p-1)

and every object here is an immutable value.  Powers of possibly negative
arguments use the odd extension ``|u|^(q-1) u`` so that the time stepper stays
defined for sign-changing iterates while agreeing with ``u^q`` for ``u > 0``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

POSITIVE_B = "PositiveB"
NEGATIVE_B = "NegativeB"
ZERO_B = "ZeroB"


class RegimeViolation(ValueError):
    """Raised when parameters fall outside every supported regime.

    ``inequality`` names the failing condition, e.g. ``"Z^2/4 >= -w"``.
    """

    def __init__(self, inequality: str, detail: str = ""):
        self.inequality = inequality
        msg = f"regime violation: {inequality}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


@dataclass(frozen=True)
class ModelParams:
    a: float
    b: float
    p: float
    w: float
    Z: float = 0.0

    @property
    def alpha(self) -> float:
        return self.a / (self.p + 1.0)

    @property
    def beta_q(self) -> float:
        return self.b / self.p

    @property
    def kappa(self) -> float:
        """Decay rate sqrt(-w) of the equilibrium tails."""
        return math.sqrt(-self.w)

    @property
    def amp(self) -> float:
        """sqrt(alpha^2 - beta_q w), the coefficient of cosh in the profile."""
        return math.sqrt(self.alpha**2 - self.beta_q * self.w)

    def with_Z(self, Z: float) -> "ModelParams":
        return replace(self, Z=float(Z))

    def as_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "p": self.p, "w": self.w, "Z": self.Z}


@dataclass(frozen=True)
class Regime:
    """Regime tag plus the open interval admissible for ``-w`` at this Z.

    ``negw_upper`` is ``None`` when the interval is unbounded above.
    """

    tag: str
    negw_lower: float
    negw_upper: float | None

    def to_json(self) -> dict:
        # JSON keys follow the published report format; both bound -w.
        return {"regime": self.tag, "w_lower": self.negw_lower, "w_upper": self.negw_upper}


def negative_b_bound(a: float, b: float, p: float) -> float:
    """Upper bound -p a^2 / ((p+1)^2 b) on -w for b < 0."""
    # divide before multiplying so extreme a or b do not overflow
    return (p / (p + 1.0)) * (a / (p + 1.0)) * (a / -b)


def validate(params: ModelParams) -> Regime:
    """Return the regime whose inequality chain holds, else raise RegimeViolation."""
    a, b, p, w, Z = params.a, params.b, params.p, params.w, params.Z
    for name, v in params.as_dict().items():
        if not math.isfinite(v):
            raise RegimeViolation(f"{name} is not finite")
    if not p > 1.0:
        raise RegimeViolation("p <= 1", f"p = {p!r}")
    if not a > 0.0:
        raise RegimeViolation("a <= 0", f"a = {a!r}")
    lower = Z * Z / 4.0
    if not lower < -w:
        raise RegimeViolation("Z^2/4 >= -w", f"Z^2/4 = {lower!r}, -w = {-w!r}")
    if b > 0.0:
        return Regime(POSITIVE_B, lower, None)
    if b == 0.0:
        return Regime(ZERO_B, lower, None)
    upper = negative_b_bound(a, b, p)
    if not -w < upper:
        raise RegimeViolation(
            f"-w >= {upper:.12g}",
            f"-w = {-w!r} must stay below -p a^2/((p+1)^2 b) = {upper!r}",
        )
    return Regime(NEGATIVE_B, lower, upper)


def is_valid(params: ModelParams) -> bool:
    try:
        validate(params)
    except RegimeViolation:
        return False
    return True


def from_huxley(beta1: float, gamma1: float, p: float = 2.0) -> ModelParams:
    """Parameters reducing the model to u_t - u_xx = beta1 u (1 - u^(p-1)) (u^(p-1) - gamma1)."""
    if not beta1 > 0.0:
        raise ValueError(f"beta1 must be positive, got {beta1!r}")
    if not 0.0 < gamma1 < 1.0:
        raise ValueError(f"gamma1 must lie in (0, 1), got {gamma1!r}")
    if not p > 1.0:
        raise ValueError(f"p must exceed 1, got {p!r}")
    return ModelParams(a=beta1 * (1.0 + gamma1), b=-beta1, p=float(p), w=-gamma1 * beta1, Z=0.0)


def signed_power(u, q: float):
    """Odd extension |u|^(q-1) u."""
    u = np.asarray(u, dtype=float)
    return np.abs(u) ** (q - 1.0) * u


def f(u, params: ModelParams):
    """Reaction term a u^p + b u^(2p-1) (odd extension)."""
    p = params.p
    return params.a * signed_power(u, p) + params.b * signed_power(u, 2.0 * p - 1.0)


def f1(u, params: ModelParams):
    """First derivative of f; even in u."""
    p = params.p
    au = np.abs(np.asarray(u, dtype=float))
    return params.a * p * au ** (p - 1.0) + params.b * (2.0 * p - 1.0) * au ** (2.0 * p - 2.0)


def f2(u, params: ModelParams):
    """Second derivative of f; odd in u.

    For p < 2 the a-term is singular at u = 0 and the value there is ``inf``.
    """
    p = params.p
    u = np.asarray(u, dtype=float)
    au = np.abs(u)
    s = np.sign(u)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (
            params.a * p * (p - 1.0) * au ** (p - 2.0) * s
            + params.b * (2.0 * p - 1.0) * (2.0 * p - 2.0) * au ** (2.0 * p - 3.0) * s
        )
    if p < 2.0:
        out = np.where(u == 0.0, np.inf, out)
    return out[()] if out.ndim == 0 else out


def potential_F(s, params: ModelParams):
    """Primitive w s^2/2 + a s^(p+1)/(p+1) + b s^(2p)/(2p) for s >= 0."""
    s = np.asarray(s, dtype=float)
    p = params.p
    return (
        params.w * s**2 / 2.0
        + params.a * s ** (p + 1.0) / (p + 1.0)
        + params.b * s ** (2.0 * p) / (2.0 * p)
    )


def params_from_mapping(doc: dict) -> ModelParams:
    """Build parameters from a JSON-style mapping.

    Keys ``a, b, p, w, Z`` are read directly.  If ``beta1`` and ``gamma1`` are
    present the Huxley reduction supplies ``a, b, w`` (``p`` and ``Z`` may still
    be given).
    """
    if "beta1" in doc or "gamma1" in doc:
        base = from_huxley(float(doc["beta1"]), float(doc["gamma1"]), float(doc.get("p", 2.0)))
        return replace(base, Z=float(doc.get("Z", 0.0)))
    missing = [k for k in ("a", "b", "p", "w") if k not in doc]
    if missing:
        raise KeyError(f"missing parameter keys: {missing}")
    return ModelParams(
        a=float(doc["a"]), b=float(doc["b"]), p=float(doc["p"]), w=float(doc["w"]),
        Z=float(doc.get("Z", 0.0)),
    )


def load_params(path) -> ModelParams:
    return params_from_mapping(json.loads(Path(path).read_text()))


# Parameter sets used throughout the tests and demos.
FIGURE1 = ModelParams(a=6.0, b=-1.0, p=5.0, w=-4.0, Z=0.0)
POSITIVE_CASE = ModelParams(a=1.0, b=1.0, p=2.0, w=-2.0, Z=0.0)
