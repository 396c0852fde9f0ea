"""Equilibria, spectra and dynamics for u_t - u_xx = Z delta(x) u + w u + a u^p + b u^(2p-1)."""

from .model import (
    FIGURE1,
    POSITIVE_CASE,
    ModelParams,
    Regime,
    RegimeViolation,
    f,
    f1,
    f2,
    from_huxley,
    load_params,
    potential_F,
    validate,
)
from .equilibrium import (
    EquilibriumProfile,
    NoConvergence,
    R_of,
    make_profile,
    phi_at,
    phi_prime_at,
    shooting_oracle,
    solve_shift,
)
from .operators import Grid, TridiagonalOperator, apply, assemble_AZ, assemble_minusLZ, discrete_equilibrium
from .spectral import SpectrumReport, eigenvalue_k, eigenvector, inertia_below, morse_index
from .perturbation import PerturbationCurve, beta_closed_form, beta_numeric, pi2_scan
from .evolution import EvolutionConfig, EvolutionTrace, blowup_certificate, simulate, step

__version__ = "0.1.0"
