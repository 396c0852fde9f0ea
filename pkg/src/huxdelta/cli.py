"""Command-line experiments writing CSV/JSON artifacts plus a manifest.

Exit status: 0 on success, 1 for parameters outside every regime, 2 for
numerical failures (pivot breakdown, non-convergence, failed structural checks).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .equilibrium import NoConvergence, jump_residual, make_profile, phi_at, phi_prime_at
from .evolution import (
    BLOWUP,
    EvolutionConfig,
    NonFinite,
    NotApplicable,
    WindowTooShort,
    blowup_certificate,
    growth_rate,
    initial_condition,
    l2_norm,
    simulate,
    weighted_R,
)
from .model import FIGURE1, POSITIVE_CASE, ModelParams, RegimeViolation, is_valid, params_from_mapping, validate
from .operators import DEFAULT_L, DEFAULT_N, Grid, discrete_equilibrium
from .perturbation import pi2_scan
from .spectral import (
    ZERO_MODE_BAND,
    NoIsolation,
    PivotBreakdown,
    eigenvalue_k,
    essential_margin,
    linearised_operator,
    morse_index,
)

COUNT_ZS = (-2.0, -1.0, -0.5, -0.1, 0.1, 0.5, 1.0, 2.0)
DEFAULT_SCAN = "-0.2,-0.1,-0.05,0,0.05,0.1,0.2"


class CheckFailed(RuntimeError):
    """A structural assertion made by a reproduce command did not hold."""


def _num(v):
    """JSON-safe real: shortest round-trip repr, non-finite as null."""
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, dict):
        return {k: _num(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_num(x) for x in v]
    return v


def _cell(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


class Artifacts:
    """Writes files into the output directory and remembers them for the manifest."""

    def __init__(self, out: Path):
        self.out = out
        self.out.mkdir(parents=True, exist_ok=True)
        self.files: list[str] = []

    def json(self, name: str, obj) -> Path:
        path = self.out / name
        path.write_text(json.dumps(_num(obj), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        self.files.append(name)
        return path

    def csv(self, name: str, header, rows) -> Path:
        path = self.out / name
        with path.open("w", newline="", encoding="utf-8") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(header)
            for row in rows:
                wr.writerow([_cell(v) for v in row])
        self.files.append(name)
        return path


def _versions() -> dict:
    import numba
    import scipy

    return {"huxdelta": __version__, "python": platform.python_version(), "numpy": np.__version__,
            "scipy": scipy.__version__, "numba": numba.__version__}


def _params(args) -> ModelParams:
    doc = {}
    if args.params:
        doc.update(json.loads(Path(args.params).read_text()))
    for key in ("a", "b", "p", "w", "Z", "beta1", "gamma1"):
        val = getattr(args, key, None)
        if val is not None:
            doc[key] = val
    if not doc:
        return FIGURE1
    if "beta1" not in doc and "gamma1" not in doc:
        base = FIGURE1.as_dict()
        base.update(doc)
        doc = base
    return params_from_mapping(doc)


def _grid(args) -> Grid:
    return Grid(float(args.L), int(args.N))


# ---------------------------------------------------------------- commands

def cmd_validate(args, art: Artifacts, man: dict):
    params = _params(args)
    man["params"] = params.as_dict()
    regime = validate(params)
    art.json("regime.json", regime.to_json())
    print(json.dumps(_num(regime.to_json())))


def _write_profile(art: Artifacts, name: str, params: ModelParams, xs: np.ndarray) -> dict:
    prof = make_profile(params)
    # x = 0 is reported with the right-hand derivative
    d = phi_prime_at(np.where(xs == 0.0, 0.0, xs), prof)
    art.csv(name + ".csv", ["x", "phi", "phi_prime"], zip(xs, phi_at(xs, prof), d))
    side = {"s": prof.shift, "peak": prof.peak, "kappa": prof.kappa}
    art.json(name + ".json", side)
    return {"Z": params.Z, **side, "jump_residual": jump_residual(prof)}


def _profile_xs(args) -> np.ndarray:
    n = int(args.points)
    if n < 3 or n % 2 == 0:
        raise SystemExit("--points must be odd and >= 3 so that x = 0 is sampled")
    m = n // 2
    # integer offsets keep the samples exactly antisymmetric
    return (np.arange(n) - m) * (args.xmax / m)


def cmd_profile(args, art, man):
    params = _params(args)
    man["params"] = params.as_dict()
    man["regime"] = validate(params).to_json()
    man["samples"] = {"xmax": args.xmax, "points": args.points}
    info = _write_profile(art, "profile", params, _profile_xs(args))
    print(json.dumps(_num(info)))


def cmd_reproduce_figure1(args, art, man):
    xs = _profile_xs(args)
    man["samples"] = {"xmax": args.xmax, "points": args.points}
    rows = []
    for Z in (-2.0, 0.0, 2.0):
        params = FIGURE1.with_Z(Z)
        validate(params)
        info = _write_profile(art, f"figure1_Z{Z:+g}", params, xs)
        prof = make_profile(params)
        u = phi_at(xs, prof)
        info["positive"] = bool(np.all(u > 0))
        info["even"] = bool(np.array_equal(u, u[::-1]))
        rows.append(info)
    man["params"] = FIGURE1.as_dict()
    art.json("figure1_summary.json", {"profiles": rows})
    bad = [r for r in rows if not (r["positive"] and r["even"] and r["jump_residual"] <= 1e-10)]
    for r in rows:
        print(f"Z={r['Z']:+g}  s={r['s']!r}  peak={r['peak']!r}  jump={r['jump_residual']:.1e}")
    if bad:
        raise CheckFailed(f"profile checks failed for Z in {[r['Z'] for r in bad]}")


def cmd_spectrum(args, art, man):
    params = _params(args)
    grid = _grid(args)
    man["params"] = params.as_dict()
    man["regime"] = validate(params).to_json()
    rep = morse_index(params, grid, potential=args.potential, vectors=args.vectors)
    man["tolerances"].update({"neg_count_shift": "-1e-9 * scale", "essential_margin": essential_margin(grid),
                              "zero_band": rep.zero_band})
    art.json("spectrum.json", rep.to_json())
    if args.vectors and rep.eigenvalues.size:
        cols = ["x"] + [f"v{k + 1}" for k in range(rep.eigenvalues.size)]
        art.csv("eigenvectors.csv", cols, zip(grid.x, *rep.eigenvectors))
    print(json.dumps(_num(rep.to_json())))


def cmd_scan_pi2(args, art, man):
    params = _params(args)
    grid = _grid(args)
    Zs = [float(z) for z in args.Zs.split(",")]
    for Z in Zs:
        validate(params.with_Z(Z))
    man["params"] = params.as_dict()
    man["scan"] = {"Zs": Zs, "potential": args.potential}
    curve = pi2_scan(params, Zs, grid, potential=args.potential)
    art.csv("pi2.csv", ["Z", "pi2", "neg_count"], zip(curve.Zs, curve.pi2, curve.neg_counts))
    bn, bc = curve.beta_numeric, curve.beta_closed
    summary = {"beta_numeric": bn, "beta_closed": bc,
               "rel_err": None if bn is None else abs(bn / bc - 1.0),
               "outside_window": curve.outside_window}
    art.json("beta.json", summary)
    print(json.dumps(_num(summary)))


def _evolve(args, art, man, default_ic: str):
    params = _params(args)
    grid = _grid(args)
    man["params"] = params.as_dict()
    man["regime"] = validate(params).to_json() if is_valid(params) else None
    ic = args.ic or default_ic
    config = EvolutionConfig(dt=args.dt, Tmax=args.Tmax, grid=grid, blow_threshold=args.blow_threshold,
                             record_every=args.record_every)
    man["evolution"] = {"dt": config.dt, "Tmax": config.Tmax, "blow_threshold": config.blow_threshold,
                        "record_every": config.record_every, "ic": ic}
    g = initial_condition(ic, params, grid)
    reference = discrete_equilibrium(params, grid) if ic.startswith("equilibrium") else None
    trace = simulate(g, params, config, reference=reference)
    art.csv("trace.csv", ["t", "l2", "h1z", "S", "R"], trace.rows())
    return params, grid, ic, g, trace, reference


def cmd_evolve(args, art, man):
    params, grid, ic, g, trace, ref = _evolve(args, art, man, "equilibrium")
    summary = {"terminal": trace.terminal, "t_detect": trace.t_detect, "t_final": trace.times[-1],
               "l2_final": trace.l2[-1]}
    if ic.startswith("equilibrium+eig"):
        _, k, eps = ic.split(":")
        op, _ = linearised_operator(params, grid, "discrete")
        summary["spectral_rate"] = -eigenvalue_k(op, int(k))
        try:
            summary["growth_rate"] = growth_rate(trace, float(eps), 1e-2 * l2_norm(ref, grid))
        except WindowTooShort:
            summary["growth_rate"] = None
        man["tolerances"]["linear_window"] = "[10 eps, 1e-2 |phi|]"
    art.json("evolve.json", summary)
    print(json.dumps(_num(summary)))


def cmd_blowup(args, art, man):
    # NotApplicable outside the blow-up hypotheses, before any time stepping
    blowup_certificate(_params(args), 0.0)
    params, grid, ic, g, trace, _ = _evolve(args, art, man, "weighted:1.5")
    R0 = weighted_R(g, params.Z, grid)
    cert = blowup_certificate(params, R0)
    out = cert.to_json()
    out.update({"t_detect": trace.t_detect if trace.terminal == BLOWUP else None, "R0": R0,
                "z1": cert.z1, "terminal": trace.terminal})
    man["tolerances"].update({"Tbound_quad_epsabs": 1e-8, "Tbound_tail": 1e-10})
    art.json("certificate.json", out)
    print(json.dumps(_num(out)))


def cmd_reproduce_theorem1(args, art, man):
    grid = _grid(args)
    cases = {"figure1": FIGURE1, "positive_b": POSITIVE_CASE}
    if args.params or any(getattr(args, k) is not None for k in ("a", "b", "p", "w")):
        cases = {"custom": _params(args)}
    Zs = [float(z) for z in args.Zs.split(",")] if args.Zs else list(COUNT_ZS)
    Zs = sorted(set(Zs) | {-z for z in Zs} | {0.0})
    rows, failures = [], []
    for name, base in cases.items():
        for Z in Zs:
            params = base.with_Z(Z)
            validate(params)
            rep = morse_index(params, grid, potential=args.potential, vectors=False)
            expected = 2 if Z < 0 else 1
            ok = rep.neg_count == expected
            if Z == 0.0:
                ok = ok and rep.zero_mode is not None
            rows.append((name, Z, rep.neg_count, expected, int(ok)))
            if not ok:
                failures.append((name, Z))
    man["cases"] = {k: v.as_dict() for k, v in cases.items()}
    man["tolerances"]["zero_band"] = ZERO_MODE_BAND
    art.csv("theorem1.csv", ["case", "Z", "neg_count", "expected", "ok"], rows)
    for r in rows:
        print(f"{r[0]:<11s} Z={r[1]:+g}  neg_count={r[2]}  expected={r[3]}  {'ok' if r[4] else 'MISMATCH'}")
    if failures:
        raise CheckFailed(f"neg_count mismatch at {failures}")


# ---------------------------------------------------------------- parser

def _add_params(sp):
    g = sp.add_argument_group("model parameters (default: a=6, b=-1, p=5, w=-4, Z=0)")
    g.add_argument("--params", help="JSON file with keys a, b, p, w, Z (or beta1, gamma1)")
    for key in ("a", "b", "p", "w", "Z", "beta1", "gamma1"):
        g.add_argument(f"--{key}", type=float, default=None)


def _add_grid(sp):
    sp.add_argument("--L", type=float, default=DEFAULT_L, help="half-width of the grid")
    sp.add_argument("--N", type=int, default=DEFAULT_N, help="number of intervals (even)")


def _add_samples(sp):
    sp.add_argument("--xmax", type=float, default=6.0)
    sp.add_argument("--points", type=int, default=1201)


def _add_evolution(sp):
    sp.add_argument("--dt", type=float, default=1e-3)
    sp.add_argument("--Tmax", type=float, default=1.0)
    sp.add_argument("--ic", default=None,
                    help="equilibrium | profile | equilibrium+eig:k:eps | gaussian:amp:width | weighted:amp")
    sp.add_argument("--record-every", type=int, default=10)
    sp.add_argument("--blow-threshold", type=float, default=1e6)


COMMANDS = {
    "validate": (cmd_validate, "classify parameters into a regime", (_add_params,)),
    "profile": (cmd_profile, "closed-form equilibrium profile as CSV", (_add_params, _add_samples)),
    "spectrum": (cmd_spectrum, "discrete spectrum and Morse index of -L_Z", (_add_params, _add_grid)),
    "scan-pi2": (cmd_scan_pi2, "second eigenvalue across Z and its slope at 0", (_add_params, _add_grid)),
    "evolve": (cmd_evolve, "time evolution with a trace CSV", (_add_params, _add_grid, _add_evolution)),
    "blowup": (cmd_blowup, "blow-up run and certificate", (_add_params, _add_grid, _add_evolution)),
    "reproduce-figure1": (cmd_reproduce_figure1, "the three profiles with a=6, b=-1, p=5, w=-4", (_add_samples,)),
    "reproduce-theorem1": (cmd_reproduce_theorem1, "negative-eigenvalue counts over a Z sweep",
                           (_add_params, _add_grid)),
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="huxdelta", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name, (_, help_, adders) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_)
        for add in adders:
            add(sp)
        sp.add_argument("--out", default="huxdelta-out", help="output directory")
        if name in ("spectrum", "scan-pi2", "reproduce-theorem1"):
            sp.add_argument("--potential", choices=("discrete", "closed_form"), default="discrete")
        if name == "spectrum":
            sp.add_argument("--vectors", action="store_true", help="also write eigenvectors.csv")
        if name == "scan-pi2":
            sp.add_argument("--Zs", default=DEFAULT_SCAN, help="comma-separated Z values")
        if name == "reproduce-theorem1":
            sp.add_argument("--Zs", default=None, help="comma-separated |Z| values (mirrored)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    func = COMMANDS[args.command][0]
    art = Artifacts(Path(args.out))
    man = {"command": args.command, "argv": list(sys.argv[1:] if argv is None else argv),
           "versions": _versions(), "tolerances": {"bisection": "8 eps scale", "pivot_floor": 1e-300}}
    if hasattr(args, "L"):
        g = _grid(args)
        man["grid"] = {"L": g.L, "N": g.N, "h": g.h}
    status = 0
    try:
        func(args, art, man)
    except (RegimeViolation, NotApplicable) as exc:
        print(f"error: {exc}", file=sys.stderr)
        man["error"] = str(exc)
        status = 1
    except (NoConvergence, PivotBreakdown, NoIsolation, NonFinite, WindowTooShort, CheckFailed,
            np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        man["error"] = str(exc)
        status = 2
    man["status"] = status
    man["artifacts"] = list(art.files)
    art.json("manifest.json", man)
    return status


if __name__ == "__main__":
    sys.exit(main())
