"""Command-line front end: experiments in, JSON/CSV out.

Every command resolves its full configuration (flags over config file
over defaults), runs one experiment, and writes a JSON document plus an
optional CSV table.  The JSON always carries a `meta` block echoing the
resolved config, package/library versions and the grid actually used, so
a result file is self-describing and reruns are reproducible.

Determinism contract: identical config produces bit-identical JSON - no
timestamps, no unseeded randomness, sorted keys, fixed column orders.

Exit codes: 0 ok, 1 numeric failure, 2 config error, 3 regime violation
(e.g. certification failed); errors still emit a JSON document with a
machine-readable reason.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import os
import sys
from typing import Optional

import numpy as np
import scipy

from . import __version__
from .ansatz import solve_pulse, y_for_alpha
from .errors import ConfigError, NumericError, RegimeError
from .grids import Grid
from .operators import build_A, build_B, low_spectrum
from .params import ModelParams, kink_quantities
from .phase import solve_phase, theta_asymptotic, theta1_asymptotic
from .profiles import energy_identity_residual, eval_profile, ode_residual

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_CONFIG = 2
EXIT_REGIME = 3

COMMANDS = ("profile", "spectrum", "phase", "pulse", "stability",
            "alpha-c", "chi", "evolve", "kink", "sweep")


def emit_json(obj) -> str:
    """Canonical JSON serialization (stable across runs and re-emission)."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True) + "\n"


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def write_csv(path: str, columns: list, rows: list) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([repr(x) if isinstance(x, float) else x for x in row])


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="glpulse",
        description="pulse existence, stability and dynamics for the "
                    "quintic complex Ginzburg-Landau equation")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="JSON config file; flags override it")
    ap.add_argument("--nu", type=float)
    ap.add_argument("--L", type=float)
    ap.add_argument("--y", type=float)
    ap.add_argument("--alpha", type=float)
    ap.add_argument("--mu1", type=float)
    ap.add_argument("--mu2", type=float)
    ap.add_argument("--mu3", type=float)
    ap.add_argument("--p-exponent", dest="p_exponent", type=float)
    ap.add_argument("--X", type=float, help="grid half-width override")
    ap.add_argument("--h", type=float, help="grid spacing bound")
    ap.add_argument("--order", type=int)
    ap.add_argument("--tol", type=float, help="solver tolerance")
    ap.add_argument("--dt", type=float)
    ap.add_argument("--T", type=float)
    ap.add_argument("--delta", type=float, help="relative perturbation size")
    ap.add_argument("--no-certify", action="store_true")
    ap.add_argument("--grid-json", dest="grid_json",
                    help="sweep: JSON object of parameter lists")
    ap.add_argument("--sweep-command", dest="sweep_command",
                    choices=[c for c in COMMANDS if c != "sweep"])
    ap.add_argument("--workers", type=int)
    ap.add_argument("--out", help="JSON output path (default stdout)")
    ap.add_argument("--csv", dest="csv_path", help="CSV table output path")
    return ap


DEFAULTS = {
    "nu": None, "L": None, "y": None, "alpha": None,
    "mu1": 0.0, "mu2": 1.0, "mu3": 0.0, "p_exponent": 1.0,
    "X": None, "h": 0.02, "order": 8, "tol": 1e-11,
    "dt": 0.01, "T": 1000.0, "delta": 1e-3, "certify": True,
    "grid_json": None, "sweep_command": None, "workers": None,
}


def resolve_config(args: argparse.Namespace) -> dict:
    """flags > config file > defaults; the result records every field."""
    cfg = dict(DEFAULTS)
    cfg["command"] = args.command
    if args.config:
        try:
            with open(args.config) as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}")
        unknown = set(file_cfg) - set(DEFAULTS) - {"command"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(file_cfg)
        cfg["command"] = args.command
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    if args.no_certify:
        cfg["certify"] = False
    if cfg["workers"] is None:
        env = os.environ.get("GLPULSE_WORKERS")
        cfg["workers"] = int(env) if env else None
    return cfg


def params_from_config(cfg: dict) -> ModelParams:
    if (cfg["nu"] is None) == (cfg["L"] is None):
        raise ConfigError("exactly one of --nu / --L is required")
    mu = (0.0, cfg["mu1"], cfg["mu2"], cfg["mu3"])
    if cfg["nu"] is not None:
        base = ModelParams.from_nu(cfg["nu"], mu=mu)
    else:
        base = ModelParams.from_L(cfg["L"], mu=mu)
    if cfg["y"] is not None and cfg["alpha"] is not None:
        raise ConfigError("give at most one of --y / --alpha")
    if cfg["alpha"] is not None:
        return y_for_alpha(base, cfg["alpha"], p_exponent=cfg["p_exponent"])
    if cfg["y"] is not None:
        return base.with_y(cfg["y"])
    return base


def grid_from_config(cfg: dict, params: ModelParams) -> Grid:
    if cfg["X"] is not None:
        return Grid.make(cfg["X"], h_max=cfg["h"], order=cfg["order"])
    return Grid.for_params(params, h_max=cfg["h"], order=cfg["order"])


def meta_block(cfg: dict, grid: Optional[Grid] = None) -> dict:
    meta = {
        "config": _jsonable(cfg),
        "versions": {
            "glpulse": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
    }
    if grid is not None:
        meta["grid"] = {"X": grid.X, "n": grid.n, "order": grid.order,
                        "h": grid.h}
    return meta


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_profile(cfg):
    params = params_from_config(cfg)
    grid = grid_from_config(cfg, params)
    prof = eval_profile(params, grid.x)
    result = {
        "nu": params.nu, "L": params.L, "m": params.m,
        "R0": float(prof.R[grid.mid]),
        "r0": float(prof.r[grid.mid]),
        "sigma_norm": grid.norm(prof.sigma),
        "ode_residual_max": float(np.max(np.abs(
            ode_residual(params, grid.x)))),
        "energy_identity_max": float(np.max(np.abs(
            energy_identity_residual(params, grid.x)))),
    }
    rows = [(float(x), float(R), float(r), float(s), float(V), float(W))
            for x, R, r, s, V, W in zip(
                grid.x, prof.R, prof.r, prof.sigma, prof.V, prof.W)]
    return result, meta_block(cfg, grid), \
        ["x", "R", "r", "sigma", "V", "W"], rows


def cmd_spectrum(cfg):
    params = params_from_config(cfg)
    grid = grid_from_config(cfg, params)
    prof = eval_profile(params, grid.x)
    spec_a = low_spectrum(build_A(params, grid, prof), k=6)
    spec_b = low_spectrum(build_B(params, grid, prof), k=6)
    lam = float(spec_a.eigenvalues[0])
    mu2_b = float(spec_b.eigenvalues[1])
    L = params.L
    result = {
        "A_eigenvalues": [float(v) for v in spec_a.eigenvalues],
        "A_parities": list(spec_a.parities),
        "B_eigenvalues": [float(v) for v in spec_b.eigenvalues],
        "B_parities": list(spec_b.parities),
        "lambda": lam,
        "lambda_over_nu": lam / params.nu,
        "mu2_B": mu2_b,
        "mu2_over_asymptotic": mu2_b / (params.m * math.pi ** 2 / (4 * L * L)),
        "essential_floor": params.m,
    }
    rows = [(i, float(a), p)
            for i, (a, p) in enumerate(zip(spec_a.eigenvalues,
                                           spec_a.parities))]
    return result, meta_block(cfg, grid), ["index", "A_eigenvalue",
                                           "parity"], rows


def cmd_phase(cfg):
    params = params_from_config(cfg)
    grid = grid_from_config(cfg, params)
    prof = eval_profile(params, grid.x)
    ph = solve_phase(params, grid, prof=prof)
    L = params.L
    i_L = grid.mid + int(round(L / grid.h))
    result = {
        "theta": ph.theta,
        "theta_asymptotic": theta_asymptotic(params),
        "theta1": ph.theta1,
        "theta1_asymptotic": theta1_asymptotic(params),
        "phi_0": float(ph.phi[grid.mid]),
        "phi_L": float(ph.phi[i_L]),
        "phi_prime_L": float(ph.phi_prime[i_L]),
        "q_max": float(np.max(np.abs(ph.q))),
    }
    rows = [(float(x), float(q), float(f), float(fp), int(mk))
            for x, q, f, fp, mk in zip(grid.x, ph.q, ph.phi, ph.phi_prime,
                                       ph.mask)]
    return result, meta_block(cfg, grid), \
        ["x", "q", "phi", "phi_prime", "mask"], rows


def cmd_pulse(cfg):
    params = params_from_config(cfg)
    grid = grid_from_config(cfg, params)
    state = solve_pulse(params, grid=grid, certify=cfg["certify"],
                        tol=cfg["tol"], p_exponent=cfg["p_exponent"])
    cert = state.certificate
    result = {
        "nu": params.nu, "L": params.L, "y": params.y,
        "eps": state.eps, "alpha": state.alpha,
        "tau": state.tau, "omega": state.omega,
        "eps_flat": state.eps_flat_value,
        "kappa": params.kappa,
        "a_coefficients": [float(a) for a in state.a_coeffs],
        "residual_norm": state.residual_norm,
        "corrected": state.corrected,
        "certificate": _jsonable(dataclasses.asdict(cert))
        if cert is not None else None,
    }
    rows = [(float(x), float(xi), float(eta))
            for x, xi, eta in zip(grid.x, state.xi, state.eta)]
    return result, meta_block(cfg, grid), ["x", "xi", "eta"], rows


def cmd_stability(cfg):
    from . import stability as stab
    params = params_from_config(cfg)
    grid = grid_from_config(cfg, params)
    state = solve_pulse(params, grid=grid, certify=cfg["certify"],
                        tol=cfg["tol"], p_exponent=cfg["p_exponent"])
    sub = stab.restrict_state(state)
    lin = stab.assemble_D(sub)
    report = stab.small_spectrum_D(lin)
    exp = stab.m11_expansion_check(sub, m11=report.m11)
    result = {
        "report": report.as_dict(),
        "expansion": exp.as_dict(),
        "decomposition_residual": lin.decomposition_residual(),
    }
    rows = [(i, z.real, z.imag) for i, z in
            enumerate(report.eigenvalues_small)]
    return result, meta_block(cfg, grid), \
        ["index", "eigenvalue_re", "eigenvalue_im"], rows


ALPHA_C_COLUMNS = ["L", "nu", "y_c", "alpha_c_measured", "alpha_c_formula",
                   "normalized_gap"]


def _alpha_c_row(res) -> list:
    gap = ((1.0 - 2.0 * res.alpha_c / math.sqrt(res.nu))
           * 48.0 * res.L ** 2 / math.pi ** 2)
    return [res.L, res.nu, res.y_c, res.alpha_c, res.alpha_c_formula, gap]


def cmd_alpha_c(cfg):
    from . import stability as stab
    params = params_from_config(cfg)
    res = stab.find_alpha_c(params, certify=cfg["certify"],
                            p_exponent=cfg["p_exponent"])
    d = res.as_dict()
    d["normalized_gap"] = _alpha_c_row(res)[-1]
    return d, meta_block(cfg), ALPHA_C_COLUMNS, [_alpha_c_row(res)]


def cmd_chi(cfg):
    from .stability import chi_criterion
    mu = (0.0, cfg["mu1"], cfg["mu2"], cfg["mu3"])
    res = chi_criterion(mu)
    L_ref = cfg["L"] if cfg["L"] is not None else 4.0
    result = {
        "mu": list(mu),
        "chi": res.chi,
        "stabilizes": res.chi > 0,
        "nu_c_ratio_at_L": {"L": L_ref, "ratio": res.nu_c_ratio(L_ref)},
    }
    return result, meta_block(cfg), ["mu2", "mu3", "chi"], \
        [[cfg["mu2"], cfg["mu3"], res.chi]]


def cmd_evolve(cfg):
    from .evolution import stabilization_experiment
    from .stability import m11_of_state
    params = params_from_config(cfg)
    # Evolve the family point the other commands report: solve the pulse
    # first so the experiment runs at its alpha = sqrt(eps(y)), not eps=0.
    pulse = solve_pulse(params, certify=cfg["certify"])
    res = stabilization_experiment(pulse.params_solved(),
                                   perturbation_size=cfg["delta"],
                                   T=cfg["T"], dt=cfg["dt"],
                                   pulse=pulse, m11=m11_of_state(pulse))
    rows = [(float(t), float(d), float(a), float(w))
            for t, d, a, w in zip(res.times, res.distances, res.amp_max,
                                  res.half_width)]
    return res.as_dict(), meta_block(cfg), \
        ["t", "distance", "amp_max", "half_width"], rows


def cmd_kink(cfg):
    from .evolution import kink_speed_experiment
    if cfg["nu"] is None:
        raise ConfigError("kink requires --nu")
    alpha = cfg["alpha"] if cfg["alpha"] is not None else 0.0
    T = cfg["T"] if cfg["T"] != DEFAULTS["T"] else 400.0
    dt = cfg["dt"] if cfg["dt"] != DEFAULTS["dt"] else 0.05
    res = kink_speed_experiment(cfg["nu"], alpha, T=T, dt=dt)
    kq = kink_quantities(cfg["nu"], alpha)
    d = res.as_dict()
    d["omega_plus"] = kq.omega_plus
    rows = [(float(t), float(p)) for t, p in zip(res.times, res.positions)]
    return d, meta_block(cfg), ["t", "front_position"], rows


SWEEPABLE = {"nu", "L", "y", "alpha", "mu1", "mu2", "mu3", "T", "dt"}


def cmd_sweep(cfg):
    import concurrent.futures as cf

    if not cfg["sweep_command"]:
        raise ConfigError("sweep requires --sweep-command")
    if not cfg["grid_json"]:
        raise ConfigError("sweep requires --grid-json")
    try:
        axes = json.loads(cfg["grid_json"])
    except json.JSONDecodeError as exc:
        raise ConfigError(f"bad --grid-json: {exc}")
    if not isinstance(axes, dict) or not axes:
        raise ConfigError("empty grid")
    unknown = set(axes) - SWEEPABLE
    if unknown:
        raise ConfigError(f"cannot sweep over {sorted(unknown)}")
    names = sorted(axes)
    lists = [axes[n] if isinstance(axes[n], list) else [axes[n]]
             for n in names]
    if any(len(v) == 0 for v in lists):
        raise ConfigError("empty grid")
    points = [[]]
    for vals in lists:
        points = [p + [v] for p in points for v in vals]

    runner = _COMMANDS[cfg["sweep_command"]]

    def run_point(values):
        sub = dict(cfg)
        sub["command"] = cfg["sweep_command"]
        for n, v in zip(names, values):
            sub[n] = v
        if "alpha" in names:
            sub["y"] = None
        if "y" in names:
            sub["alpha"] = None
        if "L" in names:
            sub["nu"] = None
        if "nu" in names:
            sub["L"] = None
        try:
            result, _, columns, rows = runner(sub)
            return {"point": dict(zip(names, values)), "status": "ok",
                    "result": result, "columns": columns,
                    "rows": [list(r) for r in rows]}
        except (ConfigError, RegimeError, NumericError) as exc:
            return {"point": dict(zip(names, values)), "status": "error",
                    "error_type": type(exc).__name__, "reason": str(exc)}

    workers = cfg["workers"] or min(4, len(points))
    if workers <= 1 or len(points) == 1:
        outcomes = [run_point(p) for p in points]
    else:
        with cf.ThreadPoolExecutor(max_workers=workers) as ex:
            outcomes = list(ex.map(run_point, points))

    result = {"points": [_jsonable(o) for o in outcomes],
              "n_points": len(points), "axes": {n: axes[n] for n in names}}
    columns = names + ["status"]
    rows = []
    single_row = all(o.get("rows") is None or len(o.get("rows", [])) == 1
                     for o in outcomes if o["status"] == "ok")
    extra_cols: list = []
    keep_idx: list = []
    for o in outcomes:
        if o["status"] == "ok" and single_row and o.get("rows"):
            if not extra_cols:
                keep_idx = [i for i, c in enumerate(o["columns"])
                            if c not in names]
                extra_cols = [o["columns"][i] for i in keep_idx]
            rows.append([o["point"][n] for n in names] + ["ok"]
                        + [o["rows"][0][i] for i in keep_idx])
        else:
            rows.append([o["point"][n] for n in names] + [o["status"]])
    if extra_cols:
        columns = names + ["status"] + extra_cols
    return result, meta_block(cfg), columns, rows


_COMMANDS = {
    "profile": cmd_profile,
    "spectrum": cmd_spectrum,
    "phase": cmd_phase,
    "pulse": cmd_pulse,
    "stability": cmd_stability,
    "alpha-c": cmd_alpha_c,
    "chi": cmd_chi,
    "evolve": cmd_evolve,
    "kink": cmd_kink,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out_path = args.out
    csv_path = args.csv_path

    def emit(document: dict) -> None:
        text = emit_json(document)
        if out_path:
            with open(out_path, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)

    try:
        cfg = resolve_config(args)
        result, meta, columns, rows = _COMMANDS[args.command](cfg)
        document = {"status": "ok", "command": args.command,
                    "result": _jsonable(result), "meta": meta}
        emit(document)
        if csv_path:
            write_csv(csv_path, columns, rows)
        return EXIT_OK
    except ConfigError as exc:
        emit({"status": "error", "error_type": "ConfigError",
              "reason": str(exc), "exit_code": EXIT_CONFIG})
        return EXIT_CONFIG
    except RegimeError as exc:
        emit({"status": "error", "error_type": "RegimeError",
              "reason": str(exc), "exit_code": EXIT_REGIME})
        return EXIT_REGIME
    except NumericError as exc:
        emit({"status": "error", "error_type": "NumericError",
              "reason": str(exc), "exit_code": EXIT_NUMERIC})
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
