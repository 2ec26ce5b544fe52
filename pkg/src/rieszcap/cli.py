"""Command-line front end: scenario files in, CSV/JSON artifacts out.

One scenario JSON per invocation; outputs are deterministic (17 significant
digits, fixed key order, no timestamps) so reruns are byte-identical.

Scenario schema::

    {
      "name": "fig1_below",                  # basename for output files
      "task": "density" | "potential" | "phi-curve" | "solve-support"
              | "verify" | "particles" | "newton-distance",
      "d": 2,
      "kernel": {"type": "riesz", "s": 0.5} | {"type": "log"},
      "field":  {"type": "point", "q": 1.0, "R": 1.5}
              | {"type": "axis", "atoms": [[R1, m1], [R2, m2], ...]},
      "cap":    {"mode": "solve"}            # use the solved support height
              | {"mode": "fixed", "value": 0.2}
              | {"mode": "offset", "value": -0.2},   # relative to solved t0
      "grid": 200,          # curve resolution / verification grid
      "tol": 1e-5,          # verification tolerance
      "seed": 0, "n": 800, "iters": 2500,    # particles task
      "newton_d": 2                          # newton-distance task
    }

Curve tasks write ``<name>_potential.csv`` (xi, weighted potential, F) and
``<name>_density.csv`` (u, density, boundary_coeff); scalar tasks write
``<name>.json``.  Exit codes: 0 success, 2 malformed scenario, 3 numeric
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from rieszcap import axis_field, cap_exceptional, cap_riesz, oracle, point_field
from rieszcap.axis_field import AxisMeasure
from rieszcap.point_field import PointCharge
from rieszcap.specfun import ConvergenceError
from rieszcap.sphere import Params

__all__ = ["main", "run_scenario", "ScenarioError"]

_TASKS = ("density", "potential", "phi-curve", "solve-support", "verify",
          "particles", "newton-distance")


class ScenarioError(ValueError):
    """Malformed scenario configuration."""


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _parse_params(cfg: dict) -> Params:
    try:
        d = int(cfg["d"])
        kernel = cfg["kernel"]
        ktype = kernel["type"]
    except (KeyError, TypeError) as exc:
        raise ScenarioError(f"missing or malformed d/kernel: {exc}") from exc
    if ktype == "riesz":
        try:
            return Params(d=d, s=float(kernel["s"]))
        except (KeyError, ValueError) as exc:
            raise ScenarioError(f"bad riesz kernel: {exc}") from exc
    if ktype == "log":
        try:
            return Params(d=d, log=True)
        except ValueError as exc:
            raise ScenarioError(f"bad log kernel: {exc}") from exc
    raise ScenarioError(f"unknown kernel type {ktype!r}")


def _parse_field(cfg: dict):
    try:
        fcfg = cfg["field"]
        ftype = fcfg["type"]
    except (KeyError, TypeError) as exc:
        raise ScenarioError(f"missing or malformed field: {exc}") from exc
    try:
        if ftype == "point":
            return PointCharge(q=float(fcfg["q"]), R=float(fcfg["R"]))
        if ftype == "axis":
            return AxisMeasure([(float(R), float(m)) for R, m in fcfg["atoms"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"bad field: {exc}") from exc
    raise ScenarioError(f"unknown field type {ftype!r}")


def _solve(field, params: Params):
    if isinstance(field, AxisMeasure):
        return axis_field.axis_solve_t(field, params)
    if params.is_log:
        return cap_exceptional.log_solve_t0(field)
    if params.is_exceptional:
        return cap_exceptional.solve_t0_exceptional(field, params)
    return cap_riesz.solve_t0(field, params)


def _cap_height(cfg: dict, field, params: Params) -> tuple[float, object]:
    cap = cfg.get("cap", {"mode": "solve"})
    mode = cap.get("mode", "solve")
    sol = None
    if mode == "fixed":
        t = float(cap["value"])
    elif mode == "solve":
        sol = _solve(field, params)
        t = sol.t0
    elif mode == "offset":
        sol = _solve(field, params)
        t = sol.t0 + float(cap["value"])
    else:
        raise ScenarioError(f"unknown cap mode {cap.get('mode')!r}")
    if not -1.0 < t <= 1.0:
        raise ScenarioError(f"cap height {t} outside (-1, 1]")
    return t, sol


def _signed_measure_at(t: float, field, params: Params):
    """The signed cap equilibrium at an arbitrary height t (not just t0)."""
    if isinstance(field, AxisMeasure):
        atoms = field.atoms
    else:
        atoms = ((field.R, field.q),)
    if params.is_log:
        if isinstance(field, AxisMeasure):
            raise ScenarioError("log curve tasks take a point field "
                                "(axis log curves: use solve-support)")
        m = cap_exceptional.log_etabar(t, field)
        f_val = cap_exceptional.log_f0_functional(t, field)
        return m.interior_density, m.boundary_coeff, f_val
    if params.is_exceptional:
        if isinstance(field, AxisMeasure):
            raise ScenarioError("exceptional-case curves take a point field")
        m = cap_exceptional.etabar(t, field, params)
        return m.interior_density, m.boundary_coeff, cap_exceptional.phibar(t, field, params)
    if isinstance(field, AxisMeasure):
        raise ScenarioError("generic-cap curves take a point field")
    density = lambda u: cap_riesz.eta_density(u, t, field, params)
    return density, 0.0, cap_riesz.phi(t, field, params)


def _weighted_potential_at(xi: float, t: float, field, params: Params) -> float:
    if params.is_log:
        return cap_exceptional.log_weighted_potential(xi, t, field)
    if params.is_exceptional:
        m = cap_exceptional.etabar(t, field, params)
        return (oracle.potential_of(m, xi, params)
                + float(oracle.external_field(xi, field, params)))
    return cap_riesz.weighted_potential(xi, t, field, params)


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _task_density(cfg, field, params, out_dir: Path, name: str) -> dict:
    t, _ = _cap_height(cfg, field, params)
    density, bcoef, f_val = _signed_measure_at(t, field, params)
    n = int(cfg.get("grid", 200))
    us = np.linspace(-1.0 + 1e-9, t - 1e-9, n)
    rows = [(u, float(density(float(u))), bcoef) for u in us]
    _write_csv(out_dir / f"{name}_density.csv", ["u", "density", "boundary_coeff"], rows)
    return {"t": t, "F": f_val, "boundary_coeff": bcoef,
            "files": [f"{name}_density.csv"]}


def _task_potential(cfg, field, params, out_dir: Path, name: str) -> dict:
    t, _ = _cap_height(cfg, field, params)
    density, bcoef, f_val = _signed_measure_at(t, field, params)
    n = int(cfg.get("grid", 200))
    xis = np.linspace(-1.0 + 1e-6, 1.0 - 1e-9, n)
    pot_rows = [(xi, _weighted_potential_at(float(xi), t, field, params), f_val)
                for xi in xis]
    _write_csv(out_dir / f"{name}_potential.csv",
               ["xi", "weighted_potential", "F"], pot_rows)
    us = np.linspace(-1.0 + 1e-9, t - 1e-9, n)
    dens_rows = [(u, float(density(float(u))), bcoef) for u in us]
    _write_csv(out_dir / f"{name}_density.csv", ["u", "density", "boundary_coeff"],
               dens_rows)
    return {"t": t, "F": f_val, "boundary_coeff": bcoef,
            "files": [f"{name}_potential.csv", f"{name}_density.csv"]}


def _task_phi_curve(cfg, field, params, out_dir: Path, name: str) -> dict:
    if isinstance(field, AxisMeasure):
        raise ScenarioError("phi-curve takes a point field")
    n = int(cfg.get("grid", 200))
    ts = np.linspace(-0.999, 1.0, n)
    if params.is_log:
        rows = [(t, cap_exceptional.log_f0_functional(float(t), field)) for t in ts]
        header = ["t", "F0"]
    elif params.is_exceptional:
        rows = [(t, cap_exceptional.phibar(float(t), field, params)) for t in ts]
        header = ["t", "phibar"]
    else:
        rows = [(t, cap_riesz.phi(float(t), field, params)) for t in ts]
        header = ["t", "phi"]
    _write_csv(out_dir / f"{name}_phi.csv", header, rows)
    return {"files": [f"{name}_phi.csv"]}


def _task_solve_support(cfg, field, params, out_dir: Path, name: str) -> dict:
    sol = _solve(field, params)
    n = int(cfg.get("grid", 50))
    us = np.linspace(-1.0 + 1e-9, sol.t0 - 1e-9, n)
    samples = [[float(u), float(sol.equilibrium.radial_density(float(u)))] for u in us]
    payload = {
        "t0": sol.t0,
        "phi_at_t0": sol.phi_at_t0,
        "solved_by": sol.solved_by,
        "mass": sol.equilibrium.mass,
        "boundary_coeff": sol.equilibrium.boundary_coeff,
        "density_samples": samples,
    }
    _write_json(out_dir / f"{name}.json", payload)
    return {"t0": sol.t0, "files": [f"{name}.json"]}


def _task_verify(cfg, field, params, out_dir: Path, name: str) -> dict:
    sol = _solve(field, params)
    tol = float(cfg.get("tol", 1e-5))
    grid = int(cfg.get("grid", 41))
    report = oracle.check_variational(sol, params, grid_size=grid)
    passed = (report.max_violation_on_support <= tol
              and report.min_margin_off_support >= -tol
              and report.min_density >= -tol)
    payload = {
        "t0": sol.t0,
        "F_estimate": report.F_estimate,
        "max_violation_on_support": report.max_violation_on_support,
        "min_margin_off_support": report.min_margin_off_support,
        "min_density": report.min_density,
        "tolerance": tol,
        "passed": bool(passed),
    }
    _write_json(out_dir / f"{name}.json", payload)
    return {"passed": passed, "files": [f"{name}.json"]}


def _task_particles(cfg, field, params, out_dir: Path, name: str) -> dict:
    n = int(cfg.get("n", 800))
    iters = int(cfg.get("iters", 2000))
    seed = int(cfg.get("seed", 0))
    system = oracle.minimize_particles(n, params, field, seed=seed, iters=iters)
    est = oracle.empirical_support_height(system)
    rows = [(h,) for h in np.sort(system.heights)]
    _write_csv(out_dir / f"{name}_heights.csv", ["height"], rows)
    payload = {
        "n": n, "iters": iters, "seed": seed,
        "empirical_support_height": est,
        "final_energy": system.energies[-1],
        "energy_monotone": bool(np.all(np.diff(np.asarray(system.energies)) <= 0.0)),
    }
    _write_json(out_dir / f"{name}.json", payload)
    return {"empirical_support_height": est,
            "files": [f"{name}.json", f"{name}_heights.csv"]}


def _task_newton_distance(cfg, out_dir: Path, name: str) -> dict:
    d = int(cfg.get("newton_d", cfg.get("d", 2)))
    rho = point_field.gonchar_root(d)
    residual = point_field.gonchar_polynomial(d, rho)
    payload = {"d": d, "rho_plus": rho, "polynomial_residual": residual}
    if out_dir is not None:
        _write_json(out_dir / f"{name}.json", payload)
    return payload


def run_scenario(cfg: dict, out_dir: Path) -> dict:
    """Execute one scenario dict; returns a small result summary."""
    if not isinstance(cfg, dict):
        raise ScenarioError("scenario must be a JSON object")
    task = cfg.get("task")
    if task not in _TASKS:
        raise ScenarioError(f"unknown task {task!r}; expected one of {_TASKS}")
    name = str(cfg.get("name", "scenario"))
    out_dir.mkdir(parents=True, exist_ok=True)
    if task == "newton-distance":
        return _task_newton_distance(cfg, out_dir, name)
    params = _parse_params(cfg)
    field = _parse_field(cfg)
    if task == "density":
        return _task_density(cfg, field, params, out_dir, name)
    if task == "potential":
        return _task_potential(cfg, field, params, out_dir, name)
    if task == "phi-curve":
        return _task_phi_curve(cfg, field, params, out_dir, name)
    if task == "solve-support":
        return _task_solve_support(cfg, field, params, out_dir, name)
    if task == "verify":
        return _task_verify(cfg, field, params, out_dir, name)
    if task == "particles":
        return _task_particles(cfg, field, params, out_dir, name)
    raise ScenarioError(f"unhandled task {task!r}")  # unreachable


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="rieszcap",
        description="equilibrium measures on spheres under axis external fields")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a scenario JSON file")
    p_run.add_argument("scenario", type=Path)
    p_run.add_argument("--out", type=Path, default=None,
                       help="output directory (default: alongside the scenario)")
    p_run.add_argument("--tol", type=float, default=None, help="override tolerance")
    p_run.add_argument("--grid", type=int, default=None, help="override grid size")
    p_run.add_argument("--seed", type=int, default=None, help="override RNG seed")

    p_newton = sub.add_parser("newton-distance",
                              help="critical charge distance for s = d-1, q = 1")
    p_newton.add_argument("--d", type=int, required=True)
    p_newton.add_argument("--out", type=Path, default=None)

    args = parser.parse_args(argv)

    try:
        if args.command == "newton-distance":
            payload = {"d": args.d,
                       "rho_plus": point_field.gonchar_root(args.d),
                       "polynomial_residual": point_field.gonchar_polynomial(
                           args.d, point_field.gonchar_root(args.d))}
            if args.out is not None:
                args.out.mkdir(parents=True, exist_ok=True)
                _write_json(args.out / f"newton_distance_d{args.d}.json", payload)
            print(f"rho_plus(d={args.d}) = {_fmt(payload['rho_plus'])} "
                  f"(residual {_fmt(payload['polynomial_residual'])})")
            return 0

        try:
            cfg = json.loads(args.scenario.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ScenarioError(f"cannot read scenario: {exc}") from exc
        for key, val in (("tol", args.tol), ("grid", args.grid), ("seed", args.seed)):
            if val is not None:
                cfg[key] = val
        out_dir = args.out if args.out is not None else args.scenario.parent
        summary = run_scenario(cfg, out_dir)
        print(json.dumps(summary, sort_keys=True, default=str))
        return 0
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, ValueError, RuntimeError, OverflowError) as exc:
        print(f"numeric-failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
