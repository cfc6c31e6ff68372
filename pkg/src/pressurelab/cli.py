"""Command-line entry point: config-driven runs with JSON/CSV/SVG outputs.

Exit codes: 0 success, 2 configuration error, 3 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import sys

import numpy as np

from . import rotations, studies, svgplot
from .config import ConfigError, RunContext, load_config
from .linear_solver import SolverError, assemble_linear_system, solve_linearized
from .material import wrap_angle
from .studies import StudyReport, extract_rotation, multistart_minimize, rescaled_displacement

COMMANDS = ("scan-rotations", "solve-linear", "solve-nonlinear",
            "gamma-study", "refined-study", "lambda-study", "selftest")


def _emit_json(path: str | None, command: str, ctx: RunContext, result: dict,
               threads: int = 0) -> None:
    if path is None:
        return
    doc = {
        "schema": "pressurelab/run-v1",
        "command": command,
        "config": ctx.config,
        "config_hash": ctx.hash,
        "meta": {
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "threads_requested": int(threads),
        },
        "result": result,
    }
    validate_result(doc)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1)
        fh.write("\n")


def _emit_csv(path: str | None, columns: list[str], rows: list[dict]) -> None:
    if path is None:
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def validate_result(doc: dict) -> None:
    """Structural re-validation of an emitted run document."""
    from .config import validate_config

    for key in ("schema", "command", "config", "config_hash", "meta", "result"):
        if key not in doc:
            raise ConfigError(f"missing key {key}")
    if doc["schema"] != "pressurelab/run-v1":
        raise ConfigError("unknown result schema")
    if doc["command"] not in COMMANDS:
        raise ConfigError("unknown command in result")
    validate_config(doc["config"])


def _scan_rotations(ctx: RunContext, args) -> dict:
    grid = int(args.grid) if args.grid else ctx.rotation_grid
    mesh = ctx.mesh()
    pi = ctx.pressure
    alphas = 2.0 * np.pi * np.arange(grid) / grid
    values = rotations.rotation_functional_profile(mesh, pi, alphas)
    residuals = np.array([rotations.el_residual(mesh, pi, a) for a in alphas])
    if pi.is_smooth:
        second = np.array([rotations.second_variation(mesh, pi, a, 1.0) for a in alphas])
    else:
        second = np.full(grid, np.nan)
    optimal = rotations.find_optimal_rotations(mesh, pi, grid_n=grid)
    rows = [
        {"alpha": float(a), "functional_value": float(v), "el_residual": float(r),
         "second_variation_unit": float(s)}
        for a, v, r, s in zip(alphas, values, residuals, second)
    ]
    _emit_csv(args.csv, ["alpha", "functional_value", "el_residual", "second_variation_unit"], rows)
    if args.svg:
        svgplot.polar_chart(args.svg, alphas, values, title="rotation functional")
    return {
        "grid": grid,
        "rows": rows,
        "optimal": {
            "angles": list(optimal.angles),
            "arcs": [list(a) for a in optimal.arcs],
            "min_value": optimal.min_value,
            "value_tolerance": optimal.value_tolerance,
            "grid_step": optimal.grid_step,
        },
    }


def _solve_linear(ctx: RunContext, args) -> dict:
    mesh = ctx.mesh()
    pi = ctx.pressure
    if args.alpha0 in (None, "auto"):
        optimal = rotations.find_optimal_rotations(mesh, pi, grid_n=ctx.rotation_grid)
        candidates = optimal.sample_angles(per_arc=ctx.arc_samples)
        best = None
        for a0 in candidates:
            system = assemble_linear_system(mesh, ctx.material, pi, a0)
            disp, e0 = solve_linearized(system)
            if best is None or e0 < best[1]:
                best = (a0, e0, disp, system)
        alpha0, e0, disp, system = best
    else:
        alpha0 = wrap_angle(float(args.alpha0))
        system = assemble_linear_system(mesh, ctx.material, pi, alpha0)
        disp, e0 = solve_linearized(system)
    return {
        "alpha0": float(alpha0),
        "E0": float(e0),
        "rotation_load_component": float(system.rotation_load_component),
        "gauge": disp.gauge,
        "u_nodal": disp.values.tolist(),
    }


def _solve_nonlinear(ctx: RunContext, args) -> dict:
    mesh = ctx.mesh()
    eps = float(args.eps) if args.eps else ctx.eps_list[0]
    fld, diag, table = multistart_minimize(
        mesh, ctx.material, ctx.pressure_extended, eps, ctx.solver_options, ctx.seed)
    alpha = extract_rotation(mesh, ctx.material, fld.values)
    u = rescaled_displacement(mesh, fld.values, alpha, eps)
    return {
        "eps": eps,
        "energy": diag.energy,
        "energy_over_eps2": diag.energy / eps ** 2,
        "diagnostics": {
            "grad_norm": diag.grad_norm, "iterations": diag.iterations,
            "backtracks": diag.backtracks,
            "admissibility_rejections": diag.admissibility_rejections,
            "converged": diag.converged, "stop_reason": diag.stop_reason,
        },
        "starts": table,
        "alpha_extracted": alpha,
        "y_nodal": fld.values.tolist(),
        "u_nodal": u.tolist(),
    }


def _run_study(ctx: RunContext, kind: str) -> StudyReport:
    merged = StudyReport(kind=kind, config_hash=ctx.hash)
    for res in ctx.study_resolutions:
        mesh = ctx.mesh(res)
        common = dict(
            mesh=mesh, material=ctx.material, pi=ctx.pressure, pi_hat=ctx.pressure_extended,
            eps_list=ctx.eps_list, options=ctx.solver_options, seed=ctx.seed,
            rotation_grid=ctx.rotation_grid, config_hash=ctx.hash, resolution=res,
        )
        if kind == "gamma":
            rep = studies.gamma_study(arc_samples=ctx.arc_samples, store_fields=False, **common)
        elif kind == "refined":
            rep = studies.refined_study(**common)
        else:
            rep = studies.almost_minimizer_scaling(exponent=ctx.lambda_exponent, **common)
        merged.rows.extend(rep.rows)
        merged.limits[str(res)] = rep.limits
    return merged


def _study_command(ctx: RunContext, args, kind: str) -> dict:
    report = _run_study(ctx, kind)
    rows = [{k: v for k, v in row.items() if not isinstance(v, (list, dict))} for row in report.rows]
    columns = [c for c in report.column_order()
               if all(not isinstance(r.get(c), (list, dict)) for r in report.rows)]
    _emit_csv(args.csv, columns, rows)
    if args.svg and kind == "gamma":
        eps = sorted({row["eps"] for row in report.rows}, reverse=True)
        series = {}
        for res in ctx.study_resolutions:
            vals = [r["energy_over_eps2"] for r in report.rows if r["resolution"] == res]
            series[f"res {res}"] = vals
            series[f"limit {res}"] = [report.limits[str(res)]["min_E0"]] * len(eps)
        svgplot.line_chart(args.svg, eps, series, title="rescaled minima vs limit",
                           xlabel="eps", ylabel="E/eps^2", logx=True)
    elif args.svg:
        eps = [row["eps"] for row in report.rows]
        key = "offset_scaled" if kind == "refined" else "remainder_over_target"
        svgplot.line_chart(args.svg, eps, {key: [row[key] for row in report.rows]},
                           title=f"{kind} study", xlabel="eps", ylabel=key, logx=True)
    return report.to_json_dict(include_fields=False)


def _selftest(ctx: RunContext, args) -> dict:
    from .selftest import run_selftest

    good, lines = run_selftest()
    for line in lines:
        print(line)
    if not good:
        raise SolverError("selftest failed")
    return {"checks": lines, "passed": True}


def run(command: str, config_path: str, *, out: str | None = None, csv_path: str | None = None,
        svg: str | None = None, grid: int | None = None, eps: float | None = None,
        alpha0: str | None = None, threads: int = 0, seed: int | None = None) -> int:
    """Programmatic equivalent of the command line; returns the exit status."""
    ns = argparse.Namespace(out=out, csv=csv_path, svg=svg, grid=grid, eps=eps,
                            alpha0=alpha0, threads=threads, seed=seed)
    return _dispatch(command, config_path, ns)


def _dispatch(command: str, config_path: str, args) -> int:
    try:
        cfg = load_config(config_path)
        if getattr(args, "seed", None) is not None:
            cfg["seed"] = int(args.seed)
        ctx = RunContext.from_config(cfg)
        paths = cfg.get("output", {}) or {}
        if getattr(args, "out", None) is None:
            args.out = paths.get("json")
        if getattr(args, "csv", None) is None:
            args.csv = paths.get("csv")
        if getattr(args, "svg", None) is None:
            args.svg = paths.get("svg")
        if command == "scan-rotations":
            result = _scan_rotations(ctx, args)
        elif command == "solve-linear":
            result = _solve_linear(ctx, args)
        elif command == "solve-nonlinear":
            result = _solve_nonlinear(ctx, args)
        elif command == "gamma-study":
            result = _study_command(ctx, args, "gamma")
        elif command == "refined-study":
            result = _study_command(ctx, args, "refined")
        elif command == "lambda-study":
            result = _study_command(ctx, args, "lambda")
        elif command == "selftest":
            result = _selftest(ctx, args)
        else:
            print(f"error: unknown command {command!r}", file=sys.stderr)
            return 2
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (SolverError, ValueError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3
    _emit_json(getattr(args, "out", None), command, ctx, result,
               threads=getattr(args, "threads", 0) or 0)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="pressurelab",
                                     description="pressure-loaded planar elasticity laboratory")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=None)
        p.add_argument("--csv", default=None)
        p.add_argument("--svg", default=None)
        p.add_argument("--threads", type=int, default=0)
        p.add_argument("--seed", type=int, default=None)
        if name == "scan-rotations":
            p.add_argument("--grid", type=int, default=None)
        else:
            p.set_defaults(grid=None)
        if name == "solve-nonlinear":
            p.add_argument("--eps", type=float, default=None)
        else:
            p.set_defaults(eps=None)
        if name == "solve-linear":
            p.add_argument("--alpha0", default="auto")
        else:
            p.set_defaults(alpha0=None)
    args = parser.parse_args(argv)
    return _dispatch(args.command, args.config, args)


if __name__ == "__main__":
    sys.exit(main())
