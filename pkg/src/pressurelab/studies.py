"""Extraction of (rotation, displacement) pairs from finite-strain minimizers
and the epsilon-sweep studies: limit of rescaled minima, refined rotational
fluctuations, and the slow-rotation almost-minimizer construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import TriMesh
from .material import MaterialModel, g_mixed, rotation, wrap_angle
from .nonlinear_solver import (
    DeformationField,
    SolveDiagnostics,
    StiffnessPreconditioner,
    assemble_energy,
    det_deviation_sq,
    deformation_gradients,
    gp_gradient_integral,
    minimize_energy,
    rigid_start,
    zero_average,
)
from .linear_solver import apply_gauge, assemble_linear_system, solve_linearized
from .pressure import PressureField
from .rotations import OptimalSet, find_optimal_rotations, golden_section_min, rotation_functional, second_variation

TWO_PI = 2.0 * math.pi


@dataclass
class StudyReport:
    kind: str
    config_hash: str
    rows: list[dict] = field(default_factory=list)
    limits: dict = field(default_factory=dict)
    fields: dict = field(default_factory=dict)  # nodal arrays keyed by row label; JSON only
    meta: dict = field(default_factory=dict)

    def to_json_dict(self, include_fields: bool = True) -> dict:
        out = {
            "kind": self.kind,
            "config_hash": self.config_hash,
            "rows": self.rows,
            "limits": self.limits,
            "meta": self.meta,
        }
        if include_fields:
            out["fields"] = {k: np.asarray(v).tolist() for k, v in self.fields.items()}
        return out

    def column_order(self) -> list[str]:
        cols: list[str] = []
        for row in self.rows:
            for k in row:
                if k not in cols:
                    cols.append(k)
        return cols


# ---------------------------------------------------------------------------
# rotation extraction and displacement rescaling


def extract_rotation(mesh: TriMesh, material: MaterialModel, y: np.ndarray,
                     grid_n: int = 720, refine_tol: float = 1e-12) -> float:
    """Angle minimizing the area-weighted mixed penalty of grad y minus a rotation.

    Grid scan plus golden-section refinement; deterministic.
    """
    F, _ = deformation_gradients(mesh, y)
    a = F[:, 0, 0] + F[:, 1, 1]
    b = F[:, 1, 0] - F[:, 0, 1]
    norm_sq = np.einsum("tij,tij->t", F, F)
    areas = mesh.areas

    def objective(alpha):
        dist_sq = np.maximum(norm_sq + 2.0 - 2.0 * (a * np.cos(alpha) + b * np.sin(alpha)), 0.0)
        return float(areas @ g_mixed(np.sqrt(dist_sq), material.p))

    alphas = TWO_PI * np.arange(grid_n) / grid_n
    vals = np.array([objective(x) for x in alphas])
    i = int(np.argmin(vals))
    lo = alphas[i] - TWO_PI / grid_n
    hi = alphas[i] + TWO_PI / grid_n
    a_star, _ = golden_section_min(objective, lo, hi, tol=refine_tol)
    return wrap_angle(a_star)


def extract_rotation_l2(mesh: TriMesh, y: np.ndarray) -> float:
    """Closed-form angle of the area-weighted least-squares rotation fit."""
    F, _ = deformation_gradients(mesh, y)
    a = float(mesh.areas @ (F[:, 0, 0] + F[:, 1, 1]))
    b = float(mesh.areas @ (F[:, 1, 0] - F[:, 0, 1]))
    return wrap_angle(math.atan2(b, a))


def rescaled_displacement(mesh: TriMesh, y: np.ndarray, alpha: float, eps: float) -> np.ndarray:
    """u = (R^{-alpha} y - x)/eps, zero-averaged."""
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    u = (np.asarray(y, dtype=float) @ rotation(-alpha).T - mesh.nodes) / eps
    return zero_average(mesh, u)


def rebuild_deformation(mesh: TriMesh, u: np.ndarray, alpha: float, eps: float) -> np.ndarray:
    """Inverse of `rescaled_displacement`: y = R^alpha (x + eps u)."""
    return (mesh.nodes + eps * np.asarray(u, dtype=float)) @ rotation(alpha).T


def w1p_norm(mesh: TriMesh, u: np.ndarray, p: float) -> float:
    """Discrete Sobolev norm: lumped-mass |u|^p plus per-triangle |grad u|^p."""
    u = np.asarray(u, dtype=float)
    mag = np.hypot(u[:, 0], u[:, 1])
    val = float(mesh.node_masses @ mag ** p)
    G, _ = deformation_gradients(mesh, u)
    gm = np.sqrt(np.einsum("tij,tij->t", G, G))
    val += float(mesh.areas @ gm ** p)
    return val ** (1.0 / p)


# ---------------------------------------------------------------------------
# solver orchestration shared by the studies


@dataclass
class SolverOptions:
    grad_tol: float = 1e-9
    max_iter: int = 5000
    multistart_angles: tuple[float, ...] = (0.0,)
    noise_amplitude: float | None = None  # default: 1e-3 * mesh diameter
    memory: int = 10

    @classmethod
    def from_config(cls, section: dict | None) -> "SolverOptions":
        section = section or {}
        return cls(
            grad_tol=float(section.get("grad_tol", 1e-9)),
            max_iter=int(section.get("max_iter", 5000)),
            multistart_angles=tuple(float(a) for a in section.get("multistart_angles", [0.0])),
            noise_amplitude=section.get("noise_amplitude"),
            memory=int(section.get("memory", 10)),
        )


def multistart_minimize(
    mesh: TriMesh,
    material: MaterialModel,
    pi_hat: PressureField,
    eps: float,
    options: SolverOptions,
    seed: int,
    precond: StiffnessPreconditioner | None = None,
) -> tuple[DeformationField, SolveDiagnostics, list[dict]]:
    """Run the minimizer from each configured rigid start; keep the lowest energy.

    With several starts the exploration pass runs at a capped iteration count
    and moderate tolerance to rank the basins, and only the winner is polished
    to the requested tolerance (warm-started, preconditioned in its own
    rotation frame).  Energies only ever decrease along the way.
    """
    amp = options.noise_amplitude if options.noise_amplitude is not None else 1e-3 * mesh.diameter
    if precond is None:
        precond = StiffnessPreconditioner(mesh, material)
    multi = len(options.multistart_angles) > 1
    scout_tol = max(options.grad_tol, 1e-8) if multi else options.grad_tol
    scout_iters = min(options.max_iter, 400) if multi else options.max_iter
    best: tuple[DeformationField, SolveDiagnostics] | None = None
    table: list[dict] = []
    for k, alpha in enumerate(options.multistart_angles):
        rng = np.random.default_rng([seed, int(round(eps * 1e9)), k])
        init = rigid_start(mesh, alpha, amp, rng)
        fld, diag = minimize_energy(
            mesh, material, pi_hat, eps, init,
            grad_tol=scout_tol, max_iter=scout_iters, memory=options.memory,
            precond=precond, frame_angle=alpha,
        )
        table.append({
            "start_alpha": alpha, "energy": diag.energy, "iterations": diag.iterations,
            "converged": diag.converged, "stop_reason": diag.stop_reason,
        })
        if best is None or diag.energy < best[1].energy:
            best = (fld, diag)
    assert best is not None
    fld, diag = best
    if multi or not diag.converged:
        frame = extract_rotation_l2(mesh, fld.values)
        fld, diag2 = minimize_energy(
            mesh, material, pi_hat, eps, fld.values,
            grad_tol=options.grad_tol, max_iter=options.max_iter, memory=options.memory,
            precond=precond, frame_angle=frame,
        )
        diag = SolveDiagnostics(
            energy=diag2.energy, grad_norm=diag2.grad_norm,
            iterations=diag.iterations + diag2.iterations,
            backtracks=diag.backtracks + diag2.backtracks,
            admissibility_rejections=diag.admissibility_rejections + diag2.admissibility_rejections,
            converged=diag2.converged, stop_reason=diag2.stop_reason,
        )
    return fld, diag, table


def minimize_limit_energy(
    mesh: TriMesh,
    material: MaterialModel,
    pi: PressureField,
    optimal: OptimalSet,
    arc_samples: int = 5,
):
    """Linearized solves over the sampled optimal angles; returns the best.

    Returns (min_value, best_alpha0, gauged displacement, per-angle table,
    rotation load component at the best angle).
    """
    best = None
    table = []
    for alpha0 in optimal.sample_angles(per_arc=arc_samples):
        system = assemble_linear_system(mesh, material, pi, alpha0)
        disp, e0 = solve_linearized(system)
        table.append({"alpha0": alpha0, "E0": e0, "rotation_load": system.rotation_load_component})
        if best is None or e0 < best[0]:
            best = (e0, alpha0, disp.values, system.rotation_load_component)
    assert best is not None
    return best[0], best[1], best[2], table, best[3]


# ---------------------------------------------------------------------------
# the three studies


def gamma_study(
    mesh: TriMesh,
    material: MaterialModel,
    pi: PressureField,
    pi_hat: PressureField,
    eps_list: list[float],
    options: SolverOptions,
    seed: int = 0,
    rotation_grid: int = 1024,
    arc_samples: int = 5,
    config_hash: str = "",
    resolution: int | None = None,
    store_fields: bool = True,
) -> StudyReport:
    """Sweep of rescaled minima against the limit value on one mesh.

    Per eps (descending): multistart minimize, extract the rotation and the
    rescaled displacement, record the rescaled energy, the distance of the
    rotation to the optimal set, the determinant/gradient compactness
    diagnostics, and the Sobolev distance of the displacement to the limit
    minimizer.
    """
    eps_list = sorted((float(e) for e in eps_list), reverse=True)
    optimal = find_optimal_rotations(mesh, pi, grid_n=rotation_grid)
    min_e0, alpha0, u0, e0_table, rot_load = minimize_limit_energy(
        mesh, material, pi, optimal, arc_samples=arc_samples)
    u0_norm = w1p_norm(mesh, u0, material.p)

    precond = StiffnessPreconditioner(mesh, material)
    report = StudyReport(kind="gamma", config_hash=config_hash)
    report.limits = {
        "min_E0": min_e0,
        "alpha0": alpha0,
        "rotation_load_component": rot_load,
        "E0_samples": e0_table,
        "u0_norm_w1p": u0_norm,
        "optimal_angles": list(optimal.angles),
        "optimal_arcs": [list(a) for a in optimal.arcs],
    }
    if store_fields:
        report.fields["u0"] = u0

    for eps in eps_list:
        try:
            fld, diag, starts = multistart_minimize(mesh, material, pi_hat, eps, options, seed,
                                                    precond=precond)
        except Exception as exc:  # record the failure, keep sweeping
            report.rows.append({
                "resolution": resolution if resolution is not None else -1,
                "eps": eps, "error": str(exc),
            })
            continue
        y = fld.values
        alpha = extract_rotation(mesh, material, y)
        u = apply_gauge(mesh, rescaled_displacement(mesh, y, alpha, eps))
        row = {
            "resolution": resolution if resolution is not None else -1,
            "eps": eps,
            "energy": diag.energy,
            "energy_over_eps2": diag.energy / eps ** 2,
            "alpha": alpha,
            "dist_to_optimal": optimal.distance(alpha),
            "det_dev_sq_over_eps2": det_deviation_sq(mesh, y) / eps ** 2,
            "gp_over_eps2": gp_gradient_integral(mesh, material, u, eps) / eps ** 2,
            "u_dist_w1p": w1p_distance(mesh, u, u0, material.p),
            "u_norm_w1p": w1p_norm(mesh, u, material.p),
            "iterations": diag.iterations,
            "converged": diag.converged,
            "gap_to_min_E0": abs(diag.energy / eps ** 2 - min_e0),
            "starts": starts,
        }
        report.rows.append(row)
        if store_fields:
            report.fields[f"u_eps_{eps:g}"] = u
    bounds = [max(-row["energy"], 0.0) / row["eps"] ** 2 for row in report.rows if "energy" in row]
    report.limits["scaling_constant_max"] = max(bounds) if bounds else 0.0
    report.limits["scaling_constant_ratio"] = (
        max(bounds) / min(bounds) if bounds and min(bounds) > 0.0 else float("inf")
    )
    return report


def w1p_distance(mesh: TriMesh, u: np.ndarray, v: np.ndarray, p: float) -> float:
    return w1p_norm(mesh, np.asarray(u, float) - np.asarray(v, float), p)


def refined_study(
    mesh: TriMesh,
    material: MaterialModel,
    pi: PressureField,
    pi_hat: PressureField,
    eps_list: list[float],
    options: SolverOptions,
    seed: int = 0,
    rotation_grid: int = 1024,
    config_hash: str = "",
    resolution: int | None = None,
) -> StudyReport:
    """Track the rotational fluctuation of minimizers around the optimal set.

    Per eps: decompose the extracted angle as nearest-optimal plus offset
    a_eps, record a_eps / max(|a_eps|, sqrt(eps)), and evaluate the boundary
    second-variation form at the limit with the recorded amplitude.  The full
    sequence is reported; no limit is forced when it fails to settle.
    """
    if not pi.is_smooth:
        raise ValueError("refined study needs a C^2 pressure field")
    eps_list = sorted((float(e) for e in eps_list), reverse=True)
    optimal = find_optimal_rotations(mesh, pi, grid_n=rotation_grid)
    precond = StiffnessPreconditioner(mesh, material)
    report = StudyReport(kind="refined", config_hash=config_hash)

    scaled_seq = []
    s_last = None
    for eps in eps_list:
        fld, diag, _ = multistart_minimize(mesh, material, pi_hat, eps, options, seed,
                                           precond=precond)
        alpha = extract_rotation(mesh, material, fld.values)
        s_near = optimal.nearest(alpha)
        a_off = _signed_offset(alpha, s_near)
        scaled = a_off / max(abs(a_off), math.sqrt(eps))
        scaled_seq.append(scaled)
        s_last = s_near
        report.rows.append({
            "resolution": resolution if resolution is not None else -1,
            "eps": eps,
            "energy_over_eps2": diag.energy / eps ** 2,
            "alpha": alpha,
            "nearest_optimal": s_near,
            "offset": a_off,
            "offset_scaled": scaled,
            "sqrt_eps": math.sqrt(eps),
            "converged": diag.converged,
        })

    a0 = scaled_seq[-1] if scaled_seq else 0.0
    settled = len(scaled_seq) >= 2 and abs(scaled_seq[-1] - scaled_seq[-2]) <= 0.25 * (1.0 + abs(scaled_seq[-1]))
    f_value = second_variation(mesh, pi, s_last if s_last is not None else 0.0, a=a0)
    report.limits = {
        "A0_scalar": a0,
        "A0_sequence": scaled_seq,
        "A0_settled": bool(settled),
        "s_limit": s_last if s_last is not None else 0.0,
        "second_variation_at_limit": f_value,
        "optimal_angles": list(optimal.angles),
        "optimal_arcs": [list(a) for a in optimal.arcs],
    }
    return report


def _signed_offset(alpha: float, base: float) -> float:
    d = (alpha - base) % TWO_PI
    return d if d <= math.pi else d - TWO_PI


def almost_minimizer_scaling(
    mesh: TriMesh,
    material: MaterialModel,
    pi: PressureField,
    pi_hat: PressureField,
    eps_list: list[float],
    options: SolverOptions,
    exponent: float = 0.4,
    seed: int = 0,
    rotation_grid: int = 1024,
    config_hash: str = "",
    resolution: int | None = None,
) -> StudyReport:
    """Slow-rotation almost minimizers: rotate the limit state by eps^exponent.

    Requires the strictly increasing bump variant (isolated optimal angles
    with vanishing boundary second variation).  Per eps it builds
    y = R^lambda (x + eps u*), with u* the linearized minimizer at the optimal
    angle, and records the excess rotation-functional remainder against the
    lambda^3/eps target plus the rescaled-energy gap to the solved minimum.
    """
    if not (1.0 / 3.0 < exponent < 0.5):
        raise ValueError("exponent must lie in (1/3, 1/2)")
    if pi.params.get("variant") != "strict":
        raise ValueError("the scaling study requires the strict bump variant")
    eps_list = sorted((float(e) for e in eps_list), reverse=True)
    optimal = find_optimal_rotations(mesh, pi, grid_n=rotation_grid)
    if optimal.distance(0.0) > optimal.grid_step:
        raise ValueError("the identity rotation is not optimal for this configuration")

    min_e0, alpha0, u_star, _, _ = minimize_limit_energy(mesh, material, pi, optimal, arc_samples=3)
    base_value = rotation_functional(mesh, pi, alpha0)
    precond = StiffnessPreconditioner(mesh, material)

    report = StudyReport(kind="lambda", config_hash=config_hash)
    report.limits = {
        "alpha0": alpha0, "min_E0": min_e0, "exponent": exponent,
        "optimal_angles": list(optimal.angles),
    }
    for eps in eps_list:
        lam = eps ** exponent
        y = rebuild_deformation(mesh, u_star, alpha0 + lam, eps)
        y = zero_average(mesh, y)
        remainder = (rotation_functional(mesh, pi, alpha0 + lam) - base_value) / eps
        target = lam ** 3 / eps
        energy = assemble_energy(mesh, material, pi_hat, y, eps)
        _, diag, _ = multistart_minimize(mesh, material, pi_hat, eps, options, seed,
                                        precond=precond)
        alpha_hat = extract_rotation(mesh, material, y)
        dist = optimal.distance(alpha_hat)
        report.rows.append({
            "resolution": resolution if resolution is not None else -1,
            "eps": eps,
            "lambda": lam,
            "remainder": remainder,
            "remainder_over_target": remainder / target,
            "energy_over_eps2": energy / eps ** 2,
            "min_energy_over_eps2": diag.energy / eps ** 2,
            "gap_over_eps2": energy / eps ** 2 - diag.energy / eps ** 2,
            "alpha_extracted": alpha_hat,
            "dist_to_optimal": dist,
            "dist_over_lambda": dist / lam,
        })
    return report
