"""Finite-strain energy over P1 deformations and its quasi-Newton minimizer.

The discrete energy of a nodal deformation y is

    E(y) = sum_T |T| W(grad y_T) + eps * sum_q w_q (pi_hat(y(x_q)) det grad y - pi_hat(x_q))

with +inf whenever some triangle reverses orientation.  Deformations live in
the zero-average subspace (lumped masses); the minimizer is a limited-memory
BFGS iteration with Armijo backtracking that rejects inadmissible trial steps
outright, so every accepted iterate keeps all determinants positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import TriMesh
from .material import MaterialModel, g_mixed, rotation, stress as material_stress
from .pressure import PressureField


@dataclass
class DeformationField:
    mesh: TriMesh
    values: np.ndarray  # (N, 2)

    @property
    def admissible(self) -> bool:
        return bool(np.all(deformation_gradients(self.mesh, self.values)[1] > 0.0))


@dataclass
class SolveDiagnostics:
    energy: float
    grad_norm: float
    iterations: int
    backtracks: int
    admissibility_rejections: int
    converged: bool
    stop_reason: str
    energy_history: list | None = None  # accepted-iterate energies, when recorded


def zero_average(mesh: TriMesh, field: np.ndarray) -> np.ndarray:
    """Subtract the lumped-mass mean from a nodal vector field."""
    mean = mesh.node_masses @ field / mesh.total_mass
    return field - mean


def project_gradient(mesh: TriMesh, grad: np.ndarray) -> np.ndarray:
    """Differential of E restricted to the zero-average subspace.

    Chain rule through the mass-mean shift: the output has no net component
    along uniform translations.
    """
    total = grad.sum(axis=0)
    return grad - np.outer(mesh.node_masses / mesh.total_mass, total)


def identity_map(mesh: TriMesh) -> np.ndarray:
    return mesh.nodes.copy()


def rigid_map(mesh: TriMesh, alpha: float) -> np.ndarray:
    return mesh.nodes @ rotation(alpha).T


def deformation_gradients(mesh: TriMesh, y: np.ndarray):
    """Per-triangle gradient (M, 2, 2) and determinant (M,) of a nodal map."""
    yt = y[mesh.triangles]  # (M, 3, 2)
    F = np.matmul(yt.transpose(0, 2, 1), mesh.basis_gradients)
    det = F[:, 0, 0] * F[:, 1, 1] - F[:, 0, 1] * F[:, 1, 0]
    return F, det


def _interp_at_interior(mesh: TriMesh, y: np.ndarray) -> np.ndarray:
    """P1 values of y at the interior rule points, shape (M, 3, 2)."""
    return np.matmul(mesh.quadrature.interior_bary, y[mesh.triangles])


def assemble_energy(mesh: TriMesh, material: MaterialModel, pi_hat: PressureField,
                    y: np.ndarray, eps: float) -> float:
    """Total energy; +inf when orientation is violated anywhere."""
    F, det = deformation_gradients(mesh, y)
    if np.any(det <= 0.0):
        return math.inf
    d = _dist_batch(F)
    w_el = material.c1 * g_mixed(d, material.p) + material.c2 * g_mixed(np.abs(det - 1.0), material.q)
    elastic = float(mesh.areas @ w_el)
    yq = _interp_at_interior(mesh, y)
    piy = np.asarray(pi_hat.evaluate(yq.reshape(-1, 2)), dtype=float).reshape(len(F), 3)
    pix = np.asarray(pi_hat.evaluate(mesh.interior_points_flat()), dtype=float).reshape(len(F), 3)
    w = mesh.quadrature.interior_weights
    pressure = float(np.sum(w * (piy * det[:, None] - pix)))
    return elastic + eps * pressure


def _dist_batch(F: np.ndarray) -> np.ndarray:
    a = F[:, 0, 0] + F[:, 1, 1]
    b = F[:, 1, 0] - F[:, 0, 1]
    s = np.hypot(a, b)
    sq = np.einsum("tij,tij->t", F, F) + 2.0 - 2.0 * s
    return np.sqrt(np.maximum(sq, 0.0))


def assemble_gradient(mesh: TriMesh, material: MaterialModel, pi_hat: PressureField,
                      y: np.ndarray, eps: float) -> np.ndarray:
    """Nodal gradient of the energy, projected onto the zero-average subspace."""
    F, det = deformation_gradients(mesh, y)
    if np.any(det <= 0.0):
        raise ValueError("gradient requested at an inadmissible deformation")
    S = material_stress(material, F)
    G = mesh.basis_gradients
    contrib = mesh.areas[:, None, None] * np.matmul(G, S.transpose(0, 2, 1))

    yq = _interp_at_interior(mesh, y)
    piy = np.asarray(pi_hat.evaluate(yq.reshape(-1, 2)), dtype=float).reshape(len(F), 3)
    gpiy = np.asarray(pi_hat.gradient(yq.reshape(-1, 2)), dtype=float).reshape(len(F), 3, 2)
    w = mesh.quadrature.interior_weights
    B = mesh.quadrature.interior_bary
    cof = np.empty_like(F)
    cof[:, 0, 0] = F[:, 1, 1]
    cof[:, 0, 1] = -F[:, 1, 0]
    cof[:, 1, 0] = -F[:, 0, 1]
    cof[:, 1, 1] = F[:, 0, 0]
    wdet_g = (w * det[:, None])[:, :, None] * gpiy      # (M, 3 pts, 2)
    contrib += eps * np.matmul(B.T, wdet_g)
    s_pi = np.sum(w * piy, axis=1)
    contrib += (eps * s_pi)[:, None, None] * np.matmul(G, cof.transpose(0, 2, 1))

    grad = np.zeros_like(y)
    flat_idx = mesh.triangles.ravel()
    for c in range(2):
        grad[:, c] = np.bincount(flat_idx, weights=contrib[:, :, c].ravel(), minlength=len(y))
    return project_gradient(mesh, grad)


class StiffnessPreconditioner:
    """Factorized linearized stiffness (shifted to remove the rigid kernel).

    Near a rigid state the energy Hessian is the frame-rotated linear
    stiffness, so applying the factorization in the start frame makes the
    first quasi-Newton step essentially a Newton step.
    """

    def __init__(self, mesh: TriMesh, material: MaterialModel, shift: float = 0.05):
        import scipy.sparse as sp
        from scipy.sparse.linalg import splu

        from .linear_solver import assemble_stiffness

        K = assemble_stiffness(mesh, material)
        mass2 = np.repeat(mesh.node_masses, 2)
        self._lu = splu((K + shift * material.c1 * sp.diags(mass2)).tocsc())
        self.n = mesh.n_nodes

    def solve(self, v: np.ndarray, frame_angle: float = 0.0) -> np.ndarray:
        if frame_angle == 0.0:
            return self._lu.solve(v)
        R = rotation(frame_angle)
        vin = (v.reshape(self.n, 2) @ R).ravel()  # rotate into the reference frame
        out = self._lu.solve(vin)
        return (out.reshape(self.n, 2) @ R.T).ravel()


def stiffness_diagonal(mesh: TriMesh, material: MaterialModel) -> np.ndarray:
    """Diagonal of the linearized stiffness plus a mass floor; L-BFGS seed scaling."""
    g = mesh.basis_gradients
    gg = np.einsum("tib,tib->ti", g, g)
    diag = np.zeros((mesh.n_nodes, 2))
    flat = mesh.triangles.ravel()
    for c in range(2):
        vals = mesh.areas[:, None] * (0.5 * material.c1 * (gg + g[:, :, c] ** 2) + material.c2 * g[:, :, c] ** 2)
        diag[:, c] = np.bincount(flat, weights=vals.ravel(), minlength=mesh.n_nodes)
    floor = 1e-8 * float(diag.max())
    return diag + floor


def rigid_start(mesh: TriMesh, alpha: float, noise_amplitude: float, rng: np.random.Generator) -> np.ndarray:
    """Rotated reference map plus admissible nodal noise, zero-averaged.

    The requested amplitude is halved until every triangle keeps a positive
    determinant (thin polar elements near the center bound the tolerable
    nodal perturbation well below the global mesh size).
    """
    base = rigid_map(mesh, alpha)
    noise = rng.uniform(-1.0, 1.0, size=base.shape)
    amp = noise_amplitude
    for _ in range(80):
        y = zero_average(mesh, base + amp * noise)
        _, det = deformation_gradients(mesh, y)
        if np.all(det > 0.0):
            return y
        amp *= 0.5
    return zero_average(mesh, base)


def minimize_energy(
    mesh: TriMesh,
    material: MaterialModel,
    pi_hat: PressureField,
    eps: float,
    init: np.ndarray,
    grad_tol: float = 1e-9,
    max_iter: int = 5000,
    armijo_c: float = 1e-4,
    backtrack: float = 0.5,
    memory: int = 10,
    precond: "StiffnessPreconditioner | None" = None,
    frame_angle: float = 0.0,
    record_history: bool = False,
) -> tuple[DeformationField, SolveDiagnostics]:
    """Minimize the energy from an admissible start; monotone in energy.

    Returns the final deformation and diagnostics.  Hitting the iteration cap
    is reported through ``converged``/``stop_reason`` rather than raised.
    """
    y0 = zero_average(mesh, np.asarray(init, dtype=float))
    _, det0 = deformation_gradients(mesh, y0)
    if np.any(det0 <= 0.0):
        raise ValueError("initial deformation is inadmissible")

    n = mesh.n_nodes
    diag = stiffness_diagonal(mesh, material).ravel()
    inv_diag = 1.0 / diag

    if precond is not None:
        def h0(v):
            return precond.solve(v, frame_angle)
    else:
        def h0(v):
            return gamma * inv_diag * v

    def energy_only(z):
        return assemble_energy(mesh, material, pi_hat, z.reshape(n, 2), eps)

    def gradient_at(z):
        return assemble_gradient(mesh, material, pi_hat, z.reshape(n, 2), eps).ravel()

    z = y0.ravel().copy()
    f = energy_only(z)
    g = gradient_at(z)
    history = [f] if record_history else None
    s_list: list[np.ndarray] = []
    y_list: list[np.ndarray] = []
    rho_list: list[float] = []
    gamma = 1.0
    backtracks = 0
    rejections = 0
    iterations = 0
    stop_reason = "maxiter"
    converged = False

    def two_loop(grad):
        q = grad.copy()
        alphas = []
        for s, yv, rho in zip(reversed(s_list), reversed(y_list), reversed(rho_list)):
            a = rho * (s @ q)
            alphas.append(a)
            q -= a * yv
        q = h0(q)
        for (s, yv, rho), a in zip(zip(s_list, y_list, rho_list), reversed(alphas)):
            b = rho * (yv @ q)
            q += (a - b) * s
        return q

    for iterations in range(1, max_iter + 1):
        gnorm = float(np.linalg.norm(g))
        tol_now = grad_tol * (1.0 + abs(f))
        if gnorm <= tol_now:
            stop_reason = "gradient"
            converged = True
            break

        d = -two_loop(g)
        slope = float(g @ d)
        if slope >= 0.0:
            s_list.clear(); y_list.clear(); rho_list.clear()
            d = -h0(g)
            slope = float(g @ d)

        t = 1.0
        accepted = False
        while t > 1e-20:
            z_try = zero_average(mesh, (z + t * d).reshape(n, 2)).ravel()
            f_try = energy_only(z_try)
            if math.isinf(f_try):
                rejections += 1
            elif f_try <= f + armijo_c * t * slope:
                accepted = True
                break
            t *= backtrack
            backtracks += 1
        if not accepted:
            stop_reason = "stalled"
            break

        z_new, f_new = z_try, f_try
        g_new = gradient_at(z_new)
        s = z_new - z
        yv = g_new - g
        sy = float(s @ yv)
        if sy > 1e-12 * float(np.linalg.norm(s)) * float(np.linalg.norm(yv)):
            s_list.append(s)
            y_list.append(yv)
            rho_list.append(1.0 / sy)
            if precond is None:
                gamma = sy / float(yv @ (inv_diag * yv))
            if len(s_list) > memory:
                s_list.pop(0); y_list.pop(0); rho_list.pop(0)
        z, f, g = z_new, f_new, g_new
        if history is not None:
            history.append(f)
    else:
        iterations = max_iter

    gnorm = float(np.linalg.norm(g))
    if stop_reason == "stalled" and gnorm <= math.sqrt(np.finfo(float).eps) * (1.0 + abs(f)):
        converged = True  # line-search floor at a numerically stationary point
    field = DeformationField(mesh=mesh, values=z.reshape(n, 2))
    diags = SolveDiagnostics(
        energy=f, grad_norm=gnorm, iterations=iterations, backtracks=backtracks,
        admissibility_rejections=rejections, converged=converged, stop_reason=stop_reason,
        energy_history=history,
    )
    return field, diags


def det_deviation_sq(mesh: TriMesh, y: np.ndarray) -> float:
    """Integral of (det - 1)^2 over the region where |det - 1| <= 1."""
    _, det = deformation_gradients(mesh, y)
    dev = det - 1.0
    mask = np.abs(dev) <= 1.0
    return float(mesh.areas[mask] @ (dev[mask] ** 2))


def gp_gradient_integral(mesh: TriMesh, material: MaterialModel, u: np.ndarray, eps: float) -> float:
    """Integral of g_p(eps |grad u|) over the mesh (Frobenius norm per triangle)."""
    G, _ = deformation_gradients(mesh, u)
    mag = np.sqrt(np.einsum("tij,tij->t", G, G))
    return float(mesh.areas @ g_mixed(eps * mag, material.p))
