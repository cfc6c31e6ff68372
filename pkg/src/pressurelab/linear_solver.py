"""P1 assembly and solve of the small-pressure limit energy

    E0(u) = 1/2 * integral of (c1 |sym grad u|^2 + c2 (div u)^2)
          + boundary integral of pi(R0 x) n . u

over zero-average displacements.  The stiffness kernel holds the two
translations and the linearized rotation; the load component along the
rotation generator equals the boundary stationarity residual of R0 and is
measured, reported, and projected out before the conjugate-gradient solve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .geometry import TriMesh
from .material import MaterialModel, SKEW_GENERATOR, rotation
from .pressure import PressureField


class SolverError(RuntimeError):
    pass


@dataclass
class DisplacementField:
    mesh: TriMesh
    values: np.ndarray  # (N, 2)
    gauge: str = "none"  # "zero_skew_mean" | "none"


@dataclass
class LinearSystem:
    mesh: TriMesh
    material: MaterialModel
    alpha0: float
    stiffness: sp.csr_matrix          # (2N, 2N)
    load: np.ndarray                  # (2N,)
    kernel: np.ndarray                # (3, 2N): two translations + rotation generator
    rotation_load_component: float    # load . (J x) pairing, equals the EL residual


def assemble_stiffness(mesh: TriMesh, material: MaterialModel) -> sp.csr_matrix:
    """Sparse symmetric operator with u^T K u = integral of the strain quadratic form."""
    tris = mesh.triangles
    g = mesh.basis_gradients
    areas = mesh.areas
    c1, c2 = material.c1, material.c2

    m = len(tris)
    rows = np.empty(36 * m, dtype=np.int64)
    cols = np.empty(36 * m, dtype=np.int64)
    vals = np.empty(36 * m)
    pos = 0
    gdots = np.einsum("tia,tja->tij", g, g)
    for i in range(3):
        for j in range(3):
            for a in range(2):
                for b in range(2):
                    block = areas * (
                        0.5 * c1 * ((a == b) * gdots[:, i, j] + g[:, i, b] * g[:, j, a])
                        + c2 * g[:, i, a] * g[:, j, b]
                    )
                    rows[pos:pos + m] = 2 * tris[:, i] + a
                    cols[pos:pos + m] = 2 * tris[:, j] + b
                    vals[pos:pos + m] = block
                    pos += m
    n2 = 2 * mesh.n_nodes
    return sp.coo_matrix((vals, (rows, cols)), shape=(n2, n2)).tocsr()


def assemble_load(mesh: TriMesh, pi: PressureField, alpha0: float) -> np.ndarray:
    """Boundary pressure load: l[(i,a)] = integral of pi(R0 x) n_a phi_i over the boundary."""
    R = rotation(alpha0)
    pts = mesh.quadrature.boundary_points         # (B, 2, 2)
    w = mesh.quadrature.boundary_weights          # (B, 2)
    bary = mesh.quadrature.boundary_bary          # (2, 2) point x trace-node
    vals = np.asarray(pi.evaluate(pts.reshape(-1, 2) @ R.T), dtype=float).reshape(pts.shape[:2])
    load = np.zeros((mesh.n_nodes, 2))
    coeff = np.einsum("eq,eq,qi->ei", w, vals, bary)  # (B, 2 trace nodes)
    for local in range(2):
        nodes = mesh.boundary_edges[:, local]
        for a in range(2):
            np.add.at(load[:, a], nodes, coeff[:, local] * mesh.boundary_normals[:, a])
    return load.ravel()


def rigid_modes(mesh: TriMesh) -> np.ndarray:
    """Translations and the linearized rotation field J x, flattened."""
    n = mesh.n_nodes
    modes = np.zeros((3, 2 * n))
    modes[0, 0::2] = 1.0
    modes[1, 1::2] = 1.0
    jx = mesh.nodes @ SKEW_GENERATOR.T
    modes[2, 0::2] = jx[:, 0]
    modes[2, 1::2] = jx[:, 1]
    return modes


def assemble_linear_system(mesh: TriMesh, material: MaterialModel, pi: PressureField,
                           alpha0: float) -> LinearSystem:
    K = assemble_stiffness(mesh, material)
    load = assemble_load(mesh, pi, alpha0)
    kernel = rigid_modes(mesh)
    rot_component = float(load @ kernel[2])
    return LinearSystem(
        mesh=mesh, material=material, alpha0=alpha0, stiffness=K, load=load,
        kernel=kernel, rotation_load_component=rot_component,
    )


def skew_mean(mesh: TriMesh, u: np.ndarray) -> float:
    """Mean antisymmetric part of grad u: 1/2 integral of (d1 u2 - d2 u1)."""
    G = np.einsum("tia,tib->tab", u[mesh.triangles], mesh.basis_gradients)
    return float(mesh.areas @ (0.5 * (G[:, 1, 0] - G[:, 0, 1])))


def apply_gauge(mesh: TriMesh, u: np.ndarray) -> np.ndarray:
    """Remove the infinitesimal rotation so the mean skew gradient vanishes,
    then re-zero the average (the rotation field itself has zero average)."""
    omega = skew_mean(mesh, u) / mesh.total_area
    out = u - omega * (mesh.nodes @ SKEW_GENERATOR.T)
    mean = mesh.node_masses @ out / mesh.total_mass
    return out - mean


def _orthonormal_kernel(kernel: np.ndarray) -> np.ndarray:
    q, _ = np.linalg.qr(kernel.T)
    return q.T


def solve_linearized(system: LinearSystem, gauge: str = "zero_skew_mean",
                     rel_tol: float = 1e-10, max_iter: int = 20000):
    """Preconditioned CG on the orthogonal complement of the rigid modes.

    Returns (DisplacementField, E0 value).  The reported E0 pairs the gauged
    minimizer with the full load, so adding an infinitesimal rotation changes
    it exactly by the measured rotation load component.
    """
    K = system.stiffness
    Q = _orthonormal_kernel(system.kernel)

    def project(v):
        return v - Q.T @ (Q @ v)

    b = project(-system.load)
    diag = K.diagonal()
    diag[diag <= 0.0] = 1.0
    inv_diag = 1.0 / diag

    x = np.zeros_like(b)
    r = b.copy()
    z = project(inv_diag * r)
    p = z.copy()
    rz = float(r @ z)
    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        u = np.zeros((system.mesh.n_nodes, 2))
        return DisplacementField(system.mesh, u, gauge), 0.0
    it = 0
    while it < max_iter:
        Kp = K @ p
        alpha = rz / float(p @ Kp)
        x += alpha * p
        r -= alpha * Kp
        if float(np.linalg.norm(r)) <= rel_tol * bnorm:
            break
        z = project(inv_diag * r)
        rz_new = float(r @ z)
        beta = rz_new / rz
        rz = rz_new
        p = z + beta * p
        it += 1
    else:
        raise SolverError(f"conjugate gradient did not converge in {max_iter} iterations")

    u = project(x).reshape(system.mesh.n_nodes, 2)
    if gauge == "zero_skew_mean":
        u = apply_gauge(system.mesh, u)
    elif gauge != "none":
        raise ValueError(f"unknown gauge {gauge!r}")
    e0 = energy_value(system, u)
    return DisplacementField(system.mesh, u, gauge), e0


def energy_value(system: LinearSystem, u: np.ndarray) -> float:
    flat = np.asarray(u, dtype=float).ravel()
    return float(0.5 * flat @ (system.stiffness @ flat) + system.load @ flat)


def strain_energy(mesh: TriMesh, material: MaterialModel, u: np.ndarray) -> float:
    """Element-wise 1/2 integral of the strain quadratic form, for cross-checks."""
    G = np.einsum("tia,tib->tab", np.asarray(u, float)[mesh.triangles], mesh.basis_gradients)
    sym = 0.5 * (G + np.swapaxes(G, 1, 2))
    tr = G[:, 0, 0] + G[:, 1, 1]
    q = material.c1 * np.einsum("tij,tij->t", sym, sym) + material.c2 * tr * tr
    return float(0.5 * mesh.areas @ q)


def divergence_form_check(mesh: TriMesh, pi: PressureField, alpha0: float,
                          u: np.ndarray) -> tuple[float, float]:
    """Boundary and interior quadratures of the same divergence identity.

    Returns (boundary integral of pi(R0 x) n . u,
             interior integral of div(pi(R0 x) u)).
    """
    R = rotation(alpha0)
    u = np.asarray(u, dtype=float)

    bpts = mesh.quadrature.boundary_points
    bw = mesh.quadrature.boundary_weights
    bary = mesh.quadrature.boundary_bary
    vals = np.asarray(pi.evaluate(bpts.reshape(-1, 2) @ R.T), dtype=float).reshape(bpts.shape[:2])
    u_edge = u[mesh.boundary_edges]                      # (B, 2 nodes, 2)
    u_q = np.einsum("qi,eic->eqc", bary, u_edge)         # (B, 2 pts, 2)
    ndotu = np.einsum("eqc,ec->eq", u_q, mesh.boundary_normals)
    boundary = float(np.sum(bw * vals * ndotu))

    G = np.einsum("tia,tib->tab", u[mesh.triangles], mesh.basis_gradients)
    div = G[:, 0, 0] + G[:, 1, 1]
    ipts = mesh.quadrature.interior_points
    iw = mesh.quadrature.interior_weights
    m = len(mesh.triangles)
    piv = np.asarray(pi.evaluate(ipts.reshape(-1, 2) @ R.T), dtype=float).reshape(m, 3)
    gv = np.asarray(pi.gradient(ipts.reshape(-1, 2) @ R.T), dtype=float).reshape(m, 3, 2)
    u_int = np.einsum("ri,tic->trc", mesh.quadrature.interior_bary, u[mesh.triangles])
    grad_chain = np.einsum("trj,jc,trc->tr", gv, R, u_int)  # (R^T grad pi(R x)) . u
    volume = float(np.sum(iw * (piv * div[:, None] + grad_chain)))
    return boundary, volume
