"""The rotation functional alpha -> integral of pi over the rotated body,
its minimizers on the circle, and the first/second variation residuals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import TriMesh
from .material import SKEW_GENERATOR, angular_distance, rotation, wrap_angle
from .pressure import PressureField

TWO_PI = 2.0 * math.pi
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class SmoothnessError(ValueError):
    """Raised when an operation needs more smoothness than the field declares."""


def golden_section_min(f, a: float, b: float, tol: float = 1e-10, max_iter: int = 200):
    """Scalar golden-section minimization on [a, b]; returns (argmin, value)."""
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    it = 0
    while abs(b - a) > tol and it < max_iter:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
        it += 1
    x = 0.5 * (a + b)
    return x, f(x)


@dataclass(frozen=True)
class OptimalSet:
    """Minimizers of the rotation functional: isolated angles and/or flat arcs."""

    angles: tuple[float, ...]              # isolated minimizers in [0, 2*pi)
    arcs: tuple[tuple[float, float], ...]  # closed arcs [lo, hi], hi may exceed 2*pi when wrapping
    min_value: float
    value_tolerance: float
    grid_step: float

    def distance(self, alpha: float) -> float:
        """Intrinsic angular distance from alpha to the set."""
        a = wrap_angle(alpha)
        best = math.inf
        for ang in self.angles:
            best = min(best, angular_distance(a, ang))
        for lo, hi in self.arcs:
            for shift in (-TWO_PI, 0.0, TWO_PI):
                aa = a + shift
                if lo <= aa <= hi:
                    return 0.0
                best = min(best, abs(aa - lo), abs(aa - hi))
        return best

    def nearest(self, alpha: float) -> float:
        """Nearest point of the set, as an angle in [0, 2*pi)."""
        a = wrap_angle(alpha)
        best, best_d = a, math.inf
        for ang in self.angles:
            d = angular_distance(a, ang)
            if d < best_d:
                best, best_d = ang, d
        for lo, hi in self.arcs:
            for shift in (-TWO_PI, 0.0, TWO_PI):
                aa = a + shift
                if lo <= aa <= hi:
                    return wrap_angle(a)
                for end in (lo, hi):
                    d = abs(aa - end)
                    if d < best_d:
                        best, best_d = wrap_angle(end), d
        return best

    def sample_angles(self, per_arc: int = 5) -> list[float]:
        out = list(self.angles)
        for lo, hi in self.arcs:
            out.extend(wrap_angle(x) for x in np.linspace(lo, hi, per_arc))
        seen: list[float] = []
        for a in out:
            if all(angular_distance(a, s) > 1e-12 for s in seen):
                seen.append(a)
        return seen


def rotation_functional(mesh: TriMesh, pi: PressureField, alpha: float) -> float:
    """Interior quadrature of x -> pi(R(alpha) x)."""
    pts = mesh.interior_points_flat()
    w = mesh.interior_weights_flat()
    R = rotation(alpha)
    return float(w @ np.asarray(pi.evaluate(pts @ R.T), dtype=float))


def rotation_functional_profile(mesh: TriMesh, pi: PressureField, alphas) -> np.ndarray:
    return np.array([rotation_functional(mesh, pi, a) for a in np.asarray(alphas, dtype=float)])


def find_optimal_rotations(
    mesh: TriMesh,
    pi: PressureField,
    grid_n: int = 1024,
    refine_tol: float = 1e-10,
) -> OptimalSet:
    """Grid scan plus golden-section refinement, with flat-arc merging.

    Grid values tying with the global minimum within 1e-9 * (1 + |min|) form
    candidate arcs; runs of at least three tied points are reported as arcs,
    everything else is refined to an isolated angle.  Quartic-flat isolated
    minima can merge into short arcs once the grid is fine enough for their
    neighborhoods to tie -- the reported set always carries the grid step so
    callers can interpret it.
    """
    if grid_n < 64:
        raise ValueError("grid_n must be at least 64")
    alphas = TWO_PI * np.arange(grid_n) / grid_n
    vals = rotation_functional_profile(mesh, pi, alphas)
    vmin = float(vals.min())
    tol = 1e-9 * (1.0 + abs(vmin))
    tied = vals <= vmin + tol

    if np.all(tied):
        return OptimalSet(
            angles=(), arcs=((0.0, TWO_PI),), min_value=vmin,
            value_tolerance=tol, grid_step=TWO_PI / grid_n,
        )

    # circular runs of tied grid points
    runs: list[list[int]] = []
    idx = np.flatnonzero(tied)
    if len(idx):
        breaks = np.flatnonzero(np.diff(idx) > 1)
        pieces = np.split(idx, breaks + 1)
        if len(pieces) > 1 and pieces[0][0] == 0 and pieces[-1][-1] == grid_n - 1:
            pieces[0] = np.concatenate([pieces[-1] - grid_n, pieces[0]])
            pieces = pieces[:-1]
        runs = [list(p) for p in pieces]

    arcs: list[tuple[float, float]] = []
    isolated_seeds: list[int] = []
    for run in runs:
        if len(run) >= 3:
            lo = TWO_PI * run[0] / grid_n
            hi = TWO_PI * run[-1] / grid_n
            arcs.append((lo, hi))
        else:
            mid = run[int(np.argmin([vals[i % grid_n] for i in run]))]
            isolated_seeds.append(mid % grid_n)

    def f(a):
        return rotation_functional(mesh, pi, a)

    angles: list[float] = []
    best_val = vmin
    refined: list[tuple[float, float]] = []
    for i in isolated_seeds:
        a_lo = alphas[i] - TWO_PI / grid_n
        a_hi = alphas[i] + TWO_PI / grid_n
        a_star, v_star = golden_section_min(f, a_lo, a_hi, tol=refine_tol)
        refined.append((wrap_angle(a_star), v_star))
        best_val = min(best_val, v_star)
    for a_star, v_star in refined:
        if v_star <= best_val + tol:
            angles.append(a_star)
    angles.sort()

    return OptimalSet(
        angles=tuple(angles), arcs=tuple(arcs), min_value=best_val,
        value_tolerance=tol, grid_step=TWO_PI / grid_n,
    )


def el_residual(mesh: TriMesh, pi: PressureField, alpha: float) -> float:
    """Boundary form of the stationarity residual at R(alpha):
    integral over the boundary of pi(R x) (n . J x)."""
    pts = mesh.boundary_points_flat()
    w = mesh.boundary_weights_flat()
    nrm = mesh.boundary_normals_flat()
    R = rotation(alpha)
    vals = np.asarray(pi.evaluate(pts @ R.T), dtype=float)
    jx = pts @ SKEW_GENERATOR.T
    return float(w @ (vals * np.einsum("ij,ij->i", nrm, jx)))


def el_volume_form(mesh: TriMesh, pi: PressureField, alpha: float) -> float:
    """Interior form of the same residual: integral of grad pi(R x) . R J x."""
    pts = mesh.interior_points_flat()
    w = mesh.interior_weights_flat()
    R = rotation(alpha)
    g = np.asarray(pi.gradient(pts @ R.T), dtype=float)
    rjx = pts @ (R @ SKEW_GENERATOR).T
    return float(w @ np.einsum("ij,ij->i", g, rjx))


def second_variation(mesh: TriMesh, pi: PressureField, alpha: float, a: float = 1.0) -> float:
    """Boundary quadratic form measuring the cost of rotational fluctuations:
    integral of (grad pi(R x) . R A x)(A x . n) with A = a J.
    """
    if not pi.is_smooth:
        raise SmoothnessError("second variation needs a C^2 pressure field")
    pts = mesh.boundary_points_flat()
    w = mesh.boundary_weights_flat()
    nrm = mesh.boundary_normals_flat()
    R = rotation(alpha)
    g = np.asarray(pi.gradient(pts @ R.T), dtype=float)
    ax = a * (pts @ SKEW_GENERATOR.T)
    rax = ax @ R.T
    return float(w @ (np.einsum("ij,ij->i", g, rax) * np.einsum("ij,ij->i", ax, nrm)))
