"""Structured triangulations of the disk, annulus, and four-lobe test domains.

All meshes are polar grids (radial rings x uniform angular divisions) whose
quads are split into triangle pairs; nodes sit on the exact circles, so curved
boundaries become inscribed polygons.  `build_domain` translates the result so
that the lumped-mass barycenter is the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np


class DomainError(ValueError):
    """Invalid domain specification or degenerate mesh."""


@dataclass(frozen=True)
class DomainSpec:
    """Parametric description of one of the three supported domains.

    kind is one of "disk", "annulus", "four_lobe"; resolution counts radial
    elements across the characteristic radius (disk radius, annulus thickness,
    or the small lobe radius).
    """

    kind: str
    resolution: int
    radius: float = 1.0
    r_inner: float = 1.0
    r_outer: float = 2.0
    r_small: float = 1.0
    r_large: float = 2.0

    @classmethod
    def disk(cls, radius: float = 1.0, resolution: int = 32) -> "DomainSpec":
        return cls(kind="disk", resolution=resolution, radius=radius)

    @classmethod
    def annulus(cls, r_inner: float, r_outer: float, resolution: int = 32) -> "DomainSpec":
        return cls(kind="annulus", resolution=resolution, r_inner=r_inner, r_outer=r_outer)

    @classmethod
    def four_lobe(cls, r_small: float = 1.0, r_large: float = 2.0, resolution: int = 32) -> "DomainSpec":
        return cls(kind="four_lobe", resolution=resolution, r_small=r_small, r_large=r_large)

    @classmethod
    def from_config(cls, section: dict) -> "DomainSpec":
        kind = section["kind"]
        params = section.get("params", {}) or {}
        res = int(section["resolution"])
        if kind == "disk":
            return cls.disk(radius=float(params.get("radius", 1.0)), resolution=res)
        if kind == "annulus":
            return cls.annulus(
                r_inner=float(params.get("r_inner", 1.0)),
                r_outer=float(params.get("r_outer", 2.0)),
                resolution=res,
            )
        if kind == "four_lobe":
            return cls.four_lobe(
                r_small=float(params.get("r_small", 1.0)),
                r_large=float(params.get("r_large", 2.0)),
                resolution=res,
            )
        raise DomainError(f"unknown domain kind {kind!r}")

    def validate(self) -> None:
        if self.kind not in ("disk", "annulus", "four_lobe"):
            raise DomainError(f"unknown domain kind {self.kind!r}")
        if self.resolution < 2:
            raise DomainError("resolution must be at least 2")
        if self.kind == "disk" and self.radius <= 0:
            raise DomainError("disk radius must be positive")
        if self.kind == "annulus":
            if self.r_inner <= 0 or self.r_outer <= 0:
                raise DomainError("annulus radii must be positive")
            if self.r_inner >= self.r_outer:
                raise DomainError("annulus requires r_inner < r_outer")
        if self.kind == "four_lobe":
            if self.r_small <= 0 or self.r_large <= 0:
                raise DomainError("four_lobe radii must be positive")
            if self.r_small >= self.r_large:
                raise DomainError("four_lobe requires r_small < r_large")

    @property
    def outer_radius(self) -> float:
        return {"disk": self.radius, "annulus": self.r_outer, "four_lobe": self.r_large}[self.kind]

    @property
    def inner_radius(self) -> float:
        """Radius of the largest origin-centered disk avoiding the closure (0 unless annulus)."""
        return self.r_inner if self.kind == "annulus" else 0.0


@dataclass(frozen=True)
class QuadratureRule:
    """Interior 3-point (degree-2 exact) and per-edge 2-point Gauss (degree-3 exact) rules."""

    interior_points: np.ndarray   # (M, 3, 2) edge midpoints of each triangle
    interior_weights: np.ndarray  # (M, 3) each = area/3
    interior_bary: np.ndarray     # (3, 3) barycentric coordinates of the rule points
    boundary_points: np.ndarray   # (B, 2, 2)
    boundary_weights: np.ndarray  # (B, 2) each = edge length/2
    boundary_bary: np.ndarray     # (2, 2) trace shape values at the Gauss points


_INTERIOR_BARY = np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]])
_GAUSS_T = 0.5 / math.sqrt(3.0)
_BOUNDARY_BARY = np.array([[0.5 + _GAUSS_T, 0.5 - _GAUSS_T], [0.5 - _GAUSS_T, 0.5 + _GAUSS_T]])


@dataclass(frozen=True)
class TriMesh:
    """Immutable triangulation with precomputed P1 and quadrature data."""

    nodes: np.ndarray             # (N, 2)
    triangles: np.ndarray         # (M, 3) int, counterclockwise
    areas: np.ndarray             # (M,)
    basis_gradients: np.ndarray   # (M, 3, 2)
    node_masses: np.ndarray       # (N,) lumped row-sum masses
    boundary_edges: np.ndarray    # (B, 2) int node pairs
    boundary_normals: np.ndarray  # (B, 2) unit outward
    boundary_lengths: np.ndarray  # (B,)
    quadrature: QuadratureRule
    diameter: float

    @classmethod
    def from_arrays(cls, nodes: np.ndarray, triangles: np.ndarray) -> "TriMesh":
        nodes = np.ascontiguousarray(np.asarray(nodes, dtype=float))
        triangles = np.ascontiguousarray(np.asarray(triangles, dtype=np.int64))
        if nodes.ndim != 2 or nodes.shape[1] != 2:
            raise DomainError("nodes must be an (N, 2) array")
        if triangles.ndim != 2 or triangles.shape[1] != 3:
            raise DomainError("triangles must be an (M, 3) array")

        v0 = nodes[triangles[:, 0]]
        v1 = nodes[triangles[:, 1]]
        v2 = nodes[triangles[:, 2]]
        cross = (v1[:, 0] - v0[:, 0]) * (v2[:, 1] - v0[:, 1]) - (v1[:, 1] - v0[:, 1]) * (v2[:, 0] - v0[:, 0])
        areas = 0.5 * cross
        if np.any(areas <= 0.0):
            bad = int(np.sum(areas <= 0.0))
            raise DomainError(f"{bad} triangles have non-positive signed area")

        grads = np.empty((len(triangles), 3, 2))
        edges = (v2 - v1, v0 - v2, v1 - v0)  # edge opposite node i
        for i, e in enumerate(edges):
            grads[:, i, 0] = -e[:, 1]
            grads[:, i, 1] = e[:, 0]
        grads /= (2.0 * areas)[:, None, None]

        masses = np.bincount(triangles.ravel(), weights=np.repeat(areas / 3.0, 3), minlength=len(nodes))

        b_edges, b_normals, b_lengths = _extract_boundary(nodes, triangles)
        quad = _build_quadrature(nodes, triangles, areas, b_edges, b_lengths)

        lo = nodes.min(axis=0)
        hi = nodes.max(axis=0)
        diameter = float(np.hypot(*(hi - lo)))

        for arr in (nodes, triangles, areas, grads, masses, b_edges, b_normals, b_lengths):
            arr.setflags(write=False)
        return cls(
            nodes=nodes, triangles=triangles, areas=areas, basis_gradients=grads,
            node_masses=masses, boundary_edges=b_edges, boundary_normals=b_normals,
            boundary_lengths=b_lengths, quadrature=quad, diameter=diameter,
        )

    def translated(self, shift: np.ndarray) -> "TriMesh":
        return TriMesh.from_arrays(self.nodes + np.asarray(shift, dtype=float), self.triangles)

    @property
    def total_area(self) -> float:
        return float(self.areas.sum())

    @property
    def total_mass(self) -> float:
        return float(self.node_masses.sum())

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def interior_points_flat(self) -> np.ndarray:
        return self.quadrature.interior_points.reshape(-1, 2)

    def interior_weights_flat(self) -> np.ndarray:
        return self.quadrature.interior_weights.reshape(-1)

    def boundary_points_flat(self) -> np.ndarray:
        return self.quadrature.boundary_points.reshape(-1, 2)

    def boundary_weights_flat(self) -> np.ndarray:
        return self.quadrature.boundary_weights.reshape(-1)

    def boundary_normals_flat(self) -> np.ndarray:
        return np.repeat(self.boundary_normals, 2, axis=0)

    def export_json(self) -> dict:
        """Debug dump of the raw mesh arrays."""
        return {
            "nodes": self.nodes.tolist(),
            "triangles": self.triangles.tolist(),
            "boundary_edges": [
                {
                    "nodes": [int(a), int(b)],
                    "normal": [float(nx), float(ny)],
                    "length": float(l),
                }
                for (a, b), (nx, ny), l in zip(
                    self.boundary_edges, self.boundary_normals, self.boundary_lengths
                )
            ],
        }


def _extract_boundary(nodes: np.ndarray, triangles: np.ndarray):
    """Edges referenced by exactly one triangle, with unit outward normals."""
    m = len(triangles)
    tri_of_edge = np.repeat(np.arange(m), 3)
    raw = np.empty((3 * m, 2), dtype=np.int64)
    raw[0::3] = triangles[:, [0, 1]]
    raw[1::3] = triangles[:, [1, 2]]
    raw[2::3] = triangles[:, [2, 0]]
    key = np.sort(raw, axis=1)
    order = np.lexsort((key[:, 1], key[:, 0]))
    sk = key[order]
    new_group = np.ones(len(sk), dtype=bool)
    new_group[1:] = np.any(sk[1:] != sk[:-1], axis=1)
    group_id = np.cumsum(new_group) - 1
    counts = np.bincount(group_id)
    boundary_mask_sorted = counts[group_id] == 1
    boundary_rows = order[boundary_mask_sorted]
    boundary_rows.sort()  # deterministic: construction order

    b_edges = raw[boundary_rows]
    owners = tri_of_edge[boundary_rows]
    a = nodes[b_edges[:, 0]]
    b = nodes[b_edges[:, 1]]
    ev = b - a
    lengths = np.hypot(ev[:, 0], ev[:, 1])
    normals = np.stack([ev[:, 1], -ev[:, 0]], axis=1) / lengths[:, None]
    centroids = nodes[triangles[owners]].mean(axis=1)
    mid = 0.5 * (a + b)
    flip = np.einsum("ij,ij->i", normals, mid - centroids) < 0.0
    normals[flip] *= -1.0
    return b_edges, normals, lengths


def _build_quadrature(nodes, triangles, areas, b_edges, b_lengths) -> QuadratureRule:
    corners = nodes[triangles]  # (M, 3, 2)
    pts = np.einsum("ri,mic->mrc", _INTERIOR_BARY, corners)
    w = np.repeat(areas[:, None] / 3.0, 3, axis=1)
    a = nodes[b_edges[:, 0]]
    b = nodes[b_edges[:, 1]]
    bpts = np.stack(
        [
            _BOUNDARY_BARY[0, 0] * a + _BOUNDARY_BARY[0, 1] * b,
            _BOUNDARY_BARY[1, 0] * a + _BOUNDARY_BARY[1, 1] * b,
        ],
        axis=1,
    )
    bw = np.repeat(b_lengths[:, None] / 2.0, 2, axis=1)
    for arr in (pts, w, bpts, bw):
        arr.setflags(write=False)
    return QuadratureRule(
        interior_points=pts, interior_weights=w, interior_bary=_INTERIOR_BARY.copy(),
        boundary_points=bpts, boundary_weights=bw, boundary_bary=_BOUNDARY_BARY.copy(),
    )


def _angular_quarter(resolution: int) -> int:
    return int(math.ceil(0.5 * math.pi * resolution))


def _ring_point(r: float, k: int, n_angular: int) -> tuple[float, float]:
    t = 2.0 * math.pi * k / n_angular
    return (r * math.cos(t), r * math.sin(t))


def _polar_disk(radius: float, resolution: int):
    m = resolution
    n_a = 4 * _angular_quarter(resolution)
    nodes = [(0.0, 0.0)]
    for j in range(1, m + 1):
        r = radius * j / m
        for k in range(n_a):
            nodes.append(_ring_point(r, k, n_a))

    def idx(j, k):
        return 0 if j == 0 else 1 + (j - 1) * n_a + (k % n_a)

    tris = []
    for k in range(n_a):
        tris.append((0, idx(1, k), idx(1, k + 1)))
    for j in range(2, m + 1):
        for k in range(n_a):
            a, b, c, d = idx(j - 1, k), idx(j, k), idx(j, k + 1), idx(j - 1, k + 1)
            tris.append((a, b, c))
            tris.append((a, c, d))
    return np.array(nodes), np.array(tris)


def _polar_annulus(r_inner: float, r_outer: float, resolution: int):
    m = resolution
    n_a = 4 * _angular_quarter(resolution)
    radii = np.linspace(r_inner, r_outer, m + 1)
    nodes = []
    for r in radii:
        for k in range(n_a):
            nodes.append(_ring_point(r, k, n_a))

    def idx(j, k):
        return j * n_a + (k % n_a)

    tris = []
    for j in range(1, m + 1):
        for k in range(n_a):
            a, b, c, d = idx(j - 1, k), idx(j, k), idx(j, k + 1), idx(j - 1, k + 1)
            tris.append((a, b, c))
            tris.append((a, c, d))
    return np.array(nodes), np.array(tris)


def _four_lobe(r_small: float, r_large: float, resolution: int):
    # Small lobes occupy the angular quadrants [0, pi/2] and [pi, 3pi/2];
    # large lobes extend the mesh radially in the other two quadrants.
    m = resolution
    n_q = _angular_quarter(resolution)
    n_a = 4 * n_q
    dr = r_small / m
    m_ext = max(1, round((r_large - r_small) / dr))
    ext_radii = np.linspace(r_small, r_large, m_ext + 1)[1:]

    nodes = [(0.0, 0.0)]
    index: dict[tuple[int, int], int] = {}
    for j in range(1, m + 1):
        r = r_small * j / m
        for k in range(n_a):
            index[(j, k)] = len(nodes)
            nodes.append(_ring_point(r, k, n_a))
    ext_ks = list(range(n_q, 2 * n_q + 1)) + list(range(3 * n_q, 4 * n_q + 1))
    for jj, r in enumerate(ext_radii):
        j = m + 1 + jj
        for k in ext_ks:
            index[(j, k)] = len(nodes)
            nodes.append(_ring_point(r, k, n_a))

    def idx(j, k):
        if j == 0:
            return 0
        if j <= m:
            return index[(j, k % n_a)]
        return index[(j, k)]

    tris = []
    for k in range(n_a):
        tris.append((0, idx(1, k), idx(1, k + 1)))
    for j in range(2, m + 1):
        for k in range(n_a):
            a, b, c, d = idx(j - 1, k), idx(j, k), idx(j, k + 1), idx(j - 1, k + 1)
            tris.append((a, b, c))
            tris.append((a, c, d))
    for jj in range(len(ext_radii)):
        j = m + 1 + jj
        for k in list(range(n_q, 2 * n_q)) + list(range(3 * n_q, 4 * n_q)):
            a, b, c, d = idx(j - 1, k), idx(j, k), idx(j, k + 1), idx(j - 1, k + 1)
            tris.append((a, b, c))
            tris.append((a, c, d))
    return np.array(nodes), np.array(tris)


def build_domain(spec: DomainSpec) -> TriMesh:
    """Build the triangulation of the requested domain, barycenter-normalized."""
    spec.validate()
    if spec.kind == "disk":
        nodes, tris = _polar_disk(spec.radius, spec.resolution)
    elif spec.kind == "annulus":
        nodes, tris = _polar_annulus(spec.r_inner, spec.r_outer, spec.resolution)
    else:
        nodes, tris = _four_lobe(spec.r_small, spec.r_large, spec.resolution)
    mesh = TriMesh.from_arrays(nodes, tris)
    center = barycenter(mesh)
    if np.hypot(*center) > 0.0:
        mesh = mesh.translated(-center)
    residual = np.hypot(*barycenter(mesh))
    if residual > 1e-12 * mesh.diameter:
        raise DomainError(f"barycenter normalization failed (residual {residual:.3e})")
    return mesh


def barycenter(mesh: TriMesh) -> np.ndarray:
    """Lumped-mass weighted mean of the nodes."""
    return np.asarray(mesh.node_masses @ mesh.nodes / mesh.total_mass)


def interior_integral(mesh: TriMesh, integrand: Callable[[np.ndarray], np.ndarray]) -> float:
    """Integrate ``integrand(points)`` over the mesh with the interior rule."""
    pts = mesh.interior_points_flat()
    return float(mesh.interior_weights_flat() @ np.asarray(integrand(pts), dtype=float))


def boundary_integral(
    mesh: TriMesh, integrand: Callable[[np.ndarray, np.ndarray], np.ndarray]
) -> float:
    """Integrate ``integrand(points, outward_normals)`` over the polygonal boundary."""
    pts = mesh.boundary_points_flat()
    nrm = mesh.boundary_normals_flat()
    vals = np.asarray(integrand(pts, nrm), dtype=float)
    return float(mesh.boundary_weights_flat() @ vals)
