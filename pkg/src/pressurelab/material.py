"""Mixed-growth stored energy density for planar elasticity and its derivatives.

The density is

    W(F) = c1 * g(dist(F, SO(2)); p) + c2 * g(|det F - 1|; q),   det F > 0,

extended by +inf when det F <= 0.  Both penalty branches are quadratic below 1
and power-growth beyond, so W is C^1 everywhere on {det > 0} and C^2 wherever
both arguments stay below 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Half-width of the region around SO(2) where the distance penalty is exactly
# quadratic; beyond it the second derivative jumps for p < 2.
QUADRATIC_NEIGHBORHOOD_RADIUS = 1.0

SKEW_GENERATOR = np.array([[0.0, -1.0], [1.0, 0.0]])
SKEW_GENERATOR.setflags(write=False)


def rotation(alpha: float) -> np.ndarray:
    c, s = np.cos(alpha), np.sin(alpha)
    return np.array([[c, -s], [s, c]])


def wrap_angle(alpha: float) -> float:
    """Canonical representative in [0, 2*pi)."""
    out = float(np.mod(alpha, 2.0 * np.pi))
    return 0.0 if out >= 2.0 * np.pi else out


def angular_distance(a: float, b: float) -> float:
    """Intrinsic distance on the unit circle."""
    d = np.mod(a - b, 2.0 * np.pi)
    return float(min(d, 2.0 * np.pi - d))


@dataclass(frozen=True)
class MaterialModel:
    """Parameters (c1, c2, p, q) of the mixed-growth density."""

    c1: float = 1.0
    c2: float = 1.0
    p: float = 2.0
    q: float = 2.0

    def __post_init__(self):
        if not (self.c1 > 0 and self.c2 > 0):
            raise ValueError("stiffness constants c1, c2 must be positive")
        if not (1.0 < self.p <= 2.0):
            raise ValueError("growth exponent p must lie in (1, 2]")
        if not (1.0 <= self.q <= 2.0):
            raise ValueError("determinant exponent q must lie in [1, 2]")

    @classmethod
    def from_config(cls, section: dict) -> "MaterialModel":
        return cls(
            c1=float(section["c1"]), c2=float(section["c2"]),
            p=float(section["p"]), q=float(section["q"]),
        )


def g_mixed(t, r: float):
    """Quadratic-below-1 / r-growth-above-1 penalty; C^1 at the branch point."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("g_mixed requires a nonnegative argument")
    out = np.where(t <= 1.0, 0.5 * t * t, t ** r / r + 0.5 - 1.0 / r)
    return float(out) if out.ndim == 0 else out


def g_mixed_derivative(t, r: float):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("g_mixed requires a nonnegative argument")
    out = np.where(t <= 1.0, t, t ** (r - 1.0))
    return float(out) if out.ndim == 0 else out


def det2(F: np.ndarray):
    F = np.asarray(F, dtype=float)
    out = F[..., 0, 0] * F[..., 1, 1] - F[..., 0, 1] * F[..., 1, 0]
    return float(out) if out.ndim == 0 else out


def cof2(F: np.ndarray) -> np.ndarray:
    F = np.asarray(F, dtype=float)
    out = np.empty_like(F)
    out[..., 0, 0] = F[..., 1, 1]
    out[..., 0, 1] = -F[..., 1, 0]
    out[..., 1, 0] = -F[..., 0, 1]
    out[..., 1, 1] = F[..., 0, 0]
    return out


def _rotation_trace_amplitude(F: np.ndarray):
    """max_R tr(R^T F) over SO(2) equals hypot(F11+F22, F21-F12)."""
    a = F[..., 0, 0] + F[..., 1, 1]
    b = F[..., 1, 0] - F[..., 0, 1]
    return a, b, np.hypot(a, b)


def dist_so2(F: np.ndarray):
    """Frobenius distance from F to the rotation group, in closed form."""
    F = np.asarray(F, dtype=float)
    _, _, s = _rotation_trace_amplitude(F)
    sq = np.einsum("...ij,...ij->...", F, F) + 2.0 - 2.0 * s
    out = np.sqrt(np.maximum(sq, 0.0))
    return float(out) if out.ndim == 0 else out


def closest_rotation(F: np.ndarray) -> np.ndarray:
    """The rotation nearest to F; unique whenever tr F or the skew part is nonzero."""
    F = np.asarray(F, dtype=float)
    a, b, s = _rotation_trace_amplitude(F)
    if np.any(s == 0.0):
        raise ValueError("closest rotation is not unique for this matrix")
    c, d = a / s, b / s
    out = np.empty(np.shape(F))
    out[..., 0, 0] = c
    out[..., 0, 1] = -d
    out[..., 1, 0] = d
    out[..., 1, 1] = c
    return out


def energy_density(model: MaterialModel, F: np.ndarray):
    """Extended-valued density: +inf on orientation-reversing gradients."""
    F = np.asarray(F, dtype=float)
    det = det2(F)
    elastic = model.c1 * g_mixed(dist_so2(F), model.p)
    volumetric = model.c2 * g_mixed(np.abs(np.asarray(det) - 1.0), model.q)
    out = np.where(np.asarray(det) > 0.0, elastic + volumetric, np.inf)
    return float(out) if out.ndim == 0 else out


def stress(model: MaterialModel, F: np.ndarray) -> np.ndarray:
    """First derivative of the density on {det F > 0}."""
    F = np.asarray(F, dtype=float)
    det = np.asarray(det2(F))
    if np.any(det <= 0.0):
        raise ValueError("stress is defined only for orientation-preserving gradients")
    d = np.asarray(dist_so2(F))
    # g'(d)/d is 1 on the quadratic branch and d^(p-2) beyond; continuous at 1.
    h = np.where(d <= 1.0, 1.0, np.maximum(d, 1.0) ** (model.p - 2.0))
    R = closest_rotation(F)
    t = det - 1.0
    k = np.where(np.abs(t) <= 1.0, t, np.sign(t) * np.maximum(np.abs(t), 1.0) ** (model.q - 1.0))
    out = model.c1 * h[..., None, None] * (F - R) + model.c2 * k[..., None, None] * cof2(F)
    return out


def quadratic_form(model: MaterialModel, E: np.ndarray):
    """Hessian of the density at the identity applied to E: c1|sym E|^2 + c2 (tr E)^2."""
    E = np.asarray(E, dtype=float)
    sym = 0.5 * (E + np.swapaxes(E, -1, -2))
    tr = E[..., 0, 0] + E[..., 1, 1]
    out = model.c1 * np.einsum("...ij,...ij->...", sym, sym) + model.c2 * tr * tr
    return float(out) if out.ndim == 0 else out


def det_expansion(F: np.ndarray, eps: float):
    """det(I + eps*F) written as its exact degree-2 polynomial in eps."""
    F = np.asarray(F, dtype=float)
    tr = F[..., 0, 0] + F[..., 1, 1]
    out = 1.0 + eps * tr + eps * eps * np.asarray(det2(F))
    return float(out) if out.ndim == 0 else out
