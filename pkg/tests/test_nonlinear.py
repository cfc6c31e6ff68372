import math

import numpy as np
import pytest

from pressurelab import assemble_energy, assemble_gradient, builtin_pressure, extend_pressure, minimize_energy, quadrant_bump_pressure, rotation_functional
from pressurelab.nonlinear_solver import (
    StiffnessPreconditioner,
    deformation_gradients,
    identity_map,
    project_gradient,
    rigid_map,
    rigid_start,
    zero_average,
)


@pytest.fixture(scope="module")
def const_hat():
    return extend_pressure(builtin_pressure("constant", {"value": 0.1}), None, 1.1, 0.5)


@pytest.fixture(scope="module")
def bump_hat():
    return extend_pressure(quadrant_bump_pressure("strict"), None, 2.2, 1.0)


def test_identity_map_has_zero_energy(disk16, default_material, const_hat):
    y = identity_map(disk16)
    for eps in (0.0, 0.02, 0.08):
        assert abs(assemble_energy(disk16, default_material, const_hat, y, eps)) < 1e-14


def test_energy_at_rotations_equals_functional_difference(lobe16, default_material):
    bump = quadrant_bump_pressure("strict")
    hat = extend_pressure(bump, None, 2.2, 1.0)
    eps = 0.03
    ref = rotation_functional(lobe16, hat, 0.0)  # same quadrature as the energy reference term
    for alpha in (0.0, np.pi / 2, np.pi, 2.1):
        y = rigid_map(lobe16, alpha)
        e = assemble_energy(lobe16, default_material, hat, y, eps)
        expect = eps * (rotation_functional(lobe16, hat, alpha) - ref)
        assert abs(e - expect) <= 1e-12 * (1.0 + abs(expect))


def test_optimal_rotation_energy_zero(lobe16, default_material, bump_hat):
    # the bump vanishes on the body, so optimal rigid states cost nothing
    y = rigid_map(lobe16, np.pi)
    assert abs(assemble_energy(lobe16, default_material, bump_hat, y, 0.05)) < 1e-14


def test_rotated_rigid_state_costs_the_sweep_value(lobe16, default_material, bump_hat):
    eps = 0.05
    y = rigid_map(lobe16, np.pi / 2)
    e = assemble_energy(lobe16, default_material, bump_hat, y, eps)
    assert e > 0.0
    assert abs(e - eps * rotation_functional(lobe16, bump_hat, np.pi / 2)) < 1e-12


def test_energy_infinite_when_orientation_reverses(disk16, default_material, const_hat):
    y = identity_map(disk16).copy()
    y[:, 0] *= -1.0  # global reflection
    assert assemble_energy(disk16, default_material, const_hat, y, 0.01) == math.inf


def test_gradient_matches_finite_differences(disk16, weak_material, bump_hat):
    rng = np.random.default_rng(4)
    y = rigid_start(disk16, 0.4, 1e-3 * disk16.diameter, rng)
    eps = 0.05
    g = assemble_gradient(disk16, weak_material, bump_hat, y, eps)
    h = 1e-6
    for _ in range(20):
        d = zero_average(disk16, rng.normal(size=y.shape))
        d /= np.linalg.norm(d)
        ep = assemble_energy(disk16, weak_material, bump_hat, y + h * d, eps)
        em = assemble_energy(disk16, weak_material, bump_hat, y - h * d, eps)
        fd = (ep - em) / (2.0 * h)
        assert abs(float(np.sum(g * d)) - fd) <= 1e-5 * (1.0 + abs(fd))


def test_gradient_zero_at_unloaded_reference(disk16, default_material):
    zero_hat = builtin_pressure("zero")
    g = assemble_gradient(disk16, default_material, zero_hat, identity_map(disk16), 0.05)
    assert np.max(np.abs(g)) < 1e-13


def test_projection_removes_translation_component(disk16):
    rng = np.random.default_rng(8)
    g = rng.normal(size=(disk16.n_nodes, 2))
    p = project_gradient(disk16, g)
    # no net component along either constant-shift direction
    assert np.max(np.abs(p.sum(axis=0))) <= 1e-9 * disk16.n_nodes
    const = np.tile([1.7, -0.3], (disk16.n_nodes, 1))
    assert np.max(np.abs(project_gradient(disk16, const).sum(axis=0))) <= 1e-9 * disk16.n_nodes


def test_gradient_rejects_inadmissible_state(disk16, default_material, const_hat):
    y = identity_map(disk16).copy()
    y[:, 0] *= -1.0
    with pytest.raises(ValueError):
        assemble_gradient(disk16, default_material, const_hat, y, 0.01)


def test_minimize_recovers_rigid_state(disk16, default_material):
    zero_hat = builtin_pressure("zero")
    init = rigid_start(disk16, 0.7, 1e-3 * disk16.diameter, np.random.default_rng(5))
    fld, diag = minimize_energy(disk16, default_material, zero_hat, 0.05, init, grad_tol=1e-10)
    assert diag.energy <= 1e-12
    assert fld.admissible
    assert diag.converged


def test_minimize_benchmark_energy_window(disk16, default_material, const_hat):
    eps = 0.01
    init = rigid_start(disk16, 0.0, 1e-3 * disk16.diameter, np.random.default_rng(6))
    pre = StiffnessPreconditioner(disk16, default_material)
    fld, diag = minimize_energy(disk16, default_material, const_hat, eps, init,
                                grad_tol=1e-12, max_iter=4000, precond=pre)
    assert diag.converged
    assert -0.02 * eps ** 2 <= diag.energy < 0.0  # two-sided window around -pi p0^2/3 * eps^2
    assert abs(diag.energy / eps ** 2 + np.pi * 0.01 / 3.0) < 1e-3


def test_minimize_monotone_descent_and_admissibility(disk16, default_material, const_hat):
    init = rigid_start(disk16, 0.0, 1e-3 * disk16.diameter, np.random.default_rng(7))
    e0 = assemble_energy(disk16, default_material, const_hat, init, 0.05)
    fld, diag = minimize_energy(disk16, default_material, const_hat, 0.05, init,
                                grad_tol=1e-10, max_iter=500, record_history=True)
    assert diag.energy <= e0
    hist = np.array(diag.energy_history)
    assert np.all(np.diff(hist) <= 0.0)
    assert fld.admissible
    assert diag.admissibility_rejections >= 0


def test_minimize_rejects_inadmissible_init(disk16, default_material, const_hat):
    y = identity_map(disk16).copy()
    y[:, 0] *= -1.0
    with pytest.raises(ValueError):
        minimize_energy(disk16, default_material, const_hat, 0.01, y)


def test_zero_average_is_projection(disk16):
    rng = np.random.default_rng(9)
    y = rng.normal(size=(disk16.n_nodes, 2))
    z = zero_average(disk16, y)
    mean = disk16.node_masses @ z / disk16.total_mass
    assert np.max(np.abs(mean)) < 1e-14
    assert np.allclose(zero_average(disk16, z), z, atol=1e-14)


def test_rigid_start_is_admissible_on_thin_meshes(lobe16):
    y = rigid_start(lobe16, 1.0, 1e-3 * lobe16.diameter, np.random.default_rng(10))
    _, det = deformation_gradients(lobe16, y)
    assert np.all(det > 0.0)
    mean = lobe16.node_masses @ y / lobe16.total_mass
    assert np.max(np.abs(mean)) < 1e-12
