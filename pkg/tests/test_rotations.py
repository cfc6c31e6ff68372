import numpy as np
import pytest

from pressurelab import builtin_pressure, el_residual, el_volume_form, find_optimal_rotations, quadrant_bump_pressure, rotation_functional, second_variation, strict_profile
from pressurelab.rotations import SmoothnessError, golden_section_min, rotation_functional_profile


@pytest.fixture(scope="module")
def strict_bump():
    return quadrant_bump_pressure("strict")


@pytest.fixture(scope="module")
def flat_bump():
    return quadrant_bump_pressure("flat")


def test_zero_pressure_zero_functional(disk16):
    zero = builtin_pressure("zero")
    for a in (0.0, 1.1, 5.0):
        assert rotation_functional(disk16, zero, a) == 0.0


def test_hydrostatic_on_disk_is_constant(disk32):
    # polar integration: int_0^1 r^2 dr * int_pi^2pi (-sin t) dt = 2/3
    hyd = builtin_pressure("hydrostatic", {"coefficient": 1.0})
    vals = [rotation_functional(disk32, hyd, a) for a in np.linspace(0, 2 * np.pi, 7)]
    assert np.max(np.abs(np.array(vals) - 2.0 / 3.0)) < 1e-3
    assert np.max(np.abs(np.diff(vals))) < 1e-3


def test_functional_matches_angular_sweep(lobe32, strict_bump):
    prof = strict_profile()
    alphas = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
    got = rotation_functional_profile(lobe32, strict_bump, alphas)
    want = prof.rotation_sweep_value(alphas)
    assert np.max(np.abs(got - want)) < 2e-3


def test_functional_periodicity(lobe16, strict_bump):
    for a in (0.3, 2.0):
        v1 = rotation_functional(lobe16, strict_bump, a)
        v2 = rotation_functional(lobe16, strict_bump, a + 2.0 * np.pi)
        assert abs(v1 - v2) <= 1e-14 * (1.0 + abs(v1))


def test_strict_optimal_rotations(lobe32, strict_bump):
    opt = find_optimal_rotations(lobe32, strict_bump, grid_n=1024)
    assert len(opt.arcs) == 0
    angles = sorted(opt.angles)
    assert len(angles) == 2
    assert abs(angles[0] - 0.0) < 1e-3 or abs(angles[0] - 2 * np.pi) < 1e-3
    assert abs(angles[1] - np.pi) < 1e-3
    assert opt.distance(0.0) < 1e-3 and opt.distance(np.pi) < 1e-3


def test_flat_optimal_arc_covers_quarter(lobe32, flat_bump):
    opt = find_optimal_rotations(lobe32, flat_bump, grid_n=1024)
    assert len(opt.arcs) >= 1
    for a in np.linspace(0.0, np.pi / 4, 9):
        assert opt.distance(a) <= 2.0 * opt.grid_step
    # the flat set also contains the symmetric arc [7pi/8, 5pi/4]
    for a in np.linspace(7 * np.pi / 8, 5 * np.pi / 4, 9):
        assert opt.distance(a) <= 2.0 * opt.grid_step
    # and stays away from the peak direction
    assert opt.distance(np.pi / 2) > 0.2


def test_constant_pressure_whole_circle(disk16):
    const = builtin_pressure("constant", {"value": 0.3})
    opt = find_optimal_rotations(disk16, const, grid_n=128)
    assert opt.arcs == ((0.0, 2.0 * np.pi),)
    assert opt.distance(1.234) == 0.0


def test_grid_floor_rejected(disk16):
    with pytest.raises(ValueError):
        find_optimal_rotations(disk16, builtin_pressure("zero"), grid_n=32)


def test_el_residual_constant_pressure(disk32):
    # the generator field is divergence free, so the residual closes exactly
    const = builtin_pressure("constant", {"value": 2.0})
    for a in (0.0, 0.7):
        assert abs(el_residual(disk32, const, a)) < 1e-12


def test_el_residual_vanishes_at_optima(lobe32, strict_bump):
    assert abs(el_residual(lobe32, strict_bump, 0.0)) < 1e-6
    assert abs(el_residual(lobe32, strict_bump, np.pi)) < 1e-6
    assert abs(el_volume_form(lobe32, strict_bump, 0.0)) < 1e-6


def test_el_boundary_matches_volume_form(lobe32, strict_bump):
    scale = strict_profile().angular_total
    for a in (0.4, 0.7, 2.0, 3.6):
        b = el_residual(lobe32, strict_bump, a)
        v = el_volume_form(lobe32, strict_bump, a)
        assert abs(b - v) <= 1e-3 * (abs(v) + scale)


def test_el_volume_form_is_sweep_derivative(lobe32, strict_bump):
    # d/dalpha of the sweep profile equals the interior residual form
    prof = strict_profile()
    a = 0.8
    v = el_volume_form(lobe32, strict_bump, a)
    assert abs(v - prof.angular_rate(a)) < 2e-3


def test_second_variation_zero_amplitude(lobe16, strict_bump):
    assert second_variation(lobe16, strict_bump, 0.9, a=0.0) == 0.0


def test_second_variation_quadratic_scaling(lobe16, strict_bump):
    v1 = second_variation(lobe16, strict_bump, 0.7, a=1.0)
    v2 = second_variation(lobe16, strict_bump, 0.7, a=2.0)
    assert abs(v2 - 4.0 * v1) <= 1e-12 * (1.0 + abs(v2))


def test_second_variation_vanishes_at_optima(lobe32, strict_bump):
    # the bump gradient vanishes on the whole boundary for this field
    for a in (0.0, np.pi):
        for amp in (0.5, 1.0, 2.0):
            assert abs(second_variation(lobe32, strict_bump, a, amp)) < 1e-12


def test_second_variation_nonnegative_at_optima(lobe32, flat_bump):
    opt = find_optimal_rotations(lobe32, flat_bump, grid_n=512)
    scale = 1.0 + abs(opt.min_value)
    for a0 in opt.sample_angles(per_arc=3):
        assert second_variation(lobe32, flat_bump, a0, 1.0) >= -1e-6 * scale
        assert abs(el_residual(lobe32, flat_bump, a0)) <= 1e-3 * scale


def test_second_variation_matches_sweep_curvature(lobe32, strict_bump):
    # independent oracle: second difference of the rotation functional
    a, h = 0.9, 1e-3
    fpp = (rotation_functional(lobe32, strict_bump, a + h)
           + rotation_functional(lobe32, strict_bump, a - h)
           - 2.0 * rotation_functional(lobe32, strict_bump, a)) / h ** 2
    sv = second_variation(lobe32, strict_bump, a, 1.0)
    assert abs(sv - fpp) <= 1e-3 * (1.0 + abs(fpp))


def test_second_variation_needs_smoothness(disk16):
    with pytest.raises(SmoothnessError):
        second_variation(disk16, builtin_pressure("hydrostatic", {"coefficient": 1.0}), 0.0, 1.0)


def test_optimal_set_attains_minimum(lobe32, flat_bump):
    opt = find_optimal_rotations(lobe32, flat_bump, grid_n=512)
    for a in opt.sample_angles(per_arc=4):
        v = rotation_functional(lobe32, flat_bump, a)
        assert v <= opt.min_value + opt.value_tolerance


def test_second_variation_matches_interior_form_with_hessian(lobe32, strict_bump):
    # interior oracle built from the finite-difference Hessian of the field
    import numpy as np
    from pressurelab.material import SKEW_GENERATOR, rotation

    a = 1.1
    R = rotation(a)
    pts = lobe32.interior_points_flat()
    w = lobe32.interior_weights_flat()
    rx = pts @ R.T
    g = strict_bump.gradient(rx)
    H = strict_bump.hessian(rx)
    jx = pts @ SKEW_GENERATOR.T
    rjx = jx @ R.T
    rjjx = (jx @ SKEW_GENERATOR.T) @ R.T
    first = np.einsum("ij,ij->i", g, rjjx)
    secnd = np.einsum("ij,ijk,ik->i", rjx, H, rjx)
    volume = float(w @ (first + secnd))
    boundary = second_variation(lobe32, strict_bump, a, 1.0)
    assert abs(volume - boundary) <= 1e-3 * (1.0 + abs(boundary))


def test_golden_section_helper():
    x, v = golden_section_min(lambda t: (t - 0.37) ** 2 + 1.0, -1.0, 1.0, tol=1e-12)
    assert abs(x - 0.37) < 1e-7
    assert abs(v - 1.0) < 1e-13
