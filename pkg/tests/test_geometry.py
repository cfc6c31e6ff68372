import numpy as np
import pytest

from pressurelab import DomainSpec, TriMesh, barycenter, boundary_integral, build_domain, interior_integral
from pressurelab.geometry import DomainError, _four_lobe


def test_disk_area_close_to_analytic(disk32):
    assert abs(disk32.total_area - np.pi) / np.pi < 0.005


def test_annulus_area_close_to_analytic(annulus32):
    assert abs(annulus32.total_area - 3.0 * np.pi) / (3.0 * np.pi) < 0.005


def test_four_lobe_barycenter_vanishes_before_translation():
    # central symmetry of the construction
    nodes, tris = _four_lobe(1.0, 2.0, 12)
    raw = TriMesh.from_arrays(nodes, tris)
    assert np.hypot(*barycenter(raw)) <= 1e-12 * raw.diameter


def test_normalized_barycenter(disk32, annulus32, lobe16):
    for mesh in (disk32, annulus32, lobe16):
        assert np.hypot(*barycenter(mesh)) <= 1e-12 * mesh.diameter


def test_barycenter_translates_linearly(disk16):
    t = np.array([0.37, -1.2])
    shifted = disk16.translated(t)
    assert np.allclose(barycenter(shifted), t, atol=1e-12)


def test_unit_square_barycenter(square_mesh):
    # direct lumped-mass computation: masses (1/3, 1/6, 1/3, 1/6)
    assert np.allclose(barycenter(square_mesh), [0.5, 0.5], atol=1e-15)


def test_positive_orientation(disk32, annulus32, lobe32):
    for mesh in (disk32, annulus32, lobe32):
        assert np.all(mesh.areas > 0.0)


def test_boundary_normals_unit_and_outward(lobe16):
    norms = np.hypot(lobe16.boundary_normals[:, 0], lobe16.boundary_normals[:, 1])
    assert np.allclose(norms, 1.0, atol=1e-14)
    # outwardness: positive dot with the vector from the owning centroid to the edge midpoint
    edge_sets = [frozenset(e) for e in lobe16.boundary_edges.tolist()]
    owner_centroid = {}
    for tri in lobe16.triangles:
        t = tri.tolist()
        for pair in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
            owner_centroid[frozenset(pair)] = lobe16.nodes[t].mean(axis=0)
    mids = 0.5 * (lobe16.nodes[lobe16.boundary_edges[:, 0]] + lobe16.nodes[lobe16.boundary_edges[:, 1]])
    for k, key in enumerate(edge_sets):
        assert lobe16.boundary_normals[k] @ (mids[k] - owner_centroid[key]) > 0.0


def test_four_lobe_radii_by_quadrant(lobe16):
    theta = np.mod(np.arctan2(lobe16.nodes[:, 1], lobe16.nodes[:, 0]), 2 * np.pi)
    rho = np.hypot(lobe16.nodes[:, 0], lobe16.nodes[:, 1])
    assert rho.max() <= 2.0 + 1e-12
    # nodes beyond the small radius live in the closed large-lobe sectors
    eps = 1e-9
    outside = rho > 1.0 + 1e-12
    in_large = (((theta >= np.pi / 2 - eps) & (theta <= np.pi + eps))
                | (theta >= 3 * np.pi / 2 - eps) | (theta <= eps))
    assert np.all(in_large[outside])
    # both lobe radii are realized
    assert rho[outside].max() > 1.99
    small_interior = (theta > 0.1) & (theta < np.pi / 2 - 0.1)
    assert 0.99 < rho[small_interior].max() <= 1.0 + 1e-12


def test_perimeter_of_disk(disk32):
    per = boundary_integral(disk32, lambda p, n: np.ones(len(p)))
    assert abs(per - 2.0 * np.pi) / (2.0 * np.pi) < 0.01


def test_zero_integrand(disk16):
    assert boundary_integral(disk16, lambda p, n: np.zeros(len(p))) == 0.0


def test_normal_dot_position_gives_twice_area(disk32):
    val = boundary_integral(disk32, lambda p, n: np.einsum("ij,ij->i", p, n))
    two_area = interior_integral(disk32, lambda p: np.full(len(p), 2.0))
    assert abs(val - two_area) < 1e-12


@pytest.mark.parametrize("seed", range(10))
def test_divergence_closure_affine_fields(lobe16, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(2, 2))
    b = rng.normal(size=2)
    lhs = boundary_integral(lobe16, lambda p, n: np.einsum("ij,ij->i", p @ A.T + b, n))
    rhs = np.trace(A) * lobe16.total_area
    size = np.abs(A).sum() + np.abs(b).sum()
    assert abs(lhs - rhs) <= 1e-10 * (1.0 + size)


def test_refinement_improves_disk_area():
    errs = []
    for res in (16, 32, 64):
        mesh = build_domain(DomainSpec.disk(1.0, res))
        errs.append(abs(mesh.total_area - np.pi))
    assert errs[0] > errs[1] > errs[2]


def test_interior_rule_degree_two_exact(square_mesh):
    # exact integrals over the unit square
    got = interior_integral(square_mesh, lambda p: p[:, 0] ** 2)
    assert abs(got - 1.0 / 3.0) < 1e-14
    got = interior_integral(square_mesh, lambda p: p[:, 0] * p[:, 1])
    assert abs(got - 0.25) < 1e-14


def test_boundary_rule_degree_three_exact(square_mesh):
    # cubic along the bottom edge y = 0 only
    def f(p, n):
        on_bottom = np.isclose(p[:, 1], 0.0)
        return np.where(on_bottom, p[:, 0] ** 3, 0.0)

    assert abs(boundary_integral(square_mesh, f) - 0.25) < 1e-14


def test_quadrature_weights(disk16):
    q = disk16.quadrature
    assert np.all(q.interior_weights > 0.0)
    assert np.allclose(q.interior_weights.sum(axis=1), disk16.areas, rtol=1e-13)
    assert np.all(q.boundary_weights > 0.0)
    assert np.allclose(q.boundary_weights.sum(axis=1), disk16.boundary_lengths, rtol=1e-13)


def test_node_masses_sum_to_area(annulus32):
    assert abs(annulus32.total_mass - annulus32.total_area) < 1e-12


@pytest.mark.parametrize("bad", [
    DomainSpec.disk(-1.0, 16),
    DomainSpec.disk(1.0, 1),
    DomainSpec.annulus(2.0, 1.0, 16),
    DomainSpec.annulus(0.0, 1.0, 16),
    DomainSpec.four_lobe(2.0, 1.0, 16),
])
def test_invalid_specs_rejected(bad):
    with pytest.raises(DomainError):
        build_domain(bad)


def test_mesh_export_roundtrip_fields(disk16):
    doc = disk16.export_json()
    assert set(doc) == {"nodes", "triangles", "boundary_edges"}
    assert len(doc["nodes"]) == disk16.n_nodes
    assert len(doc["boundary_edges"]) == len(disk16.boundary_edges)
    rebuilt = TriMesh.from_arrays(np.array(doc["nodes"]), np.array(doc["triangles"]))
    assert abs(rebuilt.total_area - disk16.total_area) < 1e-12


def test_config_roundtrip():
    spec = DomainSpec.from_config({"kind": "annulus", "params": {"r_inner": 1.0, "r_outer": 2.0},
                                   "resolution": 8})
    mesh = build_domain(spec)
    assert mesh.n_nodes > 0
