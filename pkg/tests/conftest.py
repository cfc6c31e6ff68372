import numpy as np
import pytest

from pressurelab import DomainSpec, MaterialModel, TriMesh, build_domain


@pytest.fixture(scope="session")
def disk16():
    return build_domain(DomainSpec.disk(1.0, 16))


@pytest.fixture(scope="session")
def disk32():
    return build_domain(DomainSpec.disk(1.0, 32))


@pytest.fixture(scope="session")
def annulus32():
    return build_domain(DomainSpec.annulus(1.0, 2.0, 32))


@pytest.fixture(scope="session")
def lobe16():
    return build_domain(DomainSpec.four_lobe(resolution=16))


@pytest.fixture(scope="session")
def lobe32():
    return build_domain(DomainSpec.four_lobe(resolution=32))


@pytest.fixture(scope="session")
def square_mesh():
    nodes = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    triangles = np.array([[0, 1, 2], [0, 2, 3]])
    return TriMesh.from_arrays(nodes, triangles)


@pytest.fixture(scope="session")
def default_material():
    return MaterialModel(c1=1.0, c2=1.0, p=2.0, q=2.0)


@pytest.fixture(scope="session")
def weak_material():
    return MaterialModel(c1=1.3, c2=0.7, p=1.5, q=1.5)
