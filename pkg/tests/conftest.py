import pytest

from mvcm.modelfile import load_bundled
from mvcm.scale import build_paper_lattice


@pytest.fixture(scope="session")
def scale():
    return build_paper_lattice()


@pytest.fixture(scope="session")
def L(scale):
    return scale.lattice


@pytest.fixture(scope="session")
def energy():
    return load_bundled("hybrid_energy.mvcm")


@pytest.fixture(scope="session")
def energy_neg():
    return load_bundled("hybrid_energy_neg.mvcm")
