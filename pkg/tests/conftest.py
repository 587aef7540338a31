import pytest

from piezoharvest.beam import BeamGeometry, LayerSpec, SectionModel, section_properties

COPPER = LayerSpec(youngs_modulus=110e9, density=8960.0, thickness=1e-3)
PVDF = LayerSpec(youngs_modulus=1.2e9, density=1780.0, thickness=0.5e-3)


@pytest.fixture(scope="session")
def default_beam():
    return BeamGeometry(0.07, 0.02, COPPER, PVDF, piezo_start=0.0, piezo_length=0.02)


@pytest.fixture(scope="session")
def bilayer(default_beam):
    return section_properties(default_beam, SectionModel.UNIFORM_BILAYER)


@pytest.fixture(scope="session")
def bare(default_beam):
    return section_properties(default_beam, SectionModel.BARE_SUBSTRATE)
