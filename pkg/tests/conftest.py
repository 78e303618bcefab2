"""
Test configuration and fixtures.
"""
import pytest
import sys
from pathlib import Path

import numpy as np

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from core.params import Configuration, SphericalParams  # noqa: E402
from planar.schemas import PlanarParams  # noqa: E402

DATA_DIR = project_root / "data"


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long conservation and acceptance runs (deselect with -m 'not slow')")


@pytest.fixture
def rng():
    """Seeded generator; every test gets the same stream."""
    return np.random.default_rng(12345)


@pytest.fixture
def case_I_params():
    """One ball outside a fixed sphere with R = 2, r = 1 (eps = 1/3, delta = 2)."""
    return SphericalParams(
        configuration=Configuration.I, R=2.0, r=1.0, masses=[1.0], inertias=[0.4], A=2.0, B=3.0, C=4.0
    )


@pytest.fixture
def case_III_params():
    """One ball shell with 2r = 3R, so that eps = -1."""
    return SphericalParams(
        configuration=Configuration.III, R=1.0, r=1.5, masses=[1.0], inertias=[0.9], A=2.0, B=3.0, C=4.0
    )


@pytest.fixture
def case_II_params():
    """Two balls inside a fixed sphere with R = 5, r = 1."""
    return SphericalParams(
        configuration=Configuration.II, R=5.0, r=1.0, masses=[1.0, 1.5], inertias=[0.4, 0.6], A=6.0, B=7.0, C=8.0
    )


@pytest.fixture
def symmetric_params():
    """Axisymmetric sphere B = C with A > C, one ball in case I."""
    return SphericalParams(
        configuration=Configuration.I, R=2.0, r=1.0, masses=[1.0], inertias=[0.4], A=3.0, B=1.0, C=1.0
    )


@pytest.fixture
def planar_params():
    """Plane on three equal balls."""
    return PlanarParams(m=2.0, I=1.5, r=0.5, masses=[1.0, 1.0, 1.0], inertias=[0.1, 0.1, 0.1])


@pytest.fixture
def data_dir():
    return DATA_DIR
