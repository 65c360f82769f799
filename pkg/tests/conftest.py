# tests/conftest.py
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

# Add `src` to the Python path so tests run from a plain checkout
ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from hnets.algebra.groupkit import make_pauli_group  # noqa: E402
from hnets.sectors.sector_stats import build_lattice_model  # noqa: E402
from hnets.topology.poset_core import (build_circle_base, build_minimal_circle_base,  # noqa: E402
                                       build_minkowski2d_base, build_product_base)

settings.register_profile("hnets", derandomize=True, max_examples=25, deadline=None)
settings.load_profile("hnets")

FIXTURES = ROOT / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def circle6():
    return build_circle_base(6, 2)


@pytest.fixture(scope="session")
def circle8():
    return build_circle_base(8, 3)


@pytest.fixture(scope="session")
def mincircle():
    return build_minimal_circle_base()


@pytest.fixture(scope="session")
def torus(mincircle):
    return build_product_base(mincircle, mincircle)


@pytest.fixture(scope="session")
def cones():
    return build_minkowski2d_base(4, 4, 2)


@pytest.fixture(scope="session")
def pauli():
    return make_pauli_group()


@pytest.fixture(scope="session")
def lattice6():
    return build_lattice_model(6, 1)


@pytest.fixture
def rng():
    return np.random.default_rng(7)
