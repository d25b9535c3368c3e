# tests/conftest.py

"""
Global pytest fixtures for testing.
Works with flat project structure - tqd modules in root directory.
"""

import sys
from pathlib import Path

import pytest
from dotenv import load_dotenv

# Add project root to Python path to ensure modules can be imported
project_root = Path(__file__).resolve().parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

from config import Settings
from denseq import CrossedProductModel, build_crossed_product
from lattice import Lattice, RegionLayout, build_lattice, make_layout
from secretshare import build_code_states
from stabilizer import StabilizerState, toric_ground_state

# Load .env file from project root
dotenv_path = project_root / ".env"

if dotenv_path.exists():
    load_dotenv(dotenv_path)
else:
    print(f"WARNING: .env file not found at {dotenv_path}")


@pytest.fixture(scope="session")
def settings() -> Settings:
    """Configuration from environment variables."""
    return Settings.from_env()


# ============================================================================
# Lattices and ground states
# ============================================================================

@pytest.fixture(scope="session")
def lattice8() -> Lattice:
    return build_lattice("torus", 8)


@pytest.fixture(scope="session")
def ground8(lattice8: Lattice) -> StabilizerState:
    """Toric-code ground state on the L=8 torus."""
    return toric_ground_state(lattice8)


@pytest.fixture(scope="session")
def layout8(lattice8: Lattice) -> RegionLayout:
    """Default two-blob layout on L=8."""
    return make_layout(lattice8, "two-blob")


@pytest.fixture(scope="session")
def code_states8(ground8: StabilizerState, layout8: RegionLayout):
    """The four charge classes dealt on L=8."""
    return build_code_states(ground8, layout8, min_separation=4)


@pytest.fixture(scope="session")
def lattice3() -> Lattice:
    """The largest torus the dense backend holds (18 qubits)."""
    return build_lattice("torus", 3)


@pytest.fixture(scope="session")
def ground3(lattice3: Lattice) -> StabilizerState:
    return toric_ground_state(lattice3)


@pytest.fixture(scope="session")
def layout3(lattice3: Lattice) -> RegionLayout:
    return make_layout(lattice3, "two-blob")


# ============================================================================
# Crossed product
# ============================================================================

@pytest.fixture(scope="session")
def crossed_product() -> CrossedProductModel:
    """d=2, k=2 finite crossed product (represented on 16 dimensions)."""
    return build_crossed_product(d=2, k=2)


@pytest.fixture(scope="session")
def crossed_product_k4() -> CrossedProductModel:
    """k=4 keeps a nontrivial commutant for the correction map."""
    return build_crossed_product(d=2, k=4)
