import sys
from pathlib import Path

import pytest

SRC = Path(__file__).resolve().parent.parent / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))
sys.path.insert(0, str(Path(__file__).resolve().parent))

from macc import (  # noqa: E402
    AccessTopology,
    build_node_placement,
    derive_retrieve_array,
)

DATA_DIR = Path(__file__).resolve().parent / "data"


@pytest.fixture
def example1_topology() -> AccessTopology:
    """Five users over four cache nodes: {1,2}, {1,3}, {4}, {2}, {3}."""
    return AccessTopology(4, tuple(frozenset(s) for s in ({1, 2}, {1, 3}, {4}, {2}, {3})))


@pytest.fixture
def example1_retrieve(example1_topology):
    return derive_retrieve_array(build_node_placement(4, 2), example1_topology)


@pytest.fixture
def diagonal_retrieve():
    """3x3 star/null grid with stars on the diagonal (identity topology, t=1)."""
    top = AccessTopology(3, (frozenset({1}), frozenset({2}), frozenset({3})))
    return derive_retrieve_array(build_node_placement(3, 1), top)
