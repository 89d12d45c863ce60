import sys
from pathlib import Path

import numpy as np
import pytest

# -------------------------------------------------
# Add PROJECT ROOT so the flat modules resolve
# -------------------------------------------------
PROJECT_ROOT = Path(__file__).resolve().parent.parent
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from bitcore import BitMatrix, BitVec  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def bv():
    return BitVec.from_string


@pytest.fixture
def saffron_example():
    """Two right nodes, three items, h = 2."""
    graph = BitMatrix.from_rows([[1, 1, 1], [0, 1, 1]])
    U = BitMatrix.from_rows([[0, 1, 1], [1, 0, 1]])
    return graph, U
