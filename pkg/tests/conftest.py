import sys
from pathlib import Path

import pytest

sys.path.append(str(Path(__file__).parent.parent / "src"))

from spectrum import MoleculeParams  # noqa: E402


@pytest.fixture(scope="session")
def h2():
    return MoleculeParams("H2", 4.7446, 1.4405, 7.5416e-3, 0.7416, provenance="external")


@pytest.fixture(scope="session")
def kappa_five():
    """alpha = 0.5, d = 1.5625: kappa = 2 sqrt(d) / alpha = 5 exactly at l = 0, N = 3."""
    return MoleculeParams("K5", 1.5625, 0.5, 1.0, 1.0)


@pytest.fixture(scope="session")
def shallow():
    """alpha = 4, d = 1: kappa = 0.5, nothing is bound."""
    return MoleculeParams("shallow", 1.0, 4.0, 1.0, 1.0)
