import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from avlab import dataio


@pytest.fixture(scope="session")
def scenarios():
    return dataio.builtin_scenarios()


@pytest.fixture(scope="session")
def scn_a(scenarios):
    return scenarios["A"]


@pytest.fixture(scope="session")
def scn_b(scenarios):
    return scenarios["B"]
