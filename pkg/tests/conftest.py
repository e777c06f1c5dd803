import numpy as np
import pytest

from lahmc.core import TargetModel
from lahmc.targets import AnisotropicGaussian, RoughWell


class Flat(TargetModel):
    """Zero energy everywhere: the free particle."""

    def __init__(self, dim=2):
        self.dim = dim

    def energy(self, x):
        x = self._check_dim(x)
        return np.zeros(x.shape[:-1])

    def gradient(self, x):
        return np.zeros_like(self._check_dim(x))


@pytest.fixture
def rng():
    return np.random.default_rng(20140621)


@pytest.fixture
def std_normal():
    return AnisotropicGaussian([1.0])


@pytest.fixture
def flat():
    return Flat(2)


# small, well-conditioned problems where leapfrog roundoff stays near machine precision
def well_conditioned_targets():
    return [
        AnisotropicGaussian([1.0]),
        AnisotropicGaussian([1.0, 4.0]),
        AnisotropicGaussian([0.8, 2.0, 9.0]),
        RoughWell(100.0, 2.0),
        RoughWell(5.0, 3.0, dim=3),
    ]


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
