import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from twofluid.dynamics import NsmState
from twofluid.spectral import Grid, random_field

settings.register_profile(
    "default", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def grid2():
    return Grid(2, 16)


@pytest.fixture(scope="session")
def grid3():
    return Grid(3, 12)


def random_state(grid, seed, scale=1.0, k_band=None):
    rng = np.random.default_rng(seed)
    fields = [random_field(grid, rng, k_band=k_band) for _ in range(4)]
    return NsmState(0.0, *[scale * f for f in fields])


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
