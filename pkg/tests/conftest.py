import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from factorhd.codebook import generate_hierarchy

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# Filled by tests/test_acceptance.py, printed once at the end of the session.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_h():
    """F=3, M=10, one level, D=1024."""
    return generate_hierarchy(1024, 3, [10], seed=11)


@pytest.fixture(scope="session")
def deep_h():
    """F=2, two levels (4 x 3), D=2048."""
    return generate_hierarchy(2048, 2, [4, 3], seed=5)
