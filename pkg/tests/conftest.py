import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from billiards.configspace import Configuration
from billiards.geometry import SurfaceSpec, retract

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def random_config(surface: SurfaceSpec, n: int, rng: np.random.Generator) -> Configuration:
    """A random point of the open configuration space (reject near-collisions)."""
    while True:
        pts = [retract(surface, rng.normal(size=surface.dim)) for _ in range(n + 2)]
        chain = np.array(pts)
        if np.min(np.linalg.norm(np.diff(chain, axis=0), axis=1)) > 0.05 and np.linalg.norm(chain[0] - chain[-1]) > 0.05:
            return Configuration(surface, chain[0], chain[-1], chain[1:-1])


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
