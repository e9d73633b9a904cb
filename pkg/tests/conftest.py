import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from curvspec import geometry as geo

settings.register_profile("curvspec", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("curvspec")


@pytest.fixture(scope="session")
def right_isosceles():
    return geo.GeodesicTriangle(0.0, [[0, 0], [1, 0], [0, 1]])


@pytest.fixture(scope="session")
def obtuse_hyperbolic():
    return geo.GeodesicTriangle(-1.0, [[0, 0], [0.5, 0], [-0.2, 0.4]])


@pytest.fixture(scope="session")
def octant():
    return geo.triangle_from_angles([math.pi / 2] * 3, 1.0)


def rng(seed=0):
    return np.random.default_rng(seed)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = next((m for n, m in sys.modules.items() if n.endswith("test_acceptance")), None)
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
