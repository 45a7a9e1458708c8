import math

import pytest

from monopole_vortex import GAUGE_OFF, LaserModePair, LatitudeGrid, ground_pair


@pytest.fixture(scope="session")
def grid2048():
    return LatitudeGrid(2048)


@pytest.fixture(scope="session")
def grid512():
    return LatitudeGrid(512)


@pytest.fixture(scope="session")
def cn1_pair(grid2048):
    return ground_pair(LaserModePair(0, 1), grid2048)


@pytest.fixture(scope="session")
def gauge_off():
    return GAUGE_OFF


def angle_diff(a, b):
    """Smallest signed difference between two angles."""
    return (a - b + math.pi) % (2 * math.pi) - math.pi
