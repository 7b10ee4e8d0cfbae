import math

import pytest

from isosurprise.geometry import FloorPlan


def square(x0, y0, x1, y1):
    return [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]


def regular_polygon(n, r, cx=0.0, cy=0.0):
    return [(cx + r * math.cos(2 * math.pi * k / n), cy + r * math.sin(2 * math.pi * k / n))
            for k in range(n)]


@pytest.fixture
def room():
    return FloorPlan("room", square(0, 0, 10, 10))


@pytest.fixture
def room_with_pillar():
    return FloorPlan("pillar", square(0, 0, 10, 10), [square(6, 4, 8, 6)])


@pytest.fixture
def two_rooms_door():
    """Two 5x5 rooms side by side, split by a zero-width wall with a 1 m door."""
    return FloorPlan(
        "two-rooms",
        [(0, 0), (5, 0), (10, 0), (10, 5), (5, 5), (0, 5)],
        doors=[((5, 2), (5, 3))],
        walls=[((5, 0), (5, 2)), ((5, 3), (5, 5))],
    )
