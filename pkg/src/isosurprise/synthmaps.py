"""Generators for the synthetic evaluation maps.

Rooms are laid out left to right, centred on the x axis, each pair of
neighbours joined by one centred opening. With ``wall_thickness == 0``
interior walls are zero-width wall segments; with a positive thickness the
opening becomes a short passage through the wall and the boundary traces it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple

from .errors import ParamError
from .geometry import FloorPlan

KINDS = (
    "basicSimple",
    "alternating",
    "alternatingDoors",
    "alternatingSurprise",
    "alternatingSurpriseDoors",
)


def normalize_kind(kind: str) -> str:
    key = re.sub(r"[-_\s]", "", kind).lower()
    for k in KINDS:
        if k.lower() == key:
            return k
    raise ParamError(f"unknown synthetic map kind {kind!r}; expected one of {', '.join(KINDS)}")


@dataclass(frozen=True)
class SynthMapParams:
    kind: str = "alternatingDoors"
    room_count: int = 9
    small_room: tuple[float, float] = (4.0, 4.0)
    large_room: tuple[float, float] = (8.0, 8.0)
    surprise_room: tuple[float, float] = (16.0, 16.0)
    opening_width: float = 1.0
    wall_thickness: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", normalize_kind(self.kind))
        for name in ("small_room", "large_room", "surprise_room"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))

    @property
    def has_doors(self) -> bool:
        return self.kind.endswith("Doors")

    def room_sizes(self) -> list[tuple[float, float]]:
        """(width, depth) per room index."""
        n = self.room_count
        if self.kind == "basicSimple":
            return [self.small_room] * n
        sizes = [self.small_room if i % 2 == 0 else self.large_room for i in range(n)]
        if self.kind.startswith("alternatingSurprise"):
            sizes[n // 2] = self.surprise_room
        return sizes

    def check(self):
        problems = []
        if self.room_count < 3 or self.room_count % 2 == 0:
            problems.append("room_count must be odd and >= 3")
        sizes = self.room_sizes() if self.room_count >= 1 else []
        if any(w <= 0 or d <= 0 for w, d in sizes):
            problems.append("room dimensions must be positive")
        if sizes and not 0 < self.opening_width < min(d for _, d in sizes):
            problems.append("opening_width must be positive and below the smallest room depth")
        if self.wall_thickness < 0:
            problems.append("wall_thickness must be >= 0")
        if problems:
            raise ParamError("; ".join(problems))


class Room(NamedTuple):
    index: int
    x0: float
    x1: float
    y0: float
    y1: float

    @property
    def area(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)


def room_layout(params: SynthMapParams) -> list[Room]:
    params.check()
    rooms = []
    x = 0.0
    for i, (w, d) in enumerate(params.room_sizes()):
        rooms.append(Room(i, x, x + w, -d / 2.0, d / 2.0))
        x += w + params.wall_thickness
    return rooms


def _dedupe(points):
    out = []
    for p in points:
        if not out or out[-1] != p:
            out.append(p)
    if len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return out


def generate_synthetic(params: SynthMapParams | None = None, **overrides) -> FloorPlan:
    """Build the floor plan for ``params`` (keyword overrides allowed)."""
    if params is None:
        params = SynthMapParams(**overrides)
    elif overrides:
        params = SynthMapParams(**{**params.__dict__, **overrides})
    rooms = room_layout(params)
    half_o = params.opening_width / 2.0
    t = params.wall_thickness

    bottom = []
    for i, r in enumerate(rooms):
        bottom += [(r.x0, r.y0), (r.x1, r.y0)]
        if t > 0 and i + 1 < len(rooms):
            bottom += [(r.x1, -half_o), (rooms[i + 1].x0, -half_o)]
    top = []
    for i in range(len(rooms) - 1, -1, -1):
        r = rooms[i]
        top += [(r.x1, r.y1), (r.x0, r.y1)]
        if t > 0 and i > 0:
            top += [(r.x0, half_o), (rooms[i - 1].x1, half_o)]
    boundary = _dedupe(bottom + top)

    walls, doors = [], []
    for left, right in zip(rooms[:-1], rooms[1:]):
        xe = left.x1
        if t == 0:
            half_d = min(left.y1, right.y1)
            walls.append(((xe, half_o), (xe, half_d)))
            walls.append(((xe, -half_d), (xe, -half_o)))
        if params.has_doors:
            doors.append(((xe, -half_o), (xe, half_o)))

    name = params.kind[0].upper() + params.kind[1:]
    return FloorPlan(name, boundary, (), doors, walls)
