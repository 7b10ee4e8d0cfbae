"""Floor plans, map files and ray casting.

A floor plan is an outer boundary polygon, optional obstacle polygons,
optional free-standing wall segments and door segments. Doors block sight
like walls but do not block movement. Every ray query runs against the
plan's derived segment list, in this order: boundary edges, obstacle
edges, free walls, doors.

Angles are radians, counter-clockwise from the +x axis.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import NoHitError, ParseError, ValidationError

DEFAULT_MAX_RANGE = 1000.0
ON_SEGMENT_EPS = 1e-9
# slack on the segment parameter so rays through a shared vertex never leak
_PARAM_SLACK = 1e-12


class Point2(NamedTuple):
    x: float
    y: float


class Segment(NamedTuple):
    a: Point2
    b: Point2
    kind: str = "wall"

    @property
    def length(self) -> float:
        return math.hypot(self.b.x - self.a.x, self.b.y - self.a.y)


def _as_point(p) -> Point2:
    return Point2(float(p[0]), float(p[1]))


def signed_area(vertices) -> float:
    """Shoelace signed area; positive for counter-clockwise vertex order."""
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def polygon_edges(vertices) -> np.ndarray:
    v = np.asarray(vertices, dtype=float)
    return np.stack([v, np.roll(v, -1, axis=0)], axis=1)


@dataclass(frozen=True)
class FloorPlan:
    """Immutable, validated floor plan in meters.

    Orientation is normalised on construction: the boundary is stored
    counter-clockwise, obstacles clockwise. Construction raises
    :class:`ValidationError` listing every violated invariant.
    """

    name: str
    boundary: tuple
    obstacles: tuple = ()
    doors: tuple = ()
    walls: tuple = ()
    unit: str = field(default="m", init=False)

    def __post_init__(self):
        boundary = tuple(_as_point(p) for p in self.boundary)
        if len(boundary) >= 3 and signed_area(boundary) < 0:
            boundary = boundary[::-1]
        obstacles = []
        for poly in self.obstacles:
            poly = tuple(_as_point(p) for p in poly)
            if len(poly) >= 3 and signed_area(poly) > 0:
                poly = poly[::-1]
            obstacles.append(poly)
        doors = tuple(Segment(_as_point(s[0]), _as_point(s[1]), "door") for s in self.doors)
        walls = tuple(Segment(_as_point(s[0]), _as_point(s[1]), "wall") for s in self.walls)
        object.__setattr__(self, "boundary", boundary)
        object.__setattr__(self, "obstacles", tuple(obstacles))
        object.__setattr__(self, "doors", doors)
        object.__setattr__(self, "walls", walls)
        problems = validate_plan(self)
        if problems:
            raise ValidationError(problems)

    @cached_property
    def segments(self) -> tuple[Segment, ...]:
        segs = []
        for poly in (self.boundary, *self.obstacles):
            n = len(poly)
            segs.extend(Segment(poly[i], poly[(i + 1) % n], "wall") for i in range(n))
        segs.extend(self.walls)
        segs.extend(self.doors)
        return tuple(segs)

    @cached_property
    def segment_array(self) -> np.ndarray:
        """Derived segments as a read-only ``(M, 2, 2)`` array."""
        arr = np.array([[s.a, s.b] for s in self.segments], dtype=float).reshape(-1, 2, 2)
        arr.setflags(write=False)
        return arr

    @cached_property
    def is_door(self) -> np.ndarray:
        mask = np.array([s.kind == "door" for s in self.segments], dtype=bool)
        mask.setflags(write=False)
        return mask

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        b = np.asarray(self.boundary)
        return float(b[:, 0].min()), float(b[:, 1].min()), float(b[:, 0].max()), float(b[:, 1].max())

    def free_area(self) -> float:
        return abs(signed_area(self.boundary)) - sum(abs(signed_area(o)) for o in self.obstacles)


# --- predicates -------------------------------------------------------------

def _cross(ax, ay, bx, by):
    return ax * by - ay * bx


def segments_intersect(p1, p2, q1, q2) -> np.ndarray:
    """Closed segment intersection test, vectorised over leading axes."""
    p1, p2, q1, q2 = (np.asarray(a, dtype=float) for a in (p1, p2, q1, q2))

    def orient(a, b, c):
        return np.sign(_cross(b[..., 0] - a[..., 0], b[..., 1] - a[..., 1],
                              c[..., 0] - a[..., 0], c[..., 1] - a[..., 1]))

    def on_box(a, b, c):
        return ((np.minimum(a[..., 0], b[..., 0]) <= c[..., 0]) & (c[..., 0] <= np.maximum(a[..., 0], b[..., 0]))
                & (np.minimum(a[..., 1], b[..., 1]) <= c[..., 1]) & (c[..., 1] <= np.maximum(a[..., 1], b[..., 1])))

    d1 = orient(q1, q2, p1)
    d2 = orient(q1, q2, p2)
    d3 = orient(p1, p2, q1)
    d4 = orient(p1, p2, q2)
    proper = (d1 * d2 < 0) & (d3 * d4 < 0)
    touch = (((d1 == 0) & on_box(q1, q2, p1)) | ((d2 == 0) & on_box(q1, q2, p2))
             | ((d3 == 0) & on_box(p1, p2, q1)) | ((d4 == 0) & on_box(p1, p2, q2)))
    return proper | touch


def polygon_is_simple(vertices) -> bool:
    v = np.asarray(vertices, dtype=float)
    n = len(v)
    if n < 3 or not np.all(np.isfinite(v)):
        return False
    edges = polygon_edges(v)
    if np.any(np.hypot(*(edges[:, 1] - edges[:, 0]).T) == 0):
        return False
    if abs(signed_area(v)) == 0:
        return False
    i, j = np.triu_indices(n, k=1)
    # consecutive edges share exactly one vertex; skip them
    keep = (j - i != 1) & ~((i == 0) & (j == n - 1))
    i, j = i[keep], j[keep]
    if len(i) and np.any(segments_intersect(edges[i, 0], edges[i, 1], edges[j, 0], edges[j, 1])):
        return False
    # consecutive edges folding back onto each other
    a, b, c = v, np.roll(v, -1, axis=0), np.roll(v, -2, axis=0)
    ab, bc = b - a, c - b
    col = _cross(ab[:, 0], ab[:, 1], bc[:, 0], bc[:, 1]) == 0
    back = (ab * bc).sum(axis=1) < 0
    return not np.any(col & back)


def points_in_polygon(points, vertices) -> np.ndarray:
    """Even-odd rule. Points on edges may land on either side; callers that
    care exclude them with :func:`distance_to_segments`."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    v = np.asarray(vertices, dtype=float)
    x1, y1 = v[:, 0], v[:, 1]
    x2, y2 = np.roll(x1, -1), np.roll(y1, -1)
    px, py = pts[:, :1], pts[:, 1:2]
    straddle = (y1 > py) != (y2 > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
    crossings = straddle & (px < xint)
    return crossings.sum(axis=1) % 2 == 1


def distance_to_segments(points, segments, chunk: int = 4096) -> np.ndarray:
    """Minimum Euclidean distance from each point to any of ``segments``."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    segs = np.asarray(segments, dtype=float).reshape(-1, 2, 2)
    out = np.full(len(pts), np.inf)
    if len(segs) == 0:
        return out
    a = segs[:, 0]
    ab = segs[:, 1] - a
    ab2 = (ab * ab).sum(axis=1)
    step = max(1, chunk * 64 // max(len(segs), 1))
    for s in range(0, len(pts), step):
        p = pts[s:s + step, None, :]
        ap = p - a
        t = np.clip((ap * ab).sum(axis=2) / ab2, 0.0, 1.0)
        d = ap - t[..., None] * ab
        out[s:s + step] = np.sqrt((d * d).sum(axis=2)).min(axis=1)
    return out


def validate_plan(plan: FloorPlan) -> list[str]:
    problems = []
    b = np.asarray(plan.boundary, dtype=float).reshape(-1, 2)
    boundary_ok = len(b) >= 3 and np.all(np.isfinite(b)) and polygon_is_simple(b)
    if not boundary_ok:
        problems.append("boundary not simple")
    for k, poly in enumerate(plan.obstacles):
        o = np.asarray(poly, dtype=float).reshape(-1, 2)
        if not polygon_is_simple(o):
            problems.append(f"obstacle {k} not simple")
            continue
        if boundary_ok:
            be, oe = polygon_edges(b), polygon_edges(o)
            hits = segments_intersect(oe[:, None, 0], oe[:, None, 1], be[None, :, 0], be[None, :, 1])
            if not np.all(points_in_polygon(o, b)) or np.any(hits):
                problems.append(f"obstacle {k} not inside boundary")
    for label, segs in (("door", plan.doors), ("wall", plan.walls)):
        for k, s in enumerate(segs):
            pts = np.array([s.a, s.b], dtype=float)
            if not np.all(np.isfinite(pts)):
                problems.append(f"{label} {k} has non-finite coordinates")
                continue
            if s.a == s.b:
                problems.append(f"{label} {k} has zero length")
            if boundary_ok:
                on_edge = distance_to_segments(pts, polygon_edges(b)) <= ON_SEGMENT_EPS
                if not np.all(points_in_polygon(pts, b) | on_edge):
                    problems.append(f"{label} {k} endpoint outside boundary")
    return problems


def free_mask(plan: FloorPlan, points) -> np.ndarray:
    """Vectorised :func:`contains_free_point`."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    finite = np.all(np.isfinite(pts), axis=1)
    pts = np.where(finite[:, None], pts, 0.0)
    ok = finite & points_in_polygon(pts, plan.boundary)
    for poly in plan.obstacles:
        ok &= ~points_in_polygon(pts, poly)
    if np.any(ok):
        idx = np.flatnonzero(ok)
        ok[idx] = distance_to_segments(pts[idx], plan.segment_array) > ON_SEGMENT_EPS
    return ok


def contains_free_point(plan: FloorPlan, p) -> bool:
    """True iff ``p`` is inside the boundary, outside all obstacles and not
    on any segment."""
    return bool(free_mask(plan, [p])[0])


# --- ray casting ------------------------------------------------------------

@dataclass(frozen=True)
class RayHit:
    angle: float
    length: float
    point: Point2
    segment_id: int
    segment: Segment


@dataclass(frozen=True, eq=False)
class RayFan:
    """Hits of ``N`` rays at angles ``2*pi*k/N`` from ``origin``.

    Stored column-wise; :attr:`hits` materialises :class:`RayHit` objects.
    """

    origin: Point2
    angles: np.ndarray
    lengths: np.ndarray
    points: np.ndarray
    segment_ids: np.ndarray
    segments: np.ndarray

    @property
    def ray_count(self) -> int:
        return len(self.angles)

    @property
    def hits(self) -> list[RayHit]:
        return [self.hit(k) for k in range(self.ray_count)]

    def hit(self, k: int) -> RayHit:
        sid = int(self.segment_ids[k])
        seg = self.segments[sid]
        return RayHit(
            angle=float(self.angles[k]),
            length=float(self.lengths[k]),
            point=Point2(float(self.points[k, 0]), float(self.points[k, 1])),
            segment_id=sid,
            segment=Segment(Point2(*seg[0]), Point2(*seg[1])),
        )


def _nearest_hits(origin: np.ndarray, angles: np.ndarray, segs: np.ndarray):
    dx, dy = np.cos(angles)[:, None], np.sin(angles)[:, None]
    ax, ay = segs[:, 0, 0], segs[:, 0, 1]
    ex, ey = segs[:, 1, 0] - ax, segs[:, 1, 1] - ay
    wx, wy = ax - origin[0], ay - origin[1]
    den = dx * ey - dy * ex
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (wx * ey - wy * ex) / den
        u = (wx * dy - wy * dx) / den
    valid = (den != 0) & (t > 0) & (u >= -_PARAM_SLACK) & (u <= 1 + _PARAM_SLACK)
    t = np.where(valid, t, np.inf)
    # argmin returns the first minimum: ties go to the lower segment id
    ids = np.argmin(t, axis=1)
    dist = t[np.arange(len(angles)), ids]
    return dist, ids, dx[:, 0], dy[:, 0]


def _check_origin(plan: FloorPlan, origin) -> np.ndarray:
    o = np.asarray(origin, dtype=float)
    if o.shape != (2,) or not contains_free_point(plan, o):
        raise ValueError(f"origin {tuple(o.tolist())} is not in free space")
    return o


def cast_ray(plan: FloorPlan, origin, angle: float, max_range: float = DEFAULT_MAX_RANGE) -> RayHit:
    """Nearest intersection of one ray with any wall, boundary or door."""
    o = _check_origin(plan, origin)
    return _cast(plan, o, np.array([float(angle)]), max_range).hit(0)


def cast_fan(plan: FloorPlan, origin, ray_count: int = 360,
             max_range: float = DEFAULT_MAX_RANGE, chunk: int = 512) -> RayFan:
    """Cast ``ray_count`` evenly spaced rays starting at angle 0."""
    if int(ray_count) != ray_count or ray_count < 3:
        raise ValueError(f"ray_count must be an integer >= 3, got {ray_count}")
    o = _check_origin(plan, origin)
    angles = 2.0 * np.pi * np.arange(int(ray_count)) / int(ray_count)
    return _cast(plan, o, angles, max_range, chunk)


def _cast(plan, o, angles, max_range, chunk=512) -> RayFan:
    segs = plan.segment_array
    dist = np.empty(len(angles))
    ids = np.empty(len(angles), dtype=np.intp)
    dx = np.empty(len(angles))
    dy = np.empty(len(angles))
    for s in range(0, len(angles), chunk):
        sl = slice(s, s + chunk)
        dist[sl], ids[sl], dx[sl], dy[sl] = _nearest_hits(o, angles[sl], segs)
    miss = ~(dist <= max_range)
    if np.any(miss):
        raise NoHitError(float(angles[np.argmax(miss)]), tuple(o.tolist()))
    points = np.column_stack([o[0] + dist * dx, o[1] + dist * dy])
    return RayFan(Point2(float(o[0]), float(o[1])), angles, dist, points, ids, segs)


# --- map files --------------------------------------------------------------

def plan_to_dict(plan: FloorPlan) -> dict:
    d = {
        "name": plan.name,
        "unit": plan.unit,
        "boundary": [list(p) for p in plan.boundary],
        "obstacles": [[list(p) for p in poly] for poly in plan.obstacles],
        "doors": [[list(s.a), list(s.b)] for s in plan.doors],
    }
    if plan.walls:
        d["walls"] = [[list(s.a), list(s.b)] for s in plan.walls]
    return d


def plan_from_dict(d: dict) -> FloorPlan:
    if not isinstance(d, dict) or "boundary" not in d:
        raise ParseError("map document must be an object with a 'boundary' key")
    if d.get("unit", "m") != "m":
        raise ParseError(f"unsupported unit {d['unit']!r}; coordinates must be in meters")
    try:
        boundary = [_pair(p) for p in d["boundary"]]
        obstacles = [[_pair(p) for p in poly] for poly in d.get("obstacles", [])]
        doors = [_seg(s) for s in d.get("doors", [])]
        walls = [_seg(s) for s in d.get("walls", [])]
    except (TypeError, ValueError) as exc:
        raise ParseError(f"malformed coordinates: {exc}") from exc
    return FloorPlan(str(d.get("name", "")), boundary, obstacles, doors, walls)


def _pair(p) -> tuple[float, float]:
    if isinstance(p, (str, bytes)) or len(p) != 2:
        raise ValueError(f"expected [x, y], got {p!r}")
    return float(p[0]), float(p[1])


def _seg(s):
    if len(s) != 2:
        raise ValueError(f"expected [[x, y], [x, y]], got {s!r}")
    return _pair(s[0]), _pair(s[1])


def _block(items, pad: str, inner=json.dumps) -> str:
    if not items:
        return "[]"
    body = ",\n".join(pad + "  " + inner(it) for it in items)
    return "[\n" + body + "\n" + pad + "]"


def dumps_plan(plan: FloorPlan) -> str:
    """Map JSON with one point or segment per line."""
    fields = []
    for key, value in plan_to_dict(plan).items():
        if key == "obstacles":
            text = _block(value, "  ", lambda poly: _block(poly, "    "))
        elif isinstance(value, list):
            text = _block(value, "  ")
        else:
            text = json.dumps(value)
        fields.append(f"  {json.dumps(key)}: {text}")
    return "{\n" + ",\n".join(fields) + "\n}\n"


def save_floor_plan(plan: FloorPlan, path) -> None:
    Path(path).write_text(dumps_plan(plan), encoding="utf-8", newline="\n")


def load_floor_plan(path) -> FloorPlan:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return plan_from_dict(doc)


def load_waypoints(path) -> list[Point2]:
    """Read a JSON list of ``[x, y]`` pairs."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        return [Point2(*_pair(p)) for p in doc]
    except (json.JSONDecodeError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: {exc}") from exc


def translate_plan(plan: FloorPlan, dx: float, dy: float) -> FloorPlan:
    def mv(p):
        return (p[0] + dx, p[1] + dy)

    return FloorPlan(
        plan.name,
        [mv(p) for p in plan.boundary],
        [[mv(p) for p in poly] for poly in plan.obstacles],
        [(mv(s.a), mv(s.b)) for s in plan.doors],
        [(mv(s.a), mv(s.b)) for s in plan.walls],
    )
