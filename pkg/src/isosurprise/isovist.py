"""Isovist polygon and measures from a ray fan."""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass
from enum import Enum

import numpy as np

from .geometry import Point2, RayFan, RayHit

DEFAULT_EDGE_TOLERANCE = 0.05

MEASURE_NAMES = (
    "area",
    "real_surface_perimeter",
    "occlusion",
    "mean",
    "variance",
    "skewness",
    "circularity",
)


class EdgeClass(str, Enum):
    REAL_SURFACE = "realSurface"
    OCCLUDING = "occluding"


@dataclass(frozen=True)
class SimplePolygon:
    vertices: tuple

    def as_array(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float).reshape(-1, 2)


@dataclass(frozen=True)
class IsovistMeasures:
    area: float
    real_surface_perimeter: float
    occlusion: float
    mean: float
    variance: float
    skewness: float
    circularity: float

    def as_tuple(self) -> tuple:
        return astuple(self)


def isovist_polygon(fan: RayFan) -> SimplePolygon:
    return SimplePolygon(tuple(Point2(float(x), float(y)) for x, y in fan.points))


def polygon_area(poly) -> float:
    """Absolute shoelace area of a :class:`SimplePolygon` or vertex array."""
    v = poly.as_array() if isinstance(poly, SimplePolygon) else np.asarray(poly, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return abs(0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)))


def _endpoints_touch(seg_a, seg_b, tolerance) -> np.ndarray:
    """Whether any endpoint of ``seg_a`` lies within ``tolerance`` of any
    endpoint of ``seg_b``; both ``(..., 2, 2)``."""
    d = seg_a[..., :, None, :] - seg_b[..., None, :, :]
    return (np.hypot(d[..., 0], d[..., 1]) <= tolerance).any(axis=(-1, -2))


def _point_segment_distance(p, seg) -> np.ndarray:
    """Distance from points ``(..., 2)`` to segments ``(..., 2, 2)``."""
    a, b = seg[..., 0, :], seg[..., 1, :]
    ab = b - a
    ap = p - a
    denom = (ab * ab).sum(axis=-1)
    t = np.clip((ap * ab).sum(axis=-1) / np.where(denom > 0, denom, 1.0), 0.0, 1.0)
    d = ap - t[..., None] * ab
    return np.hypot(d[..., 0], d[..., 1])


def _on_common_segment(pa, pb, segments, tolerance) -> np.ndarray:
    """Whether each pair of points ``pa[i]``, ``pb[i]`` lies within
    ``tolerance`` of one and the same segment from ``segments`` (M, 2, 2)."""
    da = _point_segment_distance(pa[:, None, :], segments[None])
    db = _point_segment_distance(pb[:, None, :], segments[None])
    return ((da <= tolerance) & (db <= tolerance)).any(axis=1)


def classify_edge(hit_a: RayHit, hit_b: RayHit, tolerance: float = DEFAULT_EDGE_TOLERANCE,
                  segments=None) -> EdgeClass:
    """Classify the polygon edge between two angularly adjacent hits.

    The edge runs along a real surface when both rays hit the same segment,
    two segments joined at a common endpoint, or when both hit points lie
    on one segment (all within ``tolerance``). The last case matters for
    rays that graze vertices and report a neighbouring segment. Only the
    two hit segments are searched unless the plan's ``segments`` array is
    given. Anything else is a line of sight past an occluding corner.
    """
    if hit_a.segment_id == hit_b.segment_id:
        return EdgeClass.REAL_SURFACE
    sa = np.array([hit_a.segment.a, hit_a.segment.b], dtype=float)
    sb = np.array([hit_b.segment.a, hit_b.segment.b], dtype=float)
    if _endpoints_touch(sa, sb, tolerance):
        return EdgeClass.REAL_SURFACE
    pool = np.stack([sa, sb]) if segments is None else np.asarray(segments, dtype=float)
    pa = np.asarray(hit_a.point, dtype=float)[None]
    pb = np.asarray(hit_b.point, dtype=float)[None]
    if _on_common_segment(pa, pb, pool, tolerance)[0]:
        return EdgeClass.REAL_SURFACE
    return EdgeClass.OCCLUDING


def edge_classes(fan: RayFan, tolerance: float = DEFAULT_EDGE_TOLERANCE) -> np.ndarray:
    """Boolean mask over polygon edges ``k -> k+1`` (cyclic); True = real surface."""
    ids = fan.segment_ids
    nxt = np.roll(ids, -1)
    real = ids == nxt
    diff = np.flatnonzero(~real)
    if len(diff):
        real[diff] = _endpoints_touch(fan.segments[ids[diff]], fan.segments[nxt[diff]], tolerance)
    rest = np.flatnonzero(~real)
    if len(rest):
        pts = fan.points
        real[rest] = _on_common_segment(pts[rest], pts[(rest + 1) % len(ids)],
                                        fan.segments, tolerance)
    return real


def isovist_measures(fan: RayFan, tolerance: float = DEFAULT_EDGE_TOLERANCE) -> IsovistMeasures:
    pts = fan.points
    edge_len = np.hypot(*(np.roll(pts, -1, axis=0) - pts).T)
    real = edge_classes(fan, tolerance)
    p = float(edge_len[real].sum())
    q = float(edge_len[~real].sum())
    area = polygon_area(pts)

    lengths = fan.lengths
    n = len(lengths)
    mean = float(lengths.sum() / n)
    dev = lengths - mean
    m2 = float((dev ** 2).sum() / n)
    m3 = float((dev ** 3).sum() / n)
    circ = (p + q) ** 2 / (4.0 * math.pi * area)
    return IsovistMeasures(area, p, q, mean, m2, m3, circ)
