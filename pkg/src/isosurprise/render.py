"""SVG output: trajectory overviews and fingerprint crops."""

from __future__ import annotations

import string
import xml.etree.ElementTree as ET
from dataclasses import dataclass

import numpy as np

from .geometry import DEFAULT_MAX_RANGE, FloorPlan, cast_fan
from .surprise import SurpriseSeries

SVG_NS = "http://www.w3.org/2000/svg"
DOOR_COLOR = "#d9822b"


@dataclass(frozen=True)
class RenderOptions:
    feature: str | None = None  # None renders the combined series
    r_min: float = 0.05
    r_max: float = 0.6
    margin: float = 1.0
    pixels_per_meter: float = 20.0
    peaks: tuple = ()


@dataclass(frozen=True)
class Fingerprint:
    label: str
    step: int
    svg: str


def _num(v: float) -> str:
    s = f"{v:.4f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _pts(points) -> str:
    return " ".join(f"{_num(x)},{_num(y)}" for x, y in points)


class _Canvas:
    """World coordinates with +y up mapped onto SVG's +y down."""

    def __init__(self, x0, y0, x1, y1, ppm):
        self.flip = y0 + y1
        w, h = x1 - x0, y1 - y0
        self.root = ET.Element("svg", {
            "xmlns": SVG_NS,
            "version": "1.1",
            "width": _num(w * ppm),
            "height": _num(h * ppm),
            "viewBox": f"{_num(x0)} {_num(y0)} {_num(w)} {_num(h)}",
        })

    def xy(self, points):
        p = np.asarray(points, dtype=float).reshape(-1, 2)
        return np.column_stack([p[:, 0], self.flip - p[:, 1]])

    def add(self, tag, parent=None, **attrs):
        attrs = {k.replace("_", "-"): str(v) for k, v in attrs.items()}
        return ET.SubElement(self.root if parent is None else parent, tag, attrs)

    def polygon(self, points, parent=None, **attrs):
        return self.add("polygon", parent, points=_pts(self.xy(points)), **attrs)

    def polyline(self, points, parent=None, **attrs):
        return self.add("polyline", parent, points=_pts(self.xy(points)), **attrs)

    def line(self, a, b, parent=None, **attrs):
        (x1, y1), (x2, y2) = self.xy([a, b])
        return self.add("line", parent, x1=_num(x1), y1=_num(y1), x2=_num(x2), y2=_num(y2), **attrs)

    def circle(self, c, r, parent=None, **attrs):
        (cx, cy), = self.xy([c])
        return self.add("circle", parent, cx=_num(cx), cy=_num(cy), r=_num(r), **attrs)

    def text(self, c, label, parent=None, **attrs):
        (cx, cy), = self.xy([c])
        el = self.add("text", parent, x=_num(cx), y=_num(cy), **attrs)
        el.text = label
        return el

    def tostring(self) -> str:
        ET.indent(self.root)
        return ET.tostring(self.root, encoding="unicode") + "\n"


def _draw_plan(cv: _Canvas, plan: FloorPlan, segments=None, wall_width=0.08):
    g = cv.add("g", id="plan")
    if segments is None:
        cv.polygon(plan.boundary, g, fill="white", stroke="black", stroke_width=_num(wall_width))
        for poly in plan.obstacles:
            cv.polygon(poly, g, fill="#888888", stroke="black", stroke_width=_num(wall_width))
        for s in plan.walls:
            cv.line(s.a, s.b, g, stroke="black", stroke_width=_num(wall_width))
        segments = [(s.a, s.b, True) for s in plan.doors]
    for a, b, is_door in segments:
        cv.line(a, b, g, stroke=DOOR_COLOR if is_door else "black",
                stroke_width=_num(wall_width * (1.5 if is_door else 1.0)))


def _values(series, feature):
    if isinstance(series, SurpriseSeries):
        return series.combined if feature is None else series.per_feature[feature]
    return np.asarray(series, dtype=float).reshape(-1)


def surprise_radii(values, r_min=0.05, r_max=0.6) -> np.ndarray:
    """Linear map from ``[0, max(values)]`` onto ``[r_min, r_max]``."""
    v = np.asarray(values, dtype=float)
    top = v.max() if v.size else 0.0
    if not top > 0:
        return np.full(v.shape, r_min)
    return r_min + (r_max - r_min) * np.clip(v, 0.0, None) / top


def render_svg(plan: FloorPlan, trajectory, series, options: RenderOptions = RenderOptions()) -> str:
    """Floor plan with the trajectory and one circle per step sized by surprise."""
    samples = getattr(trajectory, "samples", trajectory)
    samples = np.asarray(samples, dtype=float).reshape(-1, 2)
    values = _values(series, options.feature)
    if len(values) != len(samples):
        raise ValueError(f"{len(values)} surprise values for {len(samples)} samples")
    x0, y0, x1, y1 = plan.bounds
    m = options.margin
    cv = _Canvas(x0 - m, y0 - m, x1 + m, y1 + m, options.pixels_per_meter)
    _draw_plan(cv, plan)
    if len(samples) > 1:
        cv.polyline(samples, id="trajectory", fill="none", stroke="#1f5fbf", stroke_width="0.05")
    g = cv.add("g", id="surprise", fill="#d62728", fill_opacity="0.55", stroke="none")
    for p, r in zip(samples, surprise_radii(values, options.r_min, options.r_max)):
        cv.circle(p, r, g)
    if options.peaks:
        lg = cv.add("g", id="peaks", font_size="1.2", font_family="sans-serif")
        for label, t in zip(peak_labels(len(options.peaks)), options.peaks):
            cv.text(samples[t] + np.array([0.4, 0.4]), label, lg)
    return cv.tostring()


def peak_labels(n: int) -> list[str]:
    """``A, B, ..., Z, AA, AB, ...``"""
    letters = string.ascii_uppercase
    out = []
    for i in range(n):
        label = ""
        i += 1
        while i:
            i, r = divmod(i - 1, 26)
            label = letters[r] + label
        out.append(label)
    return out


def clip_segment(a, b, x0, y0, x1, y1):
    """Liang-Barsky clip of segment ``ab`` to a box; None if outside."""
    ax, ay = a
    dx, dy = b[0] - ax, b[1] - ay
    t0, t1 = 0.0, 1.0
    for p, q in ((-dx, ax - x0), (dx, x1 - ax), (-dy, ay - y0), (dy, y1 - ay)):
        if p == 0:
            if q < 0:
                return None
            continue
        r = q / p
        if p < 0:
            t0 = max(t0, r)
        else:
            t1 = min(t1, r)
        if t0 > t1:
            return None
    return (ax + t0 * dx, ay + t0 * dy), (ax + t1 * dx, ay + t1 * dy)


def clip_polygon(points, x0, y0, x1, y1) -> np.ndarray:
    """Sutherland-Hodgman clip of a polygon to a box."""
    poly = [tuple(p) for p in np.asarray(points, dtype=float)]
    planes = (
        (lambda p: p[0] >= x0, lambda p, q: (x0, p[1] + (q[1] - p[1]) * (x0 - p[0]) / (q[0] - p[0]))),
        (lambda p: p[0] <= x1, lambda p, q: (x1, p[1] + (q[1] - p[1]) * (x1 - p[0]) / (q[0] - p[0]))),
        (lambda p: p[1] >= y0, lambda p, q: (p[0] + (q[0] - p[0]) * (y0 - p[1]) / (q[1] - p[1]), y0)),
        (lambda p: p[1] <= y1, lambda p, q: (p[0] + (q[0] - p[0]) * (y1 - p[1]) / (q[1] - p[1]), y1)),
    )
    for inside, cut in planes:
        if not poly:
            break
        out = []
        prev = poly[-1]
        for cur in poly:
            if inside(cur):
                if not inside(prev):
                    out.append(cut(prev, cur))
                out.append(cur)
            elif inside(prev):
                out.append(cut(prev, cur))
            prev = cur
        poly = out
    return np.asarray(poly, dtype=float).reshape(-1, 2)


def extract_fingerprints(plan: FloorPlan, trajectory, peaks, crop_size: float = 12.0,
                         ray_count: int = 360, max_range: float = DEFAULT_MAX_RANGE,
                         fans=None, pixels_per_meter: float = 40.0) -> list[Fingerprint]:
    """One square crop per peak, centred on the agent, with the clipped plan
    and the isovist polygon at that step. Labelled A, B, ... in step order."""
    samples = np.asarray(getattr(trajectory, "samples", trajectory), dtype=float).reshape(-1, 2)
    peaks = sorted(int(t) for t in peaks)
    for t in peaks:
        if not 0 <= t < len(samples):
            raise IndexError(f"peak {t} outside trajectory of length {len(samples)}")
    half = crop_size / 2.0
    out = []
    for label, t in zip(peak_labels(len(peaks)), peaks):
        c = samples[t]
        box = (c[0] - half, c[1] - half, c[0] + half, c[1] + half)
        fan = fans[t] if fans is not None else cast_fan(plan, c, ray_count, max_range)
        cv = _Canvas(*box, pixels_per_meter)
        cv.add("rect", x=_num(box[0]), y=_num(cv.flip - box[3]), width=_num(crop_size),
               height=_num(crop_size), fill="#f4f4f4")
        iso = clip_polygon(fan.points, *box)
        if len(iso) >= 3:
            cv.polygon(iso, id="isovist", fill="#9ecae1", fill_opacity="0.7", stroke="#3182bd",
                       stroke_width="0.03")
        clipped = []
        for seg, is_door in zip(plan.segment_array, plan.is_door):
            piece = clip_segment(seg[0], seg[1], *box)
            if piece is not None and piece[0] != piece[1]:
                clipped.append((piece[0], piece[1], bool(is_door)))
        _draw_plan(cv, plan, clipped)
        cv.circle(c, 0.2, id="agent", fill="#d62728", stroke="black", stroke_width="0.03")
        cv.text((box[0] + 0.3, box[3] - 1.0), label, id="label", font_size="1",
                font_family="sans-serif")
        out.append(Fingerprint(label, t, cv.tostring()))
    return out
