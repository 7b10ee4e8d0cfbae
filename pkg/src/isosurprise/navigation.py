"""Grid navigation: rasterise free space, A* search, fixed-step resampling
and route construction.

Random routes use numpy's PCG64 bit generator seeded with the route seed,
so identical (plan, mode, seed) always produce identical routes.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import EmptyGridError, NoPathError, OffGridError
from .geometry import FloorPlan, Point2, distance_to_segments, free_mask

DEFAULT_CELL_SIZE = 0.25
SQRT2 = math.sqrt(2.0)
_MOVES = (
    (0, 1, 1.0), (1, 0, 1.0), (0, -1, 1.0), (-1, 0, 1.0),
    (1, 1, SQRT2), (1, -1, SQRT2), (-1, 1, SQRT2), (-1, -1, SQRT2),
)


@dataclass(frozen=True, eq=False)
class NavGrid:
    """Occupancy grid; ``free[row, col]`` with row along +y, col along +x."""

    cell_size: float
    origin: Point2
    free: np.ndarray

    @property
    def height(self) -> int:
        return self.free.shape[0]

    @property
    def width(self) -> int:
        return self.free.shape[1]

    def center(self, row: int, col: int) -> Point2:
        return Point2(self.origin.x + (col + 0.5) * self.cell_size,
                      self.origin.y + (row + 0.5) * self.cell_size)

    def cell_of(self, p) -> tuple[int, int]:
        col = math.floor((p[0] - self.origin.x) / self.cell_size)
        row = math.floor((p[1] - self.origin.y) / self.cell_size)
        if not (0 <= row < self.height and 0 <= col < self.width):
            raise OffGridError(f"point {tuple(p)} is outside the grid")
        return row, col

    def free_cell_of(self, p) -> tuple[int, int]:
        cell = self.cell_of(p)
        if not self.free[cell]:
            raise OffGridError(f"point {tuple(p)} maps to blocked cell {cell}")
        return cell


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Samples along a path; ``arc_length[i]`` is the path distance of sample i."""

    samples: np.ndarray
    step_size: float
    arc_length: np.ndarray

    def __len__(self) -> int:
        return len(self.samples)


def rasterize(plan: FloorPlan, cell_size: float = DEFAULT_CELL_SIZE,
              clearance: float | None = None) -> NavGrid:
    """Mark cells whose centre is free space and more than ``clearance``
    (default half a cell) from every wall. Doors impose no clearance.

    The comparison is strict so that a zero-width wall lying exactly on a
    cell boundary never leaves free cells on both of its sides.
    """
    if not cell_size > 0:
        raise ValueError("cell_size must be positive")
    if clearance is None:
        clearance = cell_size / 2.0
    minx, miny, maxx, maxy = plan.bounds
    width = max(1, math.ceil((maxx - minx) / cell_size - 1e-9))
    height = max(1, math.ceil((maxy - miny) / cell_size - 1e-9))
    cols, rows = np.meshgrid(np.arange(width), np.arange(height))
    centers = np.column_stack([minx + (cols.ravel() + 0.5) * cell_size,
                               miny + (rows.ravel() + 0.5) * cell_size])
    free = free_mask(plan, centers)
    walls = plan.segment_array[~plan.is_door]
    idx = np.flatnonzero(free)
    if len(idx):
        free[idx] = distance_to_segments(centers[idx], walls) > clearance + 1e-9
    free = free.reshape(height, width)
    if not free.any():
        raise EmptyGridError(f"no free cell in plan {plan.name!r} at cell size {cell_size}")
    return NavGrid(float(cell_size), Point2(minx, miny), free)


def octile(a, b) -> float:
    dr, dc = abs(a[0] - b[0]), abs(a[1] - b[1])
    return (dr + dc) + (SQRT2 - 2.0) * min(dr, dc)


def grid_astar(free: np.ndarray, start: tuple[int, int], goal: tuple[int, int]):
    """A* over 8-connected cells without corner cutting.

    Returns ``(cells, cost)`` with cost in cell units, or raises
    :class:`NoPathError`.
    """
    h, w = free.shape
    grid = free.tolist()
    if not (grid[start[0]][start[1]] and grid[goal[0]][goal[1]]):
        raise OffGridError("start or goal cell is blocked")
    g = {start: 0.0}
    parent = {start: None}
    closed = set()
    counter = 0
    heap = [(octile(start, goal), counter, start)]
    while heap:
        _, _, cur = heapq.heappop(heap)
        if cur in closed:
            continue
        if cur == goal:
            break
        closed.add(cur)
        r, c = cur
        gc = g[cur]
        for dr, dc, cost in _MOVES:
            nr, nc = r + dr, c + dc
            if not (0 <= nr < h and 0 <= nc < w) or not grid[nr][nc]:
                continue
            if dr and dc and not (grid[r + dr][c] and grid[r][c + dc]):
                continue
            nxt = (nr, nc)
            ng = gc + cost
            if ng < g.get(nxt, math.inf):
                g[nxt] = ng
                parent[nxt] = cur
                counter += 1
                heapq.heappush(heap, (ng + octile(nxt, goal), counter, nxt))
    else:
        raise NoPathError(f"no path from cell {start} to cell {goal}")
    cells = []
    node = goal
    while node is not None:
        cells.append(node)
        node = parent[node]
    cells.reverse()
    return cells, g[goal]


def find_path(grid: NavGrid, start, goal) -> np.ndarray:
    """Cell-centre polyline from ``start`` to ``goal``, endpoints included."""
    s = grid.free_cell_of(start)
    t = grid.free_cell_of(goal)
    cells, _ = grid_astar(grid.free, s, t)
    centers = np.array([grid.center(r, c) for r, c in cells], dtype=float)
    start, goal = np.asarray(start, dtype=float), np.asarray(goal, dtype=float)
    # an endpoint already past its own cell centre would double back
    if len(centers) > 1 and np.dot(start - centers[0], centers[1] - centers[0]) > 0:
        centers = centers[1:]
    if len(centers) > 1 and np.dot(goal - centers[-1], centers[-2] - centers[-1]) > 0:
        centers = centers[:-1]
    return _dedupe(np.vstack([start, centers, goal]))


def _dedupe(poly: np.ndarray) -> np.ndarray:
    keep = np.ones(len(poly), dtype=bool)
    keep[1:] = np.any(np.diff(poly, axis=0) != 0, axis=1)
    return poly[keep]


def resample_path(polyline, step_size: float) -> Trajectory:
    """Samples every ``step_size`` meters of arc length, plus the exact end
    point when the length is not a whole number of steps."""
    poly = np.asarray(polyline, dtype=float).reshape(-1, 2)
    if len(poly) < 2:
        raise ValueError("polyline needs at least two points")
    if not step_size > 0:
        raise ValueError("step_size must be positive")
    poly = _dedupe(poly)
    if len(poly) == 1:
        return Trajectory(poly.copy(), float(step_size), np.zeros(1))
    seg = np.hypot(*np.diff(poly, axis=0).T)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    n_full = int(math.floor(total / step_size + 1e-9))
    s = step_size * np.arange(n_full + 1)
    if total - s[-1] > 1e-9:
        s = np.append(s, total)
    else:
        s[-1] = total
    samples = np.column_stack([np.interp(s, cum, poly[:, 0]), np.interp(s, cum, poly[:, 1])])
    # np.interp is exact at knots, so corner samples land on the corner
    return Trajectory(samples, float(step_size), s)


@dataclass(frozen=True)
class LeftToRight:
    pass


@dataclass(frozen=True)
class RandomGoals:
    seed: int = 0
    goal_count: int = 3


@dataclass(frozen=True)
class Explicit:
    waypoints: tuple


RouteMode = Union[LeftToRight, RandomGoals, Explicit]


def _column_anchor(grid: NavGrid, col: int) -> Point2:
    rows = np.flatnonzero(grid.free[:, col])
    return grid.center(int(rows[(len(rows) - 1) // 2]), col)


def _chain(grid: NavGrid, points: Sequence) -> np.ndarray:
    legs = [find_path(grid, a, b) for a, b in zip(points[:-1], points[1:])]
    return _dedupe(np.concatenate(legs, axis=0))


def make_route(plan: FloorPlan, mode: RouteMode, grid: NavGrid | None = None,
               cell_size: float = DEFAULT_CELL_SIZE) -> np.ndarray:
    """Build a route polyline through ``plan``.

    ``LeftToRight`` runs from the leftmost to the rightmost free column,
    each anchored at the median free cell of its column. ``RandomGoals``
    chains paths between uniformly drawn free cells. ``Explicit`` chains
    paths through the given waypoints.
    """
    if grid is None:
        grid = rasterize(plan, cell_size)
    if isinstance(mode, LeftToRight):
        cols = np.flatnonzero(grid.free.any(axis=0))
        return find_path(grid, _column_anchor(grid, cols[0]), _column_anchor(grid, cols[-1]))
    if isinstance(mode, RandomGoals):
        if mode.goal_count < 2:
            raise ValueError("goal_count must be at least 2")
        rng = np.random.Generator(np.random.PCG64(mode.seed))
        flat = np.flatnonzero(grid.free.ravel())
        picks = flat[rng.integers(0, len(flat), size=mode.goal_count)]
        goals = [grid.center(*divmod(int(k), grid.width)) for k in picks]
        return _chain(grid, goals)
    if isinstance(mode, Explicit):
        pts = [Point2(float(p[0]), float(p[1])) for p in mode.waypoints]
        if len(pts) < 2:
            raise ValueError("explicit routes need at least two waypoints")
        for p in pts:
            if not free_mask(plan, [p])[0]:
                raise OffGridError(f"waypoint {tuple(p)} is not in free space")
        return _chain(grid, pts)
    raise TypeError(f"unknown route mode {mode!r}")
