"""Grid planning: clearance-aware shortest paths across the arena.

Used for two things: the ideal transport distance d_min that normalizes path
efficiency, and the waypoint path a teleoperated leader follows. The grid is
1 cm; free cells keep at least the requested clearance from interior walls
and the arena boundary (exact point-to-rectangle distances), and paths are
8-connected Dijkstra with metric step costs.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .geom import ConfigError, min_support_radius
from .world import EnvConfig, World

RESOLUTION = 0.01

_STEPS = ((1, 0, 1.0), (-1, 0, 1.0), (0, 1, 1.0), (0, -1, 1.0),
          (1, 1, math.sqrt(2)), (1, -1, math.sqrt(2)),
          (-1, 1, math.sqrt(2)), (-1, -1, math.sqrt(2)))


@dataclass
class Grid:
    res: float
    free: np.ndarray  # (ny, nx) bool

    def cell(self, x: float, y: float) -> tuple:
        return (int(y / self.res), int(x / self.res))

    def center(self, iy: int, ix: int) -> tuple:
        return ((ix + 0.5) * self.res, (iy + 0.5) * self.res)


def _rect_distance(gx: np.ndarray, gy: np.ndarray, rect: np.ndarray) -> np.ndarray:
    """Exact euclidean distance from grid points to a convex quad (0 inside)."""
    dist = np.full(gx.shape, np.inf)
    inside = np.ones(gx.shape, dtype=bool)
    for i in range(4):
        ax, ay = rect[i]
        bx, by = rect[(i + 1) % 4]
        ex, ey = bx - ax, by - ay
        inside &= ex * (gy - ay) - ey * (gx - ax) >= 0
        t = np.clip(((gx - ax) * ex + (gy - ay) * ey) / (ex * ex + ey * ey), 0.0, 1.0)
        dist = np.minimum(dist, np.hypot(gx - (ax + t * ex), gy - (ay + t * ey)))
    return np.where(inside, 0.0, dist)


def build_grid(cfg: EnvConfig, clearance: float, res: float = RESOLUTION) -> Grid:
    n = int(round(cfg.arena / res))
    xs = (np.arange(n) + 0.5) * res
    gx, gy = np.meshgrid(xs, xs)
    dist = np.minimum.reduce([gx, gy, cfg.arena - gx, cfg.arena - gy])
    for w in cfg.walls:
        dist = np.minimum(dist, _rect_distance(gx, gy, w.rect()))
    return Grid(res, dist > clearance)


def _snap(grid: Grid, x: float, y: float) -> tuple:
    iy, ix = grid.cell(x, y)
    n = grid.free.shape[0]
    iy = min(max(iy, 0), n - 1)
    ix = min(max(ix, 0), n - 1)
    if grid.free[iy, ix]:
        return iy, ix
    free_iy, free_ix = np.nonzero(grid.free)
    if len(free_iy) == 0:
        raise ConfigError("no free cells at this clearance")
    d2 = (free_iy - iy) ** 2 + (free_ix - ix) ** 2
    j = int(np.argmin(d2))
    return int(free_iy[j]), int(free_ix[j])


def shortest_path(grid: Grid, start_xy: tuple, goal_xy: tuple):
    """(length_m, waypoints) of the metric 8-connected shortest path.

    Endpoints snap to the nearest free cell. Returns (inf, []) when the goal
    is unreachable.
    """
    start = _snap(grid, *start_xy)
    goal = _snap(grid, *goal_xy)
    ny, nx = grid.free.shape
    dist = np.full((ny, nx), np.inf)
    prev = np.full((ny, nx, 2), -1, dtype=np.int32)
    dist[start] = 0.0
    heap = [(0.0, start)]
    while heap:
        d, (iy, ix) = heapq.heappop(heap)
        if (iy, ix) == goal:
            break
        if d > dist[iy, ix]:
            continue
        for dy, dx, c in _STEPS:
            jy, jx = iy + dy, ix + dx
            if 0 <= jy < ny and 0 <= jx < nx and grid.free[jy, jx]:
                nd = d + c
                if nd < dist[jy, jx]:
                    dist[jy, jx] = nd
                    prev[jy, jx] = (iy, ix)
                    heapq.heappush(heap, (nd, (jy, jx)))
    if not np.isfinite(dist[goal]):
        return math.inf, []
    path = []
    cur = goal
    while cur != start:
        path.append(grid.center(*cur))
        cur = tuple(prev[cur])
    path.append(grid.center(*start))
    path.reverse()
    return float(dist[goal] * grid.res), path


def min_travel_distance(world: World) -> float:
    """Ideal transport distance: shortest object-center path to the goal.

    Clearance is the footprint's minimum support radius: the closest its
    center can pass to a wall under the most favorable orientation. The
    result therefore lower-bounds any physically driven trajectory.
    """
    clearance = min_support_radius(world.footprint)
    grid = build_grid(world.cfg, clearance)
    d, _ = shortest_path(grid, (world.cfg.object_xy), world.cfg.goal_xy)
    return d
