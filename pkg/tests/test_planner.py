"""Planner tests against an independently built graph shortest-path oracle."""

import math

import numpy as np
import pytest
import shapely
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra
from shapely.geometry import Polygon, box

from occlusim.geom import OBJECT_KINDS, build_footprint, min_support_radius, shape_spec
from occlusim.planner import RESOLUTION, build_grid, min_travel_distance, shortest_path
from occlusim.world import World, builtin_env_names, load_env


def oracle_distance(cfg, clearance, res=RESOLUTION):
    """Shortest object-center path via shapely rasterization + csgraph."""
    n = int(round(cfg.arena / res))
    xs = (np.arange(n) + 0.5) * res
    gx, gy = np.meshgrid(xs, xs)
    pts = shapely.points(gx.ravel(), gy.ravel())
    # distance to the nearest obstacle surface: the arena boundary ring plus
    # the interior wall rectangles
    border = box(0.0, 0.0, cfg.arena, cfg.arena).exterior
    dist = shapely.distance(pts, border).reshape(n, n)
    for w in cfg.walls:
        dist = np.minimum(dist, shapely.distance(pts, Polygon(w.rect())).reshape(n, n))
    free = dist > clearance

    idx = -np.ones((n, n), dtype=np.int64)
    fy, fx = np.nonzero(free)
    idx[fy, fx] = np.arange(len(fy))
    rows, cols, costs = [], [], []
    for dy, dx in ((0, 1), (1, 0), (1, 1), (1, -1)):
        a = idx[max(0, -dy):n - max(0, dy), max(0, -dx):n - max(0, dx)]
        b = idx[max(0, dy):n - max(0, -dy), max(0, dx):n - max(0, -dx)]
        ok = (a >= 0) & (b >= 0)
        rows.append(a[ok])
        cols.append(b[ok])
        costs.append(np.full(ok.sum(), math.hypot(dy, dx) * res))
    m = len(fy)
    graph = coo_matrix((np.concatenate(costs),
                        (np.concatenate(rows), np.concatenate(cols))), shape=(m, m))

    def node(x, y):
        iy, ix = min(int(y / res), n - 1), min(int(x / res), n - 1)
        if idx[iy, ix] >= 0:
            return idx[iy, ix]
        j = np.argmin((fy - iy) ** 2 + (fx - ix) ** 2)
        return int(j)

    src = node(*cfg.object_xy)
    dst = node(*cfg.goal_xy)
    d = dijkstra(graph.tocsr(), directed=False, indices=src)[dst]
    return float(d)


def test_reference_is_straight_diagonal():
    cfg = load_env("reference")
    fp = build_footprint(shape_spec("square"))
    grid = build_grid(cfg, min_support_radius(fp))
    d, path = shortest_path(grid, cfg.object_xy, cfg.goal_xy)
    straight = math.dist(cfg.object_xy, cfg.goal_xy)
    assert d == pytest.approx(straight, rel=0.02)
    assert len(path) > 2


def test_corner_path_detours_around_wall():
    cfg = load_env("corner")
    fp = build_footprint(shape_spec("square"))
    grid = build_grid(cfg, min_support_radius(fp))
    d, path = shortest_path(grid, cfg.object_xy, cfg.goal_xy)
    straight = math.dist(cfg.object_xy, cfg.goal_xy)
    assert d > straight + 0.3
    # every waypoint clears the wall; the only route is over its top
    for x, y in path:
        assert not (1.4 <= x <= 1.6 and y <= 1.80)


def test_longer_clearance_never_shortens_path():
    cfg = load_env("corner")
    lengths = []
    for clearance in (0.05, 0.15, 0.25):
        grid = build_grid(cfg, clearance)
        d, _ = shortest_path(grid, cfg.object_xy, cfg.goal_xy)
        lengths.append(d)
    assert lengths[0] <= lengths[1] <= lengths[2]


def test_blocked_arena_is_unreachable():
    cfg = load_env("corner")
    from occlusim.world import EnvConfig
    cfg2 = EnvConfig.from_dict({
        "name": "sealed", "arena": 3.0,
        "object": {"kind": "square", "x": 0.75, "y": 1.5},
        "goal": {"x": 2.25, "y": 1.5},
        "walls": [{"x0": 1.5, "y0": 0.0, "x1": 1.5, "y1": 3.0, "thickness": 0.2}],
    })
    grid = build_grid(cfg2, 0.2)
    d, path = shortest_path(grid, cfg2.object_xy, cfg2.goal_xy)
    assert math.isinf(d) and path == []


@pytest.mark.parametrize("env", builtin_env_names())
@pytest.mark.parametrize("kind", OBJECT_KINDS)
def test_min_travel_distance_matches_oracle(env, kind):
    cfg = load_env(env).with_object(kind)
    world = World(cfg, 1, seed=0)
    mine = min_travel_distance(world)
    ref = oracle_distance(cfg, min_support_radius(world.footprint))
    assert mine == pytest.approx(ref, rel=0.01)
