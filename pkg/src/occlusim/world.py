"""World state: arena, walls, object, goal and the robot swarm.

The World owns flat numpy arrays that the compiled kernels operate on
directly; higher-level modules only read/write through these arrays so a
trial stays allocation-free in the hot loop.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import geom
from .constants import (
    ARENA_SIZE, ColorClass, GOAL_RADIUS, OBJECT_MASS, ROBOT_RADIUS,
)
from .geom import ConfigError, Footprint, Pose, Vec2, build_footprint, shape_spec


@dataclass(frozen=True)
class WallSpec:
    """Interior wall given by its centerline and thickness."""

    x0: float
    y0: float
    x1: float
    y1: float
    thickness: float = 0.20

    def rect(self) -> np.ndarray:
        """CCW corner quad of the thick wall."""
        ax, ay, bx, by = self.x0, self.y0, self.x1, self.y1
        ex, ey = bx - ax, by - ay
        ln = math.hypot(ex, ey)
        if ln == 0.0:
            raise ConfigError("wall centerline has zero length")
        # outward half-thickness on each side of the centerline
        nx, ny = -ey / ln * self.thickness / 2.0, ex / ln * self.thickness / 2.0
        return np.array([
            [ax - nx, ay - ny],
            [bx - nx, by - ny],
            [bx + nx, by + ny],
            [ax + nx, ay + ny],
        ])


@dataclass(frozen=True)
class EnvConfig:
    name: str
    object_kind: str = "square"
    object_xy: tuple = (0.75, 0.75)
    goal_xy: tuple = (2.25, 2.25)
    walls: tuple = ()
    arena: float = ARENA_SIZE

    @classmethod
    def from_dict(cls, d: dict) -> "EnvConfig":
        walls = tuple(WallSpec(**w) for w in d.get("walls", ()))
        cfg = cls(
            name=d["name"],
            object_kind=d.get("object", {}).get("kind", "square"),
            object_xy=(d["object"]["x"], d["object"]["y"]),
            goal_xy=(d["goal"]["x"], d["goal"]["y"]),
            walls=walls,
            arena=d.get("arena", ARENA_SIZE),
        )
        cfg.validate()
        return cfg

    def with_object(self, kind: str) -> "EnvConfig":
        cfg = EnvConfig(self.name, kind, self.object_xy, self.goal_xy,
                        self.walls, self.arena)
        cfg.validate()
        return cfg

    def validate(self):
        shape_spec(self.object_kind)  # raises on unknown kind
        for x, y in (self.object_xy, self.goal_xy):
            if not (0.0 < x < self.arena and 0.0 < y < self.arena):
                raise ConfigError(f"{self.name}: point ({x}, {y}) outside arena")
        for w in self.walls:
            for px, py in w.rect():
                if not (-1e-9 <= px <= self.arena and -1e-9 <= py <= self.arena):
                    raise ConfigError(f"{self.name}: wall corner outside arena")


def load_env(name_or_path: str) -> EnvConfig:
    """Load an environment by bundled name or by JSON file path."""
    p = Path(name_or_path)
    if p.suffix == ".json" and p.exists():
        return EnvConfig.from_dict(json.loads(p.read_text()))
    ref = resources.files("occlusim") / "envs" / f"{name_or_path}.json"
    try:
        return EnvConfig.from_dict(json.loads(ref.read_text()))
    except FileNotFoundError:
        raise ConfigError(f"unknown environment: {name_or_path!r}") from None


def builtin_env_names() -> list:
    root = resources.files("occlusim") / "envs"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


# ---------------------------------------------------------------------------

def success_distance(fp: Footprint) -> float:
    """Distance between object and goal centers that counts as delivered.

    The whole footprint must plausibly sit on the goal disc: circumradius plus
    the goal radius with a 5 cm grace band.
    """
    return fp.circumradius() + GOAL_RADIUS + 0.05


_MAX_PART_VERTS = 4


class World:
    """Mutable simulation state for one trial."""

    def __init__(self, cfg: EnvConfig, n_robots: int, seed: int):
        if n_robots < 1:
            raise ConfigError("need at least one robot")
        self.cfg = cfg
        self.n = n_robots
        self.rng = np.random.default_rng(seed)
        self.arena = cfg.arena

        spec = shape_spec(cfg.object_kind)
        self.object_spec = spec
        self.footprint = build_footprint(spec)
        self.obj_inv_mass = 1.0 / OBJECT_MASS
        self.obj_inv_inertia = 1.0 / geom.footprint_inertia(self.footprint, OBJECT_MASS)
        self.success_dist = success_distance(self.footprint)

        self.goal = Vec2(*cfg.goal_xy)

        # object state: x, y, th, vx, vy, w
        self.obj = np.zeros(6)
        self.obj[0], self.obj[1] = cfg.object_xy
        if self.footprint.is_circle:
            self.obj_is_circle = 1
            self.obj_r = self.footprint.circle_radius
            self.parts = np.zeros((1, _MAX_PART_VERTS, 2))
            self.part_nv = np.zeros(1, dtype=np.intc)
            self.nparts = 0
        else:
            self.obj_is_circle = 0
            self.obj_r = 0.0
            plist = self.footprint.parts
            self.nparts = len(plist)
            self.parts = np.zeros((self.nparts, _MAX_PART_VERTS, 2))
            self.part_nv = np.zeros(self.nparts, dtype=np.intc)
            for i, part in enumerate(plist):
                k = len(part)
                if k > _MAX_PART_VERTS:
                    raise ConfigError("convex parts are limited to 4 vertices")
                self.parts[i, :k] = part
                self.part_nv[i] = k
        self.world_verts = np.zeros_like(self.parts)  # kernel scratch

        # walls: interior thick walls plus 4 boundary slabs, all CCW quads
        rects = [w.rect() for w in cfg.walls]
        a = cfg.arena
        t = 0.2  # boundary slab extends outward; only its inner face matters
        rects.append(np.array([[-t, -t], [a + t, -t], [a + t, 0.0], [-t, 0.0]]))
        rects.append(np.array([[-t, a], [a + t, a], [a + t, a + t], [-t, a + t]]))
        rects.append(np.array([[-t, 0.0], [0.0, 0.0], [0.0, a], [-t, a]]))
        rects.append(np.array([[a, 0.0], [a + t, 0.0], [a + t, a], [a, a]]))
        for r in rects:
            if geom.polygon_area(r) <= 0:
                raise ConfigError("wall quad must be CCW")
        self.walls = np.array(rects)
        self.nwalls = len(rects)
        self.interior_walls = self.walls[:len(cfg.walls)]

        # robots
        self.rx = np.zeros(n_robots)
        self.ry = np.zeros(n_robots)
        self.rth = np.zeros(n_robots)
        self.rvx = np.zeros(n_robots)
        self.rvy = np.zeros(n_robots)
        self.cmd_vl = np.zeros(n_robots)
        self.cmd_vr = np.zeros(n_robots)
        self.robot_is_goal = np.zeros(n_robots, dtype=bool)

        self.step_count = 0
        self._spawn_robots()

    # -- spawning ----------------------------------------------------------

    def _point_free(self, x: float, y: float, clearance: float) -> bool:
        a = self.arena
        if not (clearance <= x <= a - clearance and clearance <= y <= a - clearance):
            return False
        for rect in self.interior_walls:
            if geom._circle_poly_pen(x, y, clearance, rect) is not None:
                return False
        pose = Pose(Vec2(self.obj[0], self.obj[1]), self.obj[2])
        if self.footprint.contains_local(pose.to_local(Vec2(x, y)), tol=clearance):
            return False
        return True

    def _spawn_robots(self):
        """Uniform random collision-free poses; deterministic in the seed."""
        clearance = ROBOT_RADIUS + 0.02
        placed = 0
        guard = 0
        while placed < self.n:
            guard += 1
            if guard > 20000:
                raise ConfigError("could not place robots; arena too crowded")
            x, y = self.rng.uniform(0.0, self.arena, 2)
            if not self._point_free(x, y, clearance):
                continue
            d2 = (self.rx[:placed] - x) ** 2 + (self.ry[:placed] - y) ** 2
            if placed and d2.min() < (2 * ROBOT_RADIUS + 0.02) ** 2:
                continue
            self.rx[placed] = x
            self.ry[placed] = y
            self.rth[placed] = self.rng.uniform(-math.pi, math.pi)
            placed += 1

    # -- queries -----------------------------------------------------------

    @property
    def time(self) -> float:
        from .constants import DT
        return self.step_count * DT

    def object_pose(self) -> Pose:
        return Pose(Vec2(self.obj[0], self.obj[1]), self.obj[2])

    def object_goal_distance(self) -> float:
        return math.hypot(self.obj[0] - self.goal.x, self.obj[1] - self.goal.y)

    def is_success(self) -> bool:
        return self.object_goal_distance() < self.success_dist

    def object_world_parts(self) -> list:
        """Object convex parts in world coordinates (empty for the disc)."""
        if self.obj_is_circle:
            return []
        pose = self.object_pose()
        return [geom._transform_part(self.footprint.parts[i], pose)
                for i in range(self.nparts)]
