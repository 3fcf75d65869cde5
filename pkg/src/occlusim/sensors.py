"""Sensor rig glue: synthetic cameras and the IR proximity ring.

Flattens world entities into primitive arrays for the kernels and reuses all
buffers across calls. Cameras see classed pixels (no RGB); IR sees everything
physical at 3 cm height, which excludes the intangible goal disc.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels
from .constants import (
    CAMERA_RESOLUTION, ColorClass, GOAL_HEIGHT, GOAL_RADIUS, IR_MAX_RANGE,
    N_CAMERAS, N_COLUMNS, OBJECT_HEIGHT, ROBOT_HEIGHT, ROBOT_RADIUS,
    WALL_HEIGHT,
)
from .world import World


def column_tables():
    """Per-global-column relative azimuth and axis-cosine for the 4-camera rig."""
    k = np.arange(N_COLUMNS)
    cam = k // CAMERA_RESOLUTION
    col = k % CAMERA_RESOLUTION
    u = (31.5 - col) / 32.0
    colang = cam * (math.pi / 2.0) + np.arctan(u)
    colcos = 1.0 / np.sqrt(1.0 + u * u)
    return colang, colcos


class SensorRig:
    """Renders camera frames and IR readings for every robot in one call."""

    def __init__(self, world: World):
        self.world = world
        n = world.n
        self.colang, self.colcos = column_tables()

        # circles: robots first, then the object disc (if any), goal last so
        # the IR scan can simply drop it
        self._has_obj_circle = bool(world.obj_is_circle)
        nc = n + (1 if self._has_obj_circle else 0) + 1
        self.ccx = np.zeros(nc)
        self.ccy = np.zeros(nc)
        self.ccr = np.zeros(nc)
        self.cch = np.zeros(nc)
        self.ccls = np.zeros(nc, dtype=np.uint8)
        self.cown = np.full(nc, -1, dtype=np.intc)
        self.cown[:n] = np.arange(n, dtype=np.intc)
        self.ccr[:n] = ROBOT_RADIUS
        self.cch[:n] = ROBOT_HEIGHT
        if self._has_obj_circle:
            self.ccr[n] = world.obj_r
            self.cch[n] = OBJECT_HEIGHT
            self.ccls[n] = ColorClass.OBJECT_RED
        self.ccx[-1], self.ccy[-1] = world.goal.x, world.goal.y
        self.ccr[-1] = GOAL_RADIUS
        self.cch[-1] = GOAL_HEIGHT
        self.ccls[-1] = ColorClass.GOAL_GREEN
        self.nc_cam = nc
        self.nc_ir = nc - 1

        # segments: arena boundary, interior wall edges, then object part edges
        segs = []
        a = world.arena
        corners = [(0.0, 0.0), (a, 0.0), (a, a), (0.0, a)]
        for i in range(4):
            segs.append((*corners[i], *corners[(i + 1) % 4], WALL_HEIGHT,
                         ColorClass.WALL_BLACK))
        # quad edges go clockwise: the renderer treats segments as one-sided
        # and quads are only ever seen from outside
        for rect in world.interior_walls:
            for i in range(4):
                x0, y0 = rect[(i + 1) % 4]
                x1, y1 = rect[i]
                segs.append((x0, y0, x1, y1, WALL_HEIGHT, ColorClass.WALL_BLACK))
        self._n_static_segs = len(segs)
        n_obj_segs = 0 if self._has_obj_circle else int(world.part_nv.sum())
        ns = len(segs) + n_obj_segs
        self.sx1 = np.zeros(ns)
        self.sy1 = np.zeros(ns)
        self.sx2 = np.zeros(ns)
        self.sy2 = np.zeros(ns)
        self.sh = np.full(ns, OBJECT_HEIGHT)
        self.scls = np.full(ns, ColorClass.OBJECT_RED, dtype=np.uint8)
        for i, (x0, y0, x1, y1, h, cls) in enumerate(segs):
            self.sx1[i], self.sy1[i] = x0, y0
            self.sx2[i], self.sy2[i] = x1, y1
            self.sh[i] = h
            self.scls[i] = cls
        self.ns = ns

        # output and kernel scratch buffers
        self.frames = np.zeros((n, N_CAMERAS, CAMERA_RESOLUTION,
                                CAMERA_RESOLUTION), dtype=np.uint8)
        self.colstats = np.zeros((n, N_COLUMNS, 6), dtype=np.int16)
        self.ir = np.zeros((n, 8))
        self._hit_t = np.zeros((N_COLUMNS, 16))
        self._hit_h = np.zeros((N_COLUMNS, 16))
        self._hit_c = np.zeros((N_COLUMNS, 16), dtype=np.uint8)
        self._hit_n = np.zeros(N_COLUMNS, dtype=np.intc)

    def _sync(self):
        w = self.world
        n = w.n
        self.ccx[:n] = w.rx
        self.ccy[:n] = w.ry
        np.copyto(self.ccls[:n],
                  np.where(w.robot_is_goal, np.uint8(ColorClass.GOAL_GREEN),
                           np.uint8(ColorClass.ROBOT_BLUE)))
        if self._has_obj_circle:
            self.ccx[n], self.ccy[n] = w.obj[0], w.obj[1]
        else:
            k = self._n_static_segs
            for part in w.object_world_parts():
                m = len(part)
                for i in range(m):
                    self.sx1[k], self.sy1[k] = part[(i + 1) % m]
                    self.sx2[k], self.sy2[k] = part[i]
                    k += 1

    def render(self, write_frames: bool = True) -> np.ndarray:
        """Fill and return the (n, 4, 64, 64) classed frames for all robots.

        colstats is always refreshed; with write_frames=False the pixel
        frames are skipped (the trial loop only consumes column stats).
        """
        self._sync()
        w = self.world
        _kernels.render_all(
            w.rx, w.ry, w.rth, w.n,
            self.ccx, self.ccy, self.ccr, self.cch, self.ccls, self.cown,
            self.nc_cam,
            self.sx1, self.sy1, self.sx2, self.sy2, self.sh, self.scls, self.ns,
            self.colang, self.colcos, self.frames, self.colstats,
            self._hit_t, self._hit_h, self._hit_c, self._hit_n,
            1 if write_frames else 0)
        return self.frames

    def read_ir(self) -> np.ndarray:
        """Fill and return the (n, 8) IR distances, capped at IR_MAX_RANGE."""
        self._sync()
        w = self.world
        _kernels.ir_scan(
            w.rx, w.ry, w.rth, w.n, ROBOT_RADIUS,
            self.ccx, self.ccy, self.ccr, self.cown, self.nc_ir,
            self.sx1, self.sy1, self.sx2, self.sy2, self.ns,
            IR_MAX_RANGE, self.ir)
        return self.ir


_GLYPHS = {ColorClass.FLOOR: ".", ColorClass.WALL_BLACK: "#",
           ColorClass.ROBOT_BLUE: "b", ColorClass.GOAL_GREEN: "g",
           ColorClass.OBJECT_RED: "r", ColorClass.SKY: " "}


def frame_ascii(frame: np.ndarray) -> str:
    """Human-readable dump of one 64x64 classed frame, for debugging."""
    return "\n".join("".join(_GLYPHS[ColorClass(v)] for v in row) for row in frame)
