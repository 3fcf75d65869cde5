"""Percept extraction from camera column stats and the IR ring.

Everything is batched over robots with numpy; a trial never loops over
robots in Python here. Bearings are relative to the robot heading in
(-pi, pi], derived as circular means of column azimuths weighted by the
class pixel count per column.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import IR_MAX_RANGE, N_COLUMNS
from .sensors import column_tables

# detection thresholds
VISIBLE_PIXELS = 3          # minimum class pixels across all columns
FREE_COLUMNS = 3            # columns with red and nothing blue beneath it
AT_OBJECT_DIST = 0.05       # IR distance that counts as touching the object
NEARBY_IR_DIST = 0.12       # IR distance that counts as next to the object
NEARBY_SPAN_COLS = 64       # red angular span that counts as next to it


@dataclass
class Percepts:
    """Per-robot percept arrays; bearings are NaN when the class is unseen."""

    object_visible: np.ndarray
    goal_visible: np.ndarray
    object_bearing: np.ndarray
    goal_bearing: np.ndarray
    free_space: np.ndarray
    at_object: np.ndarray
    object_nearby: np.ndarray
    object_span: np.ndarray


class Perception:
    def __init__(self):
        colang, _ = column_tables()
        self._cos = np.cos(colang)
        self._sin = np.sin(colang)
        self._sensor_angles = np.arange(8) * (np.pi / 4.0)

    def _bearing(self, weights: np.ndarray) -> np.ndarray:
        bx = weights @ self._cos
        by = weights @ self._sin
        with np.errstate(invalid="ignore"):
            bearing = np.arctan2(by, bx)
        bearing[(bx == 0) & (by == 0)] = np.nan
        return bearing

    def analyze(self, colstats: np.ndarray, ir: np.ndarray) -> Percepts:
        red = colstats[:, :, 0].astype(np.float64)
        blue = colstats[:, :, 1]
        green = colstats[:, :, 2].astype(np.float64)
        bottom_red = colstats[:, :, 4]
        bottom_blue = colstats[:, :, 5]

        object_visible = red.sum(axis=1) >= VISIBLE_PIXELS
        goal_visible = green.sum(axis=1) >= VISIBLE_PIXELS
        object_bearing = self._bearing(red)
        goal_bearing = self._bearing(green)

        # a column offers free pushing space when the object's base is the
        # lowest thing in it: red present and no robot pixel below the red
        free_cols = (bottom_red >= 0) & (bottom_blue < bottom_red)
        free_space = free_cols.sum(axis=1) >= FREE_COLUMNS

        # IR sector: the sensors within 45 degrees of the object bearing
        diff = self._sensor_angles[None, :] - object_bearing[:, None]
        diff = (diff + np.pi) % (2 * np.pi) - np.pi
        in_sector = np.abs(diff) <= (np.pi / 4.0 + 1e-9)
        sector_ir = np.where(in_sector, ir, IR_MAX_RANGE)
        sector_min = sector_ir.min(axis=1)
        sector_min = np.where(object_visible, sector_min, IR_MAX_RANGE)

        at_object = object_visible & (sector_min < AT_OBJECT_DIST)
        span = (red > 0).sum(axis=1)
        object_nearby = (sector_min < NEARBY_IR_DIST) | (span >= NEARBY_SPAN_COLS)
        return Percepts(object_visible, goal_visible, object_bearing,
                        goal_bearing, free_space, at_object, object_nearby,
                        span)
