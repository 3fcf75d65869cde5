"""Physics stepping glue around the compiled world-step kernel.

Model summary: robots are traction-limited velocity followers of their wheel
commands with kinematic heading; the object is a planar rigid body with dry
plus viscous ground friction (one robot cannot move it, two can); contacts
are frictionless and inelastic, solved with sequential impulses; residual
penetration is removed by a positional pass and stays under a millimeter.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .constants import (
    DT, OBJECT_STATIC_FRICTION, OBJECT_STATIC_TORQUE, OBJECT_VISCOUS_FRICTION,
    OBJECT_VISCOUS_TORQUE, ROBOT_MASS, ROBOT_PUSH_FORCE_MAX, ROBOT_RADIUS,
    WHEEL_SEPARATION, WHEEL_SPEED_MAX,
)
from .world import World

_CONTACT_CAP = 512

# per-step velocity change a robot's traction can deliver
ROBOT_DV_MAX = ROBOT_PUSH_FORCE_MAX * DT / ROBOT_MASS


class Physics:
    """Owns the contact scratch buffers and advances a World in 10 ms steps."""

    def __init__(self, world: World):
        self.world = world
        self._cia = np.zeros(_CONTACT_CAP, dtype=np.intc)
        self._cib = np.zeros(_CONTACT_CAP, dtype=np.intc)
        self._cpx = np.zeros(_CONTACT_CAP)
        self._cpy = np.zeros(_CONTACT_CAP)
        self._cnx = np.zeros(_CONTACT_CAP)
        self._cny = np.zeros(_CONTACT_CAP)
        self._cd = np.zeros(_CONTACT_CAP)
        self._cacc = np.zeros(_CONTACT_CAP)
        self._scratch = np.zeros(8)

    def step(self):
        w = self.world
        _kernels.step_world(
            w.n, w.rx, w.ry, w.rth, w.rvx, w.rvy,
            w.cmd_vl, w.cmd_vr,
            w.obj, w.obj_is_circle, w.obj_r,
            w.parts, w.part_nv, w.nparts, w.world_verts,
            w.walls, w.nwalls,
            DT, ROBOT_RADIUS, 1.0 / ROBOT_MASS, ROBOT_DV_MAX,
            w.obj_inv_mass, w.obj_inv_inertia,
            WHEEL_SEPARATION, WHEEL_SPEED_MAX,
            OBJECT_STATIC_FRICTION, OBJECT_VISCOUS_FRICTION,
            OBJECT_STATIC_TORQUE, OBJECT_VISCOUS_TORQUE,
            self._cia, self._cib, self._cpx, self._cpy,
            self._cnx, self._cny, self._cd, self._cacc, self._scratch)
        w.step_count += 1
