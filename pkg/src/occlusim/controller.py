"""Finite-state controller for occlusion-based cooperative pushing.

Each robot runs the same five-state machine on its own percepts:

  SEARCH       random walk until the object (and a goal) is found
  APPROACH     head for the object
  PUSH         drive into the object while no goal is in sight
  MOVE_AROUND  skirt the object surface until the goal disappears behind it
  BE_GOAL      stand still and present as a goal marker (proposed variant)

Pushing only while every goal is occluded by the object makes the pushed
contact points converge on the far side of the object from the goal, so the
object drifts toward it. BE_GOAL extends the idea around obstacles: a robot
that watched a goal disappear behind a wall parks there as a relay goal,
and a chain of such relays steers the object around the wall.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .constants import WHEEL_SEPARATION, WHEEL_SPEED_MAX
from .geom import wrap_angle
from .perception import Percepts

CRUISE_SPEED = 0.35
PUSH_SPEED = 0.50
WALK_PERIOD = 0.2           # seconds between random-walk heading perturbations
WALK_TURN = 0.2             # radians, uniform perturbation amplitude
AVOID_DIST = 0.08           # IR reading that triggers wall avoidance
STATE_TIMEOUT = 30.0        # max residence in PUSH
APPROACH_TIMEOUT = 10.0     # approaches and orbits are short or aborted sooner
DISSOLVE_MIN = 0.2          # relay stand-down debounce bounds, seconds
DISSOLVE_MAX = 0.8
RECEDE_FRACTION = 0.6       # span drop below this fraction of the peak reads
                            # as the object moving away from a relay
RECEDE_SPAN_MIN = 12        # peak columns before recession is trusted
CONVERT_COOLDOWN = 8.0      # seconds after a dissolve before re-parking
SEP_STALE_AFTER = 15.0      # a narrow joint sighting older than this no
                            # longer vetoes parking; the scene has moved on
STEER_GAIN = 3.0
ORBIT_BEARING = math.pi / 2 # keep the object abeam while moving around it
ORBIT_DIST = 0.07           # desired IR gap while orbiting
ORBIT_DIST_GAIN = 6.0


class FsmState(IntEnum):
    SEARCH = 1
    APPROACH = 2
    PUSH = 3
    MOVE_AROUND = 4
    BE_GOAL = 5


@dataclass
class RobotMind:
    """Per-robot controller memory."""

    state: FsmState = FsmState.SEARCH
    entered_t: float = 0.0
    saw_goal: bool = False          # goal sighted since last relay service
    latch_saw_both: bool = False    # object+goal seen together since last reset
    latch_gate_open: bool = False   # ... with >90 deg between their bearings
    last_sep: float = math.nan      # bearing separation at the last joint sighting
    last_sep_t: float = -math.inf   # when that joint sighting happened
    dissolve_patience: float = 0.0  # debounce before a relay stands down
    dissolve_since: float = math.nan
    clear_ticks: int = 0            # consecutive unblocked ticks while orbiting
    clear_need: int = 1
    span_peak: int = 0              # widest view of the object while a relay
    cooldown_until: float = 0.0     # no re-conversion before this time
    orbit_side: float = -1.0        # +1 object kept on the left, -1 on the right
    walk_turn: float = 0.0
    next_walk_t: float = 0.0


class SwarmController:
    """Drives all robots of a world; call tick() at the camera rate."""

    def __init__(self, world, seed: int, proposed: bool = True, robots=None):
        self.world = world
        self.proposed = proposed
        self.rng = np.random.default_rng(seed)
        self.indices = list(range(world.n)) if robots is None else list(robots)
        self.minds = {i: RobotMind() for i in self.indices}
        self.transitions: list = []  # (t, robot, from_state, to_state)

    # -- transition logic --------------------------------------------------

    def _switch(self, i: int, mind: RobotMind, to: FsmState, t: float):
        self.transitions.append((t, i, mind.state, to))
        if mind.state is FsmState.BE_GOAL and to is FsmState.SEARCH:
            # a dissolving relay gets a fresh geometric record but keeps its
            # goal memory: having served once, it may park again elsewhere
            mind.latch_saw_both = False
            mind.latch_gate_open = False
            mind.last_sep = math.nan
            mind.last_sep_t = -math.inf
            # walk clear before parking again, else a relay trapped on the
            # object's contact fringe re-parks each step and tows the
            # transport wherever it wanders
            mind.cooldown_until = t + CONVERT_COOLDOWN
        if to is FsmState.MOVE_AROUND:
            # orbit a randomized extra arc past the shadow edge so the
            # swarm's contact points spread over the whole far side
            mind.clear_ticks = 0
            mind.clear_need = int(self.rng.integers(1, 8))
        if to is FsmState.BE_GOAL:
            # randomized stand-down debounce: a pair of relays that spot each
            # other both want to dissolve, and the jitter picks one survivor
            # instead of letting them flicker in lockstep
            mind.dissolve_patience = self.rng.uniform(DISSOLVE_MIN, DISSOLVE_MAX)
            mind.dissolve_since = math.nan
            mind.span_peak = 0
        mind.state = to
        mind.entered_t = t
        self.world.robot_is_goal[i] = to is FsmState.BE_GOAL

    def _update_latches(self, mind, p: Percepts, i, t):
        if p.object_visible[i] and p.goal_visible[i]:
            mind.latch_saw_both = True
            theta = abs(wrap_angle(p.goal_bearing[i] - p.object_bearing[i]))
            mind.last_sep = theta
            mind.last_sep_t = t
            if theta > math.pi / 2.0:
                mind.latch_gate_open = True

    def _tick_search(self, i, mind, p: Percepts, t):
        if p.object_visible[i] and p.goal_visible[i]:
            mind.saw_goal = True
            self._switch(i, mind, FsmState.APPROACH, t)
            return
        if p.goal_visible[i]:
            mind.saw_goal = True
            return
        if (self.proposed and mind.saw_goal and not p.object_nearby[i]
                and t >= mind.cooldown_until
                and not (mind.last_sep <= math.pi / 2.0
                         and t - mind.last_sep_t < SEP_STALE_AFTER)):
            # every goal this robot has tracked is now hidden; park here as a
            # relay goal unless the last joint sighting of object and goal
            # was narrow, meaning the goal hides behind the object from here
            # and a relay light would pull the object the wrong way
            self._switch(i, mind, FsmState.BE_GOAL, t)

    def _tick_working(self, i, mind, p: Percepts, t):
        state = mind.state
        limit = STATE_TIMEOUT if state is FsmState.PUSH else APPROACH_TIMEOUT
        if not p.object_visible[i] or t - mind.entered_t > limit:
            self._switch(i, mind, FsmState.SEARCH, t)
            return
        blocked = p.goal_visible[i] or not p.free_space[i]
        if state is FsmState.APPROACH:
            if not p.goal_visible[i] and mind.last_sep > math.pi / 2.0:
                # the goal vanished well off the object's bearing, so a wall
                # hid it, not the object; stop closing in and re-search (a
                # relay-capable robot will park right here)
                self._switch(i, mind, FsmState.SEARCH, t)
                return
            if p.at_object[i]:
                self._switch(i, mind,
                             FsmState.MOVE_AROUND if blocked else FsmState.PUSH, t)
        elif state is FsmState.PUSH:
            if blocked:
                self._switch(i, mind, FsmState.MOVE_AROUND, t)
        elif state is FsmState.MOVE_AROUND:
            if blocked:
                mind.clear_ticks = 0
            else:
                mind.clear_ticks += 1
                if mind.clear_ticks >= mind.clear_need:
                    self._switch(i, mind, FsmState.PUSH, t)

    def _tick_be_goal(self, i, mind, p: Percepts, t):
        span = int(p.object_span[i])
        mind.span_peak = max(mind.span_peak, span)
        # a shrinking view of the object means it moved away: this relay got
        # left behind the transport front and its light now points backward
        receded = (mind.span_peak >= RECEDE_SPAN_MIN
                   and span < RECEDE_FRACTION * mind.span_peak)
        if p.goal_visible[i] or p.object_nearby[i] or receded:
            if math.isnan(mind.dissolve_since):
                mind.dissolve_since = t
            if t - mind.dissolve_since >= mind.dissolve_patience:
                self._switch(i, mind, FsmState.SEARCH, t)
        else:
            mind.dissolve_since = math.nan

    # -- behaviors ---------------------------------------------------------

    def _wheels(self, i, fwd: float, yaw: float):
        half = yaw * WHEEL_SEPARATION / 2.0
        w = self.world
        w.cmd_vl[i] = np.clip(fwd - half, -WHEEL_SPEED_MAX, WHEEL_SPEED_MAX)
        w.cmd_vr[i] = np.clip(fwd + half, -WHEEL_SPEED_MAX, WHEEL_SPEED_MAX)

    def _drive_search(self, i, mind, ir, t):
        front = min(ir[i, 0], ir[i, 1], ir[i, 7])
        if front < AVOID_DIST:
            # pivot away from the closer side
            if ir[i, 1] < ir[i, 7]:
                self._wheels(i, 0.0, -8.0)
            else:
                self._wheels(i, 0.0, 8.0)
            return
        if t >= mind.next_walk_t:
            mind.walk_turn = self.rng.uniform(-WALK_TURN, WALK_TURN)
            mind.next_walk_t = t + WALK_PERIOD
        self._wheels(i, CRUISE_SPEED, mind.walk_turn / WALK_PERIOD)

    def _drive_to_bearing(self, i, bearing: float, speed: float):
        if math.isnan(bearing):
            self._wheels(i, speed, 0.0)
            return
        self._wheels(i, speed, STEER_GAIN * bearing)

    def _drive_orbit(self, i, mind, p: Percepts, ir):
        side = mind.orbit_side
        bearing = p.object_bearing[i]
        if math.isnan(bearing):
            self._wheels(i, CRUISE_SPEED, 0.0)
            return
        err = wrap_angle(bearing - side * ORBIT_BEARING)
        sector = ir[i][np.abs((np.arange(8) * math.pi / 4 - bearing + math.pi)
                              % (2 * math.pi) - math.pi) <= math.pi / 4 + 1e-9]
        d = sector.min() if len(sector) else 0.3
        yaw = STEER_GAIN * err + side * ORBIT_DIST_GAIN * (d - ORBIT_DIST)
        self._wheels(i, CRUISE_SPEED, yaw)

    # -- main entry --------------------------------------------------------

    def tick(self, t: float, p: Percepts, ir: np.ndarray):
        for i in self.indices:
            mind = self.minds[i]
            self._update_latches(mind, p, i, t)
            state = mind.state
            if state is FsmState.SEARCH:
                self._tick_search(i, mind, p, t)
            elif state is FsmState.BE_GOAL:
                self._tick_be_goal(i, mind, p, t)
            else:
                self._tick_working(i, mind, p, t)

            state = mind.state
            if state is FsmState.SEARCH:
                self._drive_search(i, mind, ir, t)
            elif state is FsmState.APPROACH:
                self._drive_to_bearing(i, p.object_bearing[i], CRUISE_SPEED)
            elif state is FsmState.PUSH:
                self._drive_to_bearing(i, p.object_bearing[i], PUSH_SPEED)
            elif state is FsmState.MOVE_AROUND:
                if p.goal_visible[i] and not math.isnan(p.object_bearing[i]):
                    delta = wrap_angle(p.goal_bearing[i] - p.object_bearing[i])
                    # keep the previous direction when goal and object are
                    # nearly aligned, else the sign flips with pixel noise
                    # and the orbit jitters in place
                    if abs(delta) > 0.3:
                        mind.orbit_side = 1.0 if delta > 0 else -1.0
                self._drive_orbit(i, mind, p, ir)
            else:  # BE_GOAL
                self._wheels(i, 0.0, 0.0)


class TeleopLeader:
    """Single-robot transport: an operator-driven robot acts as the goal.

    The leader (robot 0) always presents as a goal marker and walks a planned
    waypoint path, staying a fixed lead ahead of the object's progress along
    it. When the object falls behind, the leader waits for the swarm to push
    it back within range. The operator has a global view, so the leader
    steers from true world coordinates instead of percepts.
    """

    LEAD = 0.50         # target lead along the path, meters
    MAX_GAP = 0.55      # wait for the object beyond this separation

    def __init__(self, world, path: list):
        if not path:
            raise ValueError("teleop needs a nonempty path")
        self.world = world
        self.path = np.asarray(path)
        seglen = np.hypot(*np.diff(self.path, axis=0).T)
        self.arc = np.concatenate([[0.0], np.cumsum(seglen)])
        world.robot_is_goal[0] = True
        # the operator places the leader on the route ahead of the object;
        # a random spawn could sit behind a wall it cannot path around
        j = int(np.searchsorted(self.arc, self.LEAD))
        x, y = self.path[min(j, len(self.path) - 1)]
        world.rx[0], world.ry[0] = x, y
        world.rth[0] = math.atan2(y - world.obj[1], x - world.obj[0])

    def _target(self) -> tuple:
        w = self.world
        d2 = (self.path[:, 0] - w.obj[0]) ** 2 + (self.path[:, 1] - w.obj[1]) ** 2
        s = self.arc[int(np.argmin(d2))] + self.LEAD
        j = int(np.searchsorted(self.arc, s))
        return tuple(self.path[min(j, len(self.path) - 1)])

    def tick(self):
        w = self.world
        tx, ty = self._target()
        dx, dy = tx - w.rx[0], ty - w.ry[0]
        gap = math.hypot(w.obj[0] - w.rx[0], w.obj[1] - w.ry[0])
        if gap > self.MAX_GAP or math.hypot(dx, dy) < 0.02:
            w.cmd_vl[0] = w.cmd_vr[0] = 0.0
            return
        err = wrap_angle(math.atan2(dy, dx) - w.rth[0])
        fwd = CRUISE_SPEED if abs(err) < 1.0 else 0.0
        half = STEER_GAIN * err * WHEEL_SEPARATION / 2.0
        w.cmd_vl[0] = np.clip(fwd - half, -WHEEL_SPEED_MAX, WHEEL_SPEED_MAX)
        w.cmd_vr[0] = np.clip(fwd + half, -WHEEL_SPEED_MAX, WHEEL_SPEED_MAX)
