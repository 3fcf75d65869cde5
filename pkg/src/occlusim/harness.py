"""Trial harness: runs sealed experiments and aggregates their results.

A trial is fully determined by (environment, controller mode, object kind,
robot count, seed). Physics runs at 100 Hz; cameras, IR and the controller
run every third step; the object trace is sampled at 10 Hz.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from .constants import CAMERA_PERIOD_STEPS, DT, TRACE_PERIOD_STEPS
from .controller import SwarmController, TeleopLeader
from .perception import Perception
from .physics import Physics
from .planner import build_grid, min_travel_distance, shortest_path
from .sensors import SensorRig
from .world import EnvConfig, World, load_env
from .geom import min_support_radius

TIME_LIMIT = 1200.0
MODES = ("proposed", "baseline", "teleop")


@dataclass
class TrialResult:
    env: str
    mode: str
    object_kind: str
    n_robots: int
    seed: int
    success: bool
    duration: float           # simulated seconds until success or timeout
    distance: float           # object path length, meters
    d_min: float              # ideal transport distance, meters
    trace: list = field(default_factory=list, repr=False)
    transitions: list = field(default_factory=list, repr=False)

    @property
    def path_efficiency(self):
        """d_min over driven distance; defined only for successful trials."""
        if not self.success or self.distance <= 0.0:
            return None
        return self.d_min / self.distance


def trial_seed(env: str, mode: str, kind: str, n_robots: int, index: int) -> int:
    key = f"{env}|{mode}|{kind}|{n_robots}|{index}"
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "big")


def run_trial(env: str | EnvConfig, n_robots: int, seed: int,
              mode: str = "proposed", object_kind: str | None = None,
              time_limit: float = TIME_LIMIT,
              record_trace: bool = False) -> TrialResult:
    if mode not in MODES:
        raise ValueError(f"unknown mode: {mode!r}")
    cfg = load_env(env) if isinstance(env, str) else env
    if object_kind is not None:
        cfg = cfg.with_object(object_kind)

    world = World(cfg, n_robots, seed=seed)
    physics = Physics(world)
    rig = SensorRig(world)
    perception = Perception()

    leader = None
    if mode == "teleop":
        if n_robots < 2:
            raise ValueError("teleop needs a leader and at least one pusher")
        clearance = min_support_radius(world.footprint)
        grid = build_grid(cfg, clearance)
        _, path = shortest_path(grid, cfg.object_xy, cfg.goal_xy)
        leader = TeleopLeader(world, path)
        controller = SwarmController(world, seed=seed + 1_000_003,
                                     proposed=False, robots=range(1, n_robots))
    else:
        controller = SwarmController(world, seed=seed + 1_000_003,
                                     proposed=(mode == "proposed"))

    # a trial ends once the object center is within success_dist of the goal
    # center, so the ideal distance stops at that boundary too
    d_min = max(min_travel_distance(world) - world.success_dist, 0.0)
    max_steps = int(round(time_limit / DT))
    distance = 0.0
    trace = [(0.0, world.obj[0], world.obj[1])]
    success = False
    prev_x, prev_y = world.obj[0], world.obj[1]

    for step in range(max_steps):
        if step % CAMERA_PERIOD_STEPS == 0:
            rig.render(write_frames=False)
            ir = rig.read_ir()
            percepts = perception.analyze(rig.colstats, ir)
            controller.tick(world.time, percepts, ir)
            if leader is not None:
                leader.tick()
        physics.step()
        distance += math.hypot(world.obj[0] - prev_x, world.obj[1] - prev_y)
        prev_x, prev_y = world.obj[0], world.obj[1]
        if record_trace and world.step_count % TRACE_PERIOD_STEPS == 0:
            trace.append((world.time, world.obj[0], world.obj[1]))
        if world.is_success():
            success = True
            break

    return TrialResult(
        env=cfg.name, mode=mode, object_kind=cfg.object_kind,
        n_robots=n_robots, seed=seed, success=success,
        duration=world.time, distance=distance, d_min=d_min,
        trace=trace if record_trace else [],
        transitions=list(controller.transitions))


# ---------------------------------------------------------------------------
# sweeps

@dataclass(frozen=True)
class Cell:
    env: str
    mode: str = "proposed"
    object_kind: str = "square"
    n_robots: int = 20


def _cell_trial(args):
    cell, index, time_limit = args
    seed = trial_seed(cell.env, cell.mode, cell.object_kind, cell.n_robots, index)
    return run_trial(cell.env, cell.n_robots, seed, mode=cell.mode,
                     object_kind=cell.object_kind, time_limit=time_limit)


def run_cell(cell: Cell, trials: int, time_limit: float = TIME_LIMIT,
             workers: int = 1, progress=None) -> list:
    """Run a cell's trials; each is seeded by its index, so the result list
    does not depend on the worker count."""
    jobs = [(cell, t, time_limit) for t in range(trials)]
    if workers <= 1:
        it = map(_cell_trial, jobs)
    else:
        import concurrent.futures as cf
        pool = cf.ProcessPoolExecutor(max_workers=workers)
        it = pool.map(_cell_trial, jobs)
    results = []
    for t, res in enumerate(it):
        results.append(res)
        if progress is not None:
            progress(cell, t, res)
    if workers > 1:
        pool.shutdown()
    return results


def summarize(results: list) -> dict:
    ok = [r for r in results if r.success]
    pes = [r.path_efficiency for r in ok if r.path_efficiency is not None]
    return {
        "trials": len(results),
        "successes": len(ok),
        "completion_rate": len(ok) / len(results) if results else 0.0,
        "mean_duration": float(np.mean([r.duration for r in ok])) if ok else None,
        "mean_path_efficiency": float(np.mean(pes)) if pes else None,
    }


def emit_results(results: list, out_dir: str | Path):
    """Write trials.jsonl, summary.csv and one trace CSV per traced trial."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "trials.jsonl", "w") as fh:
        for r in results:
            d = asdict(r)
            d.pop("trace")
            d.pop("transitions")
            d["path_efficiency"] = r.path_efficiency
            fh.write(json.dumps(d) + "\n")

    cells = {}
    for r in results:
        cells.setdefault((r.env, r.mode, r.object_kind, r.n_robots), []).append(r)
    with open(out / "summary.csv", "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["env", "mode", "object_kind", "n_robots", "trials",
                     "successes", "completion_rate", "mean_duration",
                     "mean_path_efficiency"])
        for key in sorted(cells):
            s = summarize(cells[key])
            wr.writerow([*key, s["trials"], s["successes"],
                         f"{s['completion_rate']:.3f}",
                         s["mean_duration"], s["mean_path_efficiency"]])

    traces = out / "traces"
    for r in results:
        if not r.trace:
            continue
        traces.mkdir(exist_ok=True)
        name = f"{r.env}_{r.mode}_{r.object_kind}_n{r.n_robots}_s{r.seed}.csv"
        with open(traces / name, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["t_seconds", "x_m", "y_m"])
            for t, x, y in r.trace:
                wr.writerow([f"{t:.1f}", f"{x:.4f}", f"{y:.4f}"])
