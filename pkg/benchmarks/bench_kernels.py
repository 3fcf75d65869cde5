"""Benchmark the compiled kernels against the interpreted fallback.

Usage: python3 benchmarks/bench_kernels.py [--robots N] [--steps K]
"""

import argparse
import time

from occlusim import _kernels
from occlusim._kernels import load_compiled, load_interpreted
from occlusim.constants import CAMERA_PERIOD_STEPS
from occlusim.perception import Perception
from occlusim.physics import Physics
from occlusim.sensors import SensorRig
from occlusim.world import World, load_env


def bench_backend(kernels, n_robots, steps):
    # sensors and physics call through the _kernels module namespace
    _kernels.render_all = kernels.render_all
    _kernels.ir_scan = kernels.ir_scan
    _kernels.step_world = kernels.step_world

    world = World(load_env("corner"), n_robots, seed=7)
    physics = Physics(world)
    rig = SensorRig(world)
    perception = Perception()

    t_render = t_physics = 0.0
    for step in range(steps):
        if step % CAMERA_PERIOD_STEPS == 0:
            t0 = time.perf_counter()
            rig.render(write_frames=False)
            ir = rig.read_ir()
            t_render += time.perf_counter() - t0
            perception.analyze(rig.colstats, ir)
        t0 = time.perf_counter()
        physics.step()
        t_physics += time.perf_counter() - t0
    renders = (steps + CAMERA_PERIOD_STEPS - 1) // CAMERA_PERIOD_STEPS
    return t_render / renders, t_physics / steps


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--robots", type=int, default=20)
    ap.add_argument("--steps", type=int, default=600)
    args = ap.parse_args()

    rows = []
    for name, loader in (("compiled", load_compiled), ("interpreted", load_interpreted)):
        try:
            kernels = loader()
        except ImportError as exc:
            print(f"{name}: unavailable ({exc})")
            continue
        render, physics = bench_backend(kernels, args.robots, args.steps)
        rows.append((name, render, physics))
        print(f"{name:12s} render {render * 1e3:8.3f} ms/frame   "
              f"physics {physics * 1e6:8.1f} us/step")

    if len(rows) == 2:
        print(f"{'speedup':12s} render {rows[1][1] / rows[0][1]:8.1f}x         "
              f"physics {rows[1][2] / rows[0][2]:8.1f}x")


if __name__ == "__main__":
    main()
