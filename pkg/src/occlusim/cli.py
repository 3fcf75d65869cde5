"""Command line front end: single trials, sweeps and planning queries."""

from __future__ import annotations

import json
import sys

import click

from .geom import OBJECT_KINDS
from .harness import MODES, Cell, emit_results, run_cell, run_trial, summarize, trial_seed
from .planner import min_travel_distance
from .world import World, builtin_env_names, load_env


@click.group()
def main():
    """Headless swarm-transport simulator."""


@main.command()
@click.argument("env")
@click.option("--mode", type=click.Choice(MODES), default="proposed", show_default=True)
@click.option("--robots", "-n", default=20, show_default=True)
@click.option("--object", "object_kind", type=click.Choice(OBJECT_KINDS), default=None,
              help="Override the environment's object shape.")
@click.option("--seed", default=None, type=int, help="Defaults to the sweep seed for index 0.")
@click.option("--time-limit", default=1200.0, show_default=True)
@click.option("--trace", is_flag=True, help="Include the 10 Hz object trace.")
def run(env, mode, robots, object_kind, seed, time_limit, trace):
    """Run one trial and print its result as JSON."""
    kind = object_kind or load_env(env).object_kind
    if seed is None:
        seed = trial_seed(env, mode, kind, robots, 0)
    res = run_trial(env, robots, seed, mode=mode, object_kind=object_kind,
                    time_limit=time_limit, record_trace=trace)
    out = {
        "env": res.env, "mode": res.mode, "object_kind": res.object_kind,
        "n_robots": res.n_robots, "seed": res.seed, "success": res.success,
        "duration": res.duration, "distance": res.distance, "d_min": res.d_min,
        "path_efficiency": res.path_efficiency,
    }
    if trace:
        out["trace"] = res.trace
    click.echo(json.dumps(out, indent=2))


@main.command()
@click.option("--env", "envs", multiple=True, default=builtin_env_names(), show_default=True)
@click.option("--mode", "modes", multiple=True, default=("proposed",), show_default=True)
@click.option("--object", "kinds", multiple=True, default=("square",), show_default=True)
@click.option("--robots", "-n", "counts", multiple=True, type=int, default=(20,),
              show_default=True)
@click.option("--trials", default=20, show_default=True)
@click.option("--time-limit", default=1200.0, show_default=True)
@click.option("--workers", default=1, show_default=True)
@click.option("--out", "out_dir", default="results", show_default=True,
              type=click.Path(file_okay=False))
def sweep(envs, modes, kinds, counts, trials, time_limit, workers, out_dir):
    """Run the cross product of cells and write results under OUT."""
    cells = [Cell(e, m, k, n)
             for e in envs for m in modes for k in kinds for n in counts]
    results = []
    for cell in cells:
        def progress(c, t, r):
            click.echo(f"{c.env}/{c.mode}/{c.object_kind}/n{c.n_robots} "
                       f"trial {t}: success={r.success} t={r.duration:.1f}s",
                       err=True)
        got = run_cell(cell, trials, time_limit=time_limit, workers=workers,
                       progress=progress)
        results.extend(got)
        s = summarize(got)
        click.echo(f"{cell.env}/{cell.mode}/{cell.object_kind}/n{cell.n_robots}: "
                   f"{s['successes']}/{s['trials']} ok, "
                   f"mean t={s['mean_duration']}, mean PE={s['mean_path_efficiency']}")
    emit_results(results, out_dir)
    click.echo(f"wrote {out_dir}/trials.jsonl and {out_dir}/summary.csv")


@main.command()
@click.argument("env")
@click.option("--object", "object_kind", type=click.Choice(OBJECT_KINDS), default=None)
def dmin(env, object_kind):
    """Print the ideal transport distance for ENV."""
    cfg = load_env(env)
    if object_kind is not None:
        cfg = cfg.with_object(object_kind)
    world = World(cfg, 1, seed=0)
    d = min_travel_distance(world)
    click.echo(f"{d:.4f}")


@main.command()
def envs():
    """List the built-in environments."""
    for name in builtin_env_names():
        click.echo(name)


if __name__ == "__main__":
    sys.exit(main())
