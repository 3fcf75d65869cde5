"""Harness tests: determinism, seeding, result files and worker invariance."""

import csv
import json

import pytest

from occlusim.harness import (Cell, emit_results, run_cell, run_trial, summarize,
                              trial_seed)


def brief(r):
    return (r.success, r.duration, r.distance, r.d_min, tuple(r.transitions))


def test_same_seed_replays_identically():
    a = run_trial("reference", 6, 42, time_limit=20.0)
    b = run_trial("reference", 6, 42, time_limit=20.0)
    assert brief(a) == brief(b)


def test_different_seeds_differ():
    a = run_trial("reference", 6, 42, time_limit=20.0)
    b = run_trial("reference", 6, 43, time_limit=20.0)
    assert brief(a) != brief(b)


def test_trial_seed_is_stable_and_distinct():
    # pinned: a change here silently reshuffles every published sweep
    assert trial_seed("corner", "proposed", "square", 20, 0) == 7391868049697336717
    seeds = {trial_seed(e, m, "square", n, i)
             for e in ("corner", "middle") for m in ("proposed", "baseline")
             for n in (5, 20) for i in range(5)}
    assert len(seeds) == 40


def test_reference_trial_succeeds_with_sane_pe():
    seed = trial_seed("reference", "proposed", "square", 20, 0)
    r = run_trial("reference", 20, seed)
    assert r.success
    assert 0.0 < r.path_efficiency <= 1.05


def test_unknown_mode_rejected():
    with pytest.raises(ValueError):
        run_trial("reference", 5, 1, mode="psychic")


def test_worker_count_does_not_change_results():
    cell = Cell("reference", n_robots=6)
    serial = run_cell(cell, 2, time_limit=10.0)
    parallel = run_cell(cell, 2, time_limit=10.0, workers=2)
    assert [brief(r) for r in serial] == [brief(r) for r in parallel]


def test_emit_results_files(tmp_path):
    results = [run_trial("reference", 6, trial_seed("reference", "proposed",
                                                    "square", 6, i),
                         time_limit=10.0, record_trace=True)
               for i in range(2)]
    emit_results(results, tmp_path)

    lines = (tmp_path / "trials.jsonl").read_text().splitlines()
    assert len(lines) == 2
    rec = json.loads(lines[0])
    assert rec["env"] == "reference" and "path_efficiency" in rec

    with open(tmp_path / "summary.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][0] == "env" and len(rows) == 2

    traces = list((tmp_path / "traces").glob("*.csv"))
    assert len(traces) == 2
    with open(traces[0]) as fh:
        head = fh.readline().strip()
    assert head == "t_seconds,x_m,y_m"


def test_summarize_counts():
    results = [run_trial("reference", 6, trial_seed("reference", "proposed",
                                                    "square", 6, i),
                         time_limit=5.0)
               for i in range(2)]
    s = summarize(results)
    assert s["trials"] == 2
    assert 0.0 <= s["completion_rate"] <= 1.0
