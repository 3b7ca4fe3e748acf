"""Grid sweep over the two controller gains."""

from __future__ import annotations

import json
import multiprocessing
from dataclasses import dataclass
from pathlib import Path

from ..controllers import Gains
from ..metrics import METRIC_NAMES, aggregate_metrics, compute_metrics
from .episode import run_episode

__all__ = ["SweepSpec", "default_gain_grid", "evaluate_cell", "run_sweep",
           "write_sweep", "read_heatmap"]


def default_gain_grid():
    """0.5 to 5.0 inclusive in steps of 0.5."""
    return [0.5 + 0.5 * i for i in range(10)]


@dataclass
class SweepSpec:
    k_values: tuple = tuple(default_gain_grid())
    master_seed: int = 0
    n_fixtures: int = 100


def evaluate_cell(gains, fixtures, robot_params, ctrl_cfg, reward_coeffs,
                  episode_cfg, gamma) -> dict:
    """Run all fixtures under fixed gains and average the metrics.

    Fixture order is the accumulation order, so a cell's value never
    depends on which other cells ran.
    """
    reports = []
    goals = 0
    for fx in fixtures:
        trace = run_episode(
            fx.trajectory, fx.world, gains, robot_params, ctrl_cfg,
            reward_coeffs, episode_cfg,
        )
        reports.append(compute_metrics(trace, gamma))
        goals += 1 if trace.reached_goal else 0
    agg = aggregate_metrics(reports)
    agg["goal_rate"] = goals / len(fixtures)
    return agg


_WORKER_CTX = None


def _init_worker(ctx):
    global _WORKER_CTX
    _WORKER_CTX = ctx


def _cell_worker(cell):
    fixtures, rp, cc, rc, ec, gamma = _WORKER_CTX
    k1, k2 = cell
    return cell, evaluate_cell(Gains(k1, k2), fixtures, rp, cc, rc, ec, gamma)


def run_sweep(spec: SweepSpec, fixtures, robot_params, ctrl_cfg, reward_coeffs,
              episode_cfg, gamma, jobs: int = 1) -> dict:
    """Evaluate every (k_stanley, k_speed) grid cell.

    Returns {(k1, k2): metrics dict}.  Cells are independent, so they
    parallelise over processes without changing any value.
    """
    cells = [(k1, k2) for k1 in spec.k_values for k2 in spec.k_values]
    ctx = (fixtures, robot_params, ctrl_cfg, reward_coeffs, episode_cfg, gamma)
    if jobs > 1:
        with multiprocessing.Pool(jobs, _init_worker, (ctx,)) as pool:
            pairs = pool.map(_cell_worker, cells)
    else:
        _init_worker(ctx)
        pairs = [_cell_worker(c) for c in cells]
    return dict(pairs)


def _format(value):
    return "" if value is None else repr(float(value))


def write_sweep(results: dict, k_values, fingerprint, master_seed, out_dir):
    """One heatmap CSV per metric plus goal rates and a manifest."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cells = [(k1, k2) for k1 in k_values for k2 in k_values]
    for name in METRIC_NAMES:
        with open(out_dir / f"heatmap_{name}.csv", "w") as fh:
            fh.write("k_stanley,k_speed,value\n")
            for cell in cells:
                fh.write(
                    f"{repr(float(cell[0]))},{repr(float(cell[1]))},"
                    f"{_format(results[cell][name])}\n"
                )
    with open(out_dir / "sweep_goal_rate.csv", "w") as fh:
        fh.write("k_stanley,k_speed,goal_rate\n")
        for cell in cells:
            fh.write(
                f"{repr(float(cell[0]))},{repr(float(cell[1]))},"
                f"{_format(results[cell]['goal_rate'])}\n"
            )
    manifest = {
        "master_seed": master_seed,
        "k_values": list(k_values),
        "fixtures_fingerprint": fingerprint,
        "metrics": list(METRIC_NAMES),
    }
    with open(out_dir / "sweep_manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")


def read_heatmap(path):
    """Heatmap CSV back to {(k1, k2): value-or-None}."""
    out = {}
    with open(path) as fh:
        header = fh.readline()
        if not header.startswith("k_stanley,k_speed,"):
            raise ValueError(f"unexpected heatmap header in {path}")
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            k1, k2, value = line.split(",")
            out[(float(k1), float(k2))] = float(value) if value else None
    return out
