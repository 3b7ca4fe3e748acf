"""Deterministic policy evaluation on fixture sets, plus the comparison
against the best fixed-gain cells from a sweep."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..metrics import METRIC_NAMES, aggregate_metrics, compute_metrics
from ..rl.sac import SACAgent
from .episode import run_episode
from .fixtures import fixtures_fingerprint, load_fixtures
from .sweep import read_heatmap

__all__ = [
    "evaluate_policy",
    "write_eval_csv",
    "compare_with_sweep",
    "gain_friction_probe",
]

# Metrics where a larger value is better; the rest are costs.
HIGHER_BETTER = {"avg_reward", "disc_return"}


def evaluate_policy(agent: SACAgent, fixtures, robot_params, ctrl_cfg,
                    reward_coeffs, episode_cfg, gamma):
    """Greedy rollouts on every fixture.

    Returns (per-fixture MetricsReport list, aggregate dict, traces).
    Deterministic: the policy mean is used, no exploration noise.
    """
    reports = []
    traces = []
    goals = 0
    for fx in fixtures:
        trace = run_episode(
            fx.trajectory, fx.world, agent.act_deterministic, robot_params,
            ctrl_cfg, reward_coeffs, episode_cfg,
        )
        traces.append(trace)
        reports.append(compute_metrics(trace, gamma))
        goals += 1 if trace.reached_goal else 0
    agg = aggregate_metrics(reports)
    agg["goal_rate"] = goals / len(fixtures)
    return reports, agg, traces


def _format(value):
    return "" if value is None else repr(float(value))


def write_eval_csv(reports, traces, agg, out_dir):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "eval_metrics.csv", "w") as fh:
        fh.write("fixture," + ",".join(METRIC_NAMES) + ",slip_step_count,reached_goal\n")
        for i, (rep, trace) in enumerate(zip(reports, traces)):
            row = [str(i)]
            row += [_format(getattr(rep, name)) for name in METRIC_NAMES]
            row.append(str(rep.slip_step_count))
            row.append("1" if trace.reached_goal else "0")
            fh.write(",".join(row) + "\n")
    with open(out_dir / "eval_summary.csv", "w") as fh:
        fh.write(",".join(METRIC_NAMES) + ",goal_rate\n")
        fh.write(",".join(
            [_format(agg[name]) for name in METRIC_NAMES]
            + [_format(agg["goal_rate"])]
        ) + "\n")


def _best_cell(heatmap: dict, metric: str):
    """Cell with the best non-missing value, or None for an empty map."""
    best = None
    for cell, value in heatmap.items():
        if value is None:
            continue
        if best is None:
            best = (cell, value)
        elif metric in HIGHER_BETTER:
            if value > best[1]:
                best = (cell, value)
        elif value < best[1]:
            best = (cell, value)
    return best


def _improvement_pct(metric, baseline, adaptive):
    # report positive when the adaptive policy is better
    if metric in HIGHER_BETTER:
        baseline, adaptive = -baseline, -adaptive
    if baseline == 0.0:
        return None
    return (baseline - adaptive) / abs(baseline) * 100.0


def gain_friction_probe(traces, mu_high, mu_low):
    """Mean steering gain on and off the low-friction patches.

    Only fixtures whose rollout touched both terrains contribute.
    Returns (per-fixture rows, mean on-patch gain, mean off-patch gain)
    with the means None when no fixture qualified.
    """
    threshold = 0.5 * (mu_high + mu_low)
    rows = []
    on_means = []
    off_means = []
    for i, trace in enumerate(traces):
        on = trace.mu < threshold
        if not (np.any(on) and np.any(~on)):
            continue
        k_on = float(np.mean(trace.k_stanley[on]))
        k_off = float(np.mean(trace.k_stanley[~on]))
        rows.append((i, int(np.count_nonzero(on)), k_on, k_off))
        on_means.append(k_on)
        off_means.append(k_off)
    if not rows:
        return rows, None, None
    n = len(rows)
    return rows, sum(on_means) / n, sum(off_means) / n


def compare_with_sweep(agent, fixtures_dir, sweep_dir, out_dir, robot_params,
                       ctrl_cfg, reward_coeffs, episode_cfg, world_cfg, gamma,
                       log=print):
    """comparison.csv: adaptive policy vs the per-metric best fixed cell.

    Refuses to compare when the sweep ran on different fixtures (the
    fingerprints are checked), since the numbers would not be comparable.
    """
    sweep_dir = Path(sweep_dir)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    with open(sweep_dir / "sweep_manifest.json") as fh:
        manifest = json.load(fh)
    fingerprint = fixtures_fingerprint(fixtures_dir)
    if manifest["fixtures_fingerprint"] != fingerprint:
        raise ValueError(
            "sweep was run on different fixtures: "
            f"{manifest['fixtures_fingerprint'][:12]} != {fingerprint[:12]}"
        )

    fixtures, _ = load_fixtures(fixtures_dir)
    reports, agg, traces = evaluate_policy(
        agent, fixtures, robot_params, ctrl_cfg, reward_coeffs, episode_cfg,
        gamma,
    )

    heatmaps = {
        name: read_heatmap(sweep_dir / f"heatmap_{name}.csv")
        for name in METRIC_NAMES
    }
    goal_rates = read_heatmap(sweep_dir / "sweep_goal_rate.csv")

    with open(out_dir / "comparison.csv", "w") as fh:
        fh.write(
            "metric,baseline_k_stanley,baseline_k_speed,baseline,adaptive,"
            "improvement_pct\n"
        )
        for name in METRIC_NAMES:
            best = _best_cell(heatmaps[name], name)
            adaptive = agg[name]
            if best is None:
                fh.write(f"{name},,,,{_format(adaptive)},\n")
                continue
            cell, base = best
            if adaptive is None:
                imp = None
            else:
                imp = _improvement_pct(name, base, adaptive)
            fh.write(
                f"{name},{repr(cell[0])},{repr(cell[1])},{_format(base)},"
                f"{_format(adaptive)},{_format(imp)}\n"
            )
        # goal rate relative to the cell that wins on average reward
        reward_cell, _ = _best_cell(heatmaps["avg_reward"], "avg_reward")
        base_goal = goal_rates[reward_cell]
        fh.write(
            f"goal_rate,{repr(reward_cell[0])},{repr(reward_cell[1])},"
            f"{_format(base_goal)},{_format(agg['goal_rate'])},\n"
        )

    # behavioural probe: does the policy soften steering on ice?
    rows, k_on, k_off = gain_friction_probe(
        traces, world_cfg.mu_high, world_cfg.mu_low
    )
    with open(out_dir / "probe.csv", "w") as fh:
        fh.write("fixture,steps_on_patch,k_stanley_on_patch,k_stanley_off_patch\n")
        for idx, steps_on, on, off in rows:
            fh.write(f"{idx},{steps_on},{repr(on)},{repr(off)}\n")
    if k_on is None:
        log("probe: no fixture episode touched both terrains, probe skipped")
    elif k_on < k_off:
        log(
            f"probe: steering gain drops on low-friction patches "
            f"({k_on:.3f} on vs {k_off:.3f} off, {len(rows)} fixtures)"
        )
    else:
        log(
            f"probe: steering gain did NOT drop on low-friction patches "
            f"({k_on:.3f} on vs {k_off:.3f} off, {len(rows)} fixtures); "
            "informational only"
        )
    return agg, (rows, k_on, k_off)
