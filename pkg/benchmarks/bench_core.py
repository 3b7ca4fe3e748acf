"""Benchmark the compiled episode kernel against the pure-python loop.

Runs the same fixed-gain episodes through both implementations, checks
they agree bit for bit, and reports per-step timings.  Usage:

    python3 benchmarks/bench_core.py [--episodes 20] [--seed 0]
"""

import argparse
import time

import numpy as np

from sliptrack import _core
from sliptrack.controllers import Gains, PredictiveConfig
from sliptrack.harness.episode import EpisodeConfig, run_episode
from sliptrack.harness.fixtures import build_fixtures
from sliptrack.metrics import RewardCoeffs
from sliptrack.robot import RobotParams
from sliptrack.world import WorldConfig


def run_lane(fixtures, gains, use_compiled):
    rp, cc, rc, ec = (RobotParams(), PredictiveConfig(), RewardCoeffs(),
                      EpisodeConfig())
    traces = []
    t0 = time.perf_counter()
    for fx in fixtures:
        traces.append(run_episode(
            fx.trajectory, fx.world, gains, rp, cc, rc, ec,
            use_compiled=use_compiled,
        ))
    elapsed = time.perf_counter() - t0
    steps = sum(len(tr) for tr in traces)
    return traces, steps, elapsed


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--episodes", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if not _core.HAVE_COMPILED:
        raise SystemExit(
            "compiled kernels unavailable (pure-python fallback active); "
            "nothing to compare"
        )

    fixtures = build_fixtures(
        args.seed, args.episodes, EpisodeConfig(), WorldConfig()
    )
    gains = Gains(2.5, 2.5)

    # warm both paths once before timing
    run_lane(fixtures[:1], gains, True)
    run_lane(fixtures[:1], gains, False)

    traces_c, steps_c, time_c = run_lane(fixtures, gains, True)
    traces_p, steps_p, time_p = run_lane(fixtures, gains, False)

    assert steps_c == steps_p, "lanes disagree on episode lengths"
    for tc, tp in zip(traces_c, traces_p):
        assert tc.reached_goal == tp.reached_goal
        for col in ("e", "dtheta", "dv", "slip_dv", "slip_domega", "reward",
                    "x", "y", "yaw", "v", "omega", "mu"):
            a, b = getattr(tc, col), getattr(tp, col)
            assert np.array_equal(a, b), f"column {col} differs between lanes"

    us_c = 1e6 * time_c / steps_c
    us_p = 1e6 * time_p / steps_p
    print(f"episodes: {args.episodes}, total steps per lane: {steps_c}")
    print(f"compiled kernel : {time_c:8.3f} s  ({us_c:7.2f} us/step)")
    print(f"pure python     : {time_p:8.3f} s  ({us_p:7.2f} us/step)")
    print(f"speedup         : {time_p / time_c:8.1f}x")
    print("agreement       : bit-identical across all trace columns")


if __name__ == "__main__":
    main()
