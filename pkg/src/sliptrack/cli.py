"""Command line entry point.

Subcommands: gen (fixtures), sweep (gain grid), train, eval, compare,
trace.  Global flags pick the config file, fixture seed, output
directory and worker count; everything lands under --out-dir.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import load_config
from .controllers import Gains
from .harness.episode import run_episode
from .harness.evaluation import compare_with_sweep, evaluate_policy, write_eval_csv
from .harness.fixtures import ensure_fixtures, load_fixtures
from .harness.sweep import SweepSpec, default_gain_grid, run_sweep, write_sweep
from .harness.training import train
from .metrics import compute_metrics
from .rl.sac import SACAgent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sliptrack",
        description="Trajectory tracking workbench: fixed-gain sweeps and "
        "online gain adaptation for a differential-drive robot on "
        "mixed-friction terrain.",
    )
    parser.add_argument("--config", help="TOML configuration file")
    parser.add_argument("--seed", type=int, default=0,
                        help="master seed for fixture generation (default 0)")
    parser.add_argument("--out-dir", default="runs",
                        help="output directory (default ./runs)")
    parser.add_argument("--jobs", type=int, default=1,
                        help="worker processes for the sweep (default 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate the evaluation fixtures")
    p.add_argument("--count", type=int, default=100)

    p = sub.add_parser("sweep", help="evaluate the fixed-gain grid")
    p.add_argument("--count", type=int, default=100,
                   help="fixtures per cell (default 100)")

    p = sub.add_parser("train", help="train the gain-adaptation agent")
    p.add_argument("--steps", type=int, default=60_000,
                   help="environment steps (default 60000)")
    p.add_argument("--seed", dest="train_seed", type=int, default=11,
                   help="training seed (default 11, the tuned recipe's)")
    p.add_argument("--checkpoint",
                   help="where to write the best checkpoint "
                   "(default <out-dir>/checkpoint_best.npz)")
    p.add_argument("--eval-every", type=int, default=500,
                   help="env steps between held-out evals (default 500; "
                   "an eval fires at the next episode boundary, and the "
                   "best-scoring checkpoint is the one kept)")
    p.add_argument("--count", type=int, default=100,
                   help="held-out fixtures (default 100)")

    p = sub.add_parser("eval", help="evaluate a checkpoint on the fixtures")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--count", type=int, default=100)

    p = sub.add_parser("compare",
                       help="compare a checkpoint against the sweep baselines")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--sweep-dir",
                   help="directory with the sweep outputs (default <out-dir>)")
    p.add_argument("--count", type=int, default=100)

    p = sub.add_parser("trace", help="dump one episode trace as JSONL")
    p.add_argument("--fixture", type=int, default=0)
    p.add_argument("--k-stanley", type=float)
    p.add_argument("--k-speed", type=float)
    p.add_argument("--checkpoint")
    p.add_argument("--out", help="output path (default <out-dir>/trace_<id>.jsonl)")
    p.add_argument("--count", type=int, default=100)
    return parser


def _fixtures(args, config):
    fixtures_dir = Path(args.out_dir) / "fixtures"
    return fixtures_dir, *ensure_fixtures(
        fixtures_dir, args.seed, args.count, config.episode, config.world
    )


def _cmd_gen(args, config):
    fixtures_dir, fixtures, fingerprint = _fixtures(args, config)
    print(f"{len(fixtures)} fixtures at {fixtures_dir} ({fingerprint[:12]})")
    return 0


def _cmd_sweep(args, config):
    fixtures_dir, fixtures, fingerprint = _fixtures(args, config)
    spec = SweepSpec(master_seed=args.seed, n_fixtures=args.count)
    results = run_sweep(
        spec, fixtures, config.robot, config.controller, config.reward,
        config.episode, config.sac.discount, jobs=args.jobs,
    )
    write_sweep(results, spec.k_values, fingerprint, args.seed, args.out_dir)
    best = max(results.items(), key=lambda kv: kv[1]["avg_reward"])
    print(
        f"swept {len(results)} cells x {len(fixtures)} fixtures; best "
        f"avg_reward {best[1]['avg_reward']:.5f} at k_stanley={best[0][0]}, "
        f"k_speed={best[0][1]}"
    )
    return 0


def _cmd_train(args, config):
    _, fixtures, _ = _fixtures(args, config)
    result = train(
        args.steps, args.train_seed, args.out_dir, args.eval_every, fixtures,
        config.robot, config.controller, config.reward, config.episode,
        config.world, config.sac, checkpoint_path=args.checkpoint,
    )
    print(
        f"trained {result.env_steps} steps; best eval avg_reward "
        f"{result.best_avg_reward:.5f}; checkpoints: {result.best_checkpoint}"
        f" (best), {result.final_checkpoint} (final)"
    )
    return 0


def _cmd_eval(args, config):
    _, fixtures, _ = _fixtures(args, config)
    agent = SACAgent.load_checkpoint(args.checkpoint)
    reports, agg, traces = evaluate_policy(
        agent, fixtures, config.robot, config.controller, config.reward,
        config.episode, config.sac.discount,
    )
    write_eval_csv(reports, traces, agg, args.out_dir)
    print(
        f"evaluated {len(fixtures)} fixtures: avg_reward "
        f"{agg['avg_reward']:.5f} avg_lat {agg['avg_lat']:.5f} "
        f"goal_rate {agg['goal_rate']:.2f}"
    )
    return 0


def _cmd_compare(args, config):
    fixtures_dir, _, _ = _fixtures(args, config)
    sweep_dir = args.sweep_dir if args.sweep_dir else args.out_dir
    agent = SACAgent.load_checkpoint(args.checkpoint)
    compare_with_sweep(
        agent, fixtures_dir, sweep_dir, args.out_dir, config.robot,
        config.controller, config.reward, config.episode, config.world,
        config.sac.discount,
    )
    print(f"comparison written to {Path(args.out_dir) / 'comparison.csv'}")
    return 0


def _cmd_trace(args, config):
    _, fixtures, _ = _fixtures(args, config)
    if not 0 <= args.fixture < len(fixtures):
        raise ValueError(f"fixture index {args.fixture} out of range")
    fx = fixtures[args.fixture]
    if args.checkpoint:
        if args.k_stanley is not None or args.k_speed is not None:
            raise ValueError("give either --checkpoint or fixed gains, not both")
        agent = SACAgent.load_checkpoint(args.checkpoint)
        source = agent.act_deterministic
    elif args.k_stanley is not None and args.k_speed is not None:
        source = Gains(args.k_stanley, args.k_speed).clipped()
    else:
        raise ValueError("provide --checkpoint or both --k-stanley and --k-speed")
    trace = run_episode(
        fx.trajectory, fx.world, source, config.robot, config.controller,
        config.reward, config.episode,
    )
    out = Path(args.out) if args.out else Path(args.out_dir) / f"trace_{args.fixture:03d}.jsonl"
    trace.save_jsonl(out)
    m = compute_metrics(trace, config.sac.discount)
    print(
        f"trace {out}: {len(trace)} steps, reached_goal={trace.reached_goal}, "
        f"avg_lat {m.avg_lat:.5f}, slip steps {m.slip_step_count}"
    )
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "sweep": _cmd_sweep,
    "train": _cmd_train,
    "eval": _cmd_eval,
    "compare": _cmd_compare,
    "trace": _cmd_trace,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        return _COMMANDS[args.command](args, config)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
