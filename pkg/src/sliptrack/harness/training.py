"""Online training loop for the gain-adaptation agent."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..controllers import Gains
from ..metrics import METRIC_NAMES
from ..rl.buffer import ReplayBuffer, Transition
from ..rl.sac import SACAgent, SACConfig
from ..trajectory import generate_spline, sample_random_waypoints
from ..world import generate_world
from .episode import run_episode
from .evaluation import evaluate_policy

__all__ = ["TrainResult", "train"]

CURVE_COLUMNS = ["env_steps"] + METRIC_NAMES + ["goal_rate", "alpha"]


@dataclass
class TrainResult:
    best_checkpoint: Path
    final_checkpoint: Path
    curve_path: Path
    best_avg_reward: float
    env_steps: int


def _uniform_gains(rng, low, high):
    g1 = float(rng.uniform(low, high))
    g2 = float(rng.uniform(low, high))
    return Gains(g1, g2)


def _pre_squash(gains: Gains, mid, half_span):
    # invert the affine+tanh map; clip so the boundary draws stay finite
    t1 = min(max((gains.k_stanley - mid) / half_span, -1.0 + 1e-12), 1.0 - 1e-12)
    t2 = min(max((gains.k_speed - mid) / half_span, -1.0 + 1e-12), 1.0 - 1e-12)
    return (math.atanh(t1), math.atanh(t2))


def train(
    total_steps: int,
    seed: int,
    out_dir,
    eval_every: int,
    fixtures,
    robot_params,
    ctrl_cfg,
    reward_coeffs,
    episode_cfg,
    world_cfg,
    sac_cfg: SACConfig,
    checkpoint_path=None,
    log=print,
) -> TrainResult:
    """Train on freshly sampled episodes, evaluating on held-out fixtures.

    Fully deterministic in (seed, configs, fixtures): the environment,
    warmup actions and agent all derive from one seed sequence.  The
    checkpoint with the best evaluation average reward is kept alongside
    the final one, plus a training_curve.csv of the periodic evals.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    best_path = Path(checkpoint_path) if checkpoint_path else out_dir / "checkpoint_best.npz"
    final_path = out_dir / "checkpoint_final.npz"
    curve_path = out_dir / "training_curve.csv"

    root = np.random.SeedSequence(seed)
    env_ss, warmup_ss, agent_ss = root.spawn(3)
    agent_seed = int(np.random.default_rng(agent_ss).integers(2**31 - 1))
    agent = SACAgent(sac_cfg, agent_seed)
    env_rng = np.random.default_rng(env_ss)
    warmup_rng = np.random.default_rng(warmup_ss)
    buffer = ReplayBuffer(sac_cfg.replay_capacity)

    mid, half_span = agent.mid, agent.half_span
    last_u = None
    curve_rows = []
    best_reward = -math.inf
    next_eval = eval_every

    def source(obs):
        nonlocal last_u
        if agent.env_steps < sac_cfg.warmup_steps:
            gains = _uniform_gains(warmup_rng, sac_cfg.action_low, sac_cfg.action_high)
            last_u = _pre_squash(gains, mid, half_span)
        else:
            gains, u, _ = agent.policy_sample(obs)
            last_u = (float(u[0]), float(u[1]))
        return gains

    def on_step(obs, gains, reward, next_obs, done):
        buffer.add(Transition(obs, gains, last_u, reward, next_obs, done))
        agent.env_steps += 1
        if (
            agent.env_steps >= sac_cfg.warmup_steps
            and agent.env_steps % sac_cfg.update_every == 0
        ):
            info = agent.sac_update(buffer)
            if info is not None and not all(
                math.isfinite(v) for v in info.values()
            ):
                raise RuntimeError(
                    f"training diverged at step {agent.env_steps}: {info}"
                )
        return agent.env_steps >= total_steps

    def run_eval():
        _, agg, _ = evaluate_policy(
            agent, fixtures, robot_params, ctrl_cfg, reward_coeffs,
            episode_cfg, sac_cfg.discount,
        )
        row = [agent.env_steps]
        row += [agg[name] for name in METRIC_NAMES]
        row += [agg["goal_rate"], agent.alpha]
        curve_rows.append(row)
        log(
            f"step {agent.env_steps}: eval avg_reward {agg['avg_reward']:.5f} "
            f"avg_lat {agg['avg_lat']:.5f} goal_rate {agg['goal_rate']:.2f} "
            f"alpha {agent.alpha:.4f}"
        )
        return agg["avg_reward"]

    while agent.env_steps < total_steps:
        waypoints = sample_random_waypoints(env_rng)
        traj = generate_spline(waypoints, ds=episode_cfg.ds, v_ref=episode_cfg.v_ref)
        world = generate_world(env_rng, traj.bounds(world_cfg.margin), world_cfg)
        run_episode(
            traj, world, source, robot_params, ctrl_cfg, reward_coeffs,
            episode_cfg, on_step=on_step,
        )
        if agent.env_steps >= next_eval or agent.env_steps >= total_steps:
            reward = run_eval()
            if reward > best_reward:
                best_reward = reward
                agent.save_checkpoint(best_path)
            while next_eval <= agent.env_steps:
                next_eval += eval_every

    agent.save_checkpoint(final_path)
    with open(curve_path, "w") as fh:
        fh.write(",".join(CURVE_COLUMNS) + "\n")
        for row in curve_rows:
            fh.write(",".join(
                "" if v is None else (str(v) if isinstance(v, int) else repr(float(v)))
                for v in row
            ) + "\n")
    return TrainResult(best_path, final_path, curve_path, best_reward, agent.env_steps)
