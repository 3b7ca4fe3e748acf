"""Closed-loop episode rollout.

Two interchangeable paths: a generic python loop that supports arbitrary
per-step gain sources (used for policy evaluation and training), and the
compiled fixed-gain kernel used for parameter sweeps.  Both produce
bit-identical traces; the python loop below is the reference the kernel
mirrors, keep them in sync.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .. import _core
from ..controllers import (
    Gains,
    PredictiveConfig,
    speed_p,
    stanley_basic,
    stanley_predictive,
    synthesize_body_command,
)
from ..metrics import EpisodeTrace, RewardCoeffs, step_reward
from ..rl.observation import TrackingObservation
from ..robot import RobotParams, RobotState, body_to_wheels, step
from ..trajectory import ReferenceTrajectory, project
from ..world import FrictionMap

__all__ = ["EpisodeConfig", "run_episode"]

GainSource = Union[Gains, Callable[[TrackingObservation], Gains]]


@dataclass
class EpisodeConfig:
    goal_tolerance: float = 0.1
    max_steps: int = 4000
    ds: float = 0.05
    v_ref: float = 0.5


def run_episode(
    traj: ReferenceTrajectory,
    world: FrictionMap,
    gain_source: GainSource,
    robot_params: RobotParams,
    ctrl_cfg: PredictiveConfig,
    reward_coeffs: RewardCoeffs,
    episode_cfg: EpisodeConfig,
    on_step=None,
    use_compiled: Optional[bool] = None,
) -> EpisodeTrace:
    """Roll out one episode from the trajectory's first sample.

    gain_source is either a fixed Gains value or a callable mapping the
    current TrackingObservation to Gains.  The episode ends when the
    robot reaches the final sample within goal_tolerance (reached_goal
    True) or after max_steps (reached_goal False).

    on_step, if given, is called after every step with
    (obs, gains, reward, next_obs, done) where done marks goal arrival;
    returning a truthy value ends the episode after the current step.
    """
    if use_compiled is None:
        use_compiled = _core.HAVE_COMPILED
    fixed = isinstance(gain_source, Gains)
    if use_compiled and not _core.HAVE_COMPILED:
        raise RuntimeError("compiled kernels are not available")
    if use_compiled and fixed and on_step is None:
        return _run_compiled(
            traj, world, gain_source, robot_params, ctrl_cfg, reward_coeffs,
            episode_cfg,
        )
    return _run_python(
        traj, world, gain_source, robot_params, ctrl_cfg, reward_coeffs,
        episode_cfg, on_step,
    )


def _run_compiled(traj, world, gains, robot_params, ctrl_cfg, reward_coeffs, episode_cfg):
    reached, cols = _core.run_fixed_episode(
        traj.x, traj.y, traj.yaw, traj.v_ref,
        world.grid, world.origin[0], world.origin[1], world.cell_size,
        world.mu_high,
        float(traj.x[0]), float(traj.y[0]), float(traj.yaw[0]),
        gains.k_stanley, gains.k_speed,
        robot_params.wheel_radius, robot_params.wheel_base,
        robot_params.control_period, robot_params.gravity,
        robot_params.traction_factor, robot_params.v_max,
        robot_params.omega_max,
        ctrl_cfg.n_previews, ctrl_cfg.p1, ctrl_cfg.preview_dt,
        ctrl_cfg.delta_max, ctrl_cfg.v_epsilon,
        ctrl_cfg.lateral == "basic",
        reward_coeffs.r_dist, reward_coeffs.r_ang, reward_coeffs.r_speed,
        episode_cfg.goal_tolerance, episode_cfg.max_steps,
    )
    n = len(cols["e"])
    cols["t"] = np.arange(1, n + 1)
    cols["k_stanley"] = np.full(n, gains.k_stanley)
    cols["k_speed"] = np.full(n, gains.k_speed)
    return EpisodeTrace(cols, reached)


def _run_python(traj, world, gain_source, robot_params, ctrl_cfg, reward_coeffs,
                episode_cfg, on_step):
    fixed = isinstance(gain_source, Gains)
    state = RobotState(float(traj.x[0]), float(traj.y[0]), float(traj.yaw[0]), 0.0, 0.0)
    gx, gy = float(traj.x[-1]), float(traj.y[-1])
    tol2 = episode_cfg.goal_tolerance * episode_cfg.goal_tolerance

    cols = {name: [] for name in (
        "t", "e", "dtheta", "dv", "slip_dv", "slip_domega", "omega_r",
        "omega_l", "reward", "x", "y", "yaw", "v", "omega", "mu",
        "k_stanley", "k_speed",
    )}
    reached = False
    proj = project(traj, state.x, state.y, state.yaw)
    prev_slip_dv = 0.0
    prev_slip_domega = 0.0

    for t in range(1, episode_cfg.max_steps + 1):
        vref_i = float(traj.v_ref[proj.index])
        obs = TrackingObservation(
            proj.e, proj.heading_error,
            math.fabs(vref_i) - math.fabs(state.v),
            prev_slip_dv, prev_slip_domega,
        )
        gains = gain_source if fixed else gain_source(obs)

        if ctrl_cfg.lateral == "basic":
            delta = stanley_basic(
                proj.heading_error, -proj.e, state.v, gains.k_stanley, ctrl_cfg
            )
        else:
            delta = stanley_predictive(
                state, traj, gains.k_stanley, ctrl_cfg, robot_params, current=proj
            )
        alpha = speed_p(state.v, vref_i, gains.k_speed)
        v_cmd, omega_cmd = synthesize_body_command(state, delta, alpha, robot_params)
        cmd = body_to_wheels(v_cmd, omega_cmd, robot_params)

        mu = world.mu_at(state.x, state.y)
        state, slip = step(state, cmd, mu, robot_params)

        proj = project(traj, state.x, state.y, state.yaw)
        dv_post = math.fabs(float(traj.v_ref[proj.index])) - math.fabs(state.v)
        reward = step_reward(proj.e, proj.heading_error, dv_post, reward_coeffs)

        dxg = state.x - gx
        dyg = state.y - gy
        done = dxg * dxg + dyg * dyg <= tol2

        cols["t"].append(t)
        cols["e"].append(proj.e)
        cols["dtheta"].append(proj.heading_error)
        cols["dv"].append(dv_post)
        cols["slip_dv"].append(slip.dv)
        cols["slip_domega"].append(slip.domega)
        cols["omega_r"].append(cmd.omega_r)
        cols["omega_l"].append(cmd.omega_l)
        cols["reward"].append(reward)
        cols["x"].append(state.x)
        cols["y"].append(state.y)
        cols["yaw"].append(state.yaw)
        cols["v"].append(state.v)
        cols["omega"].append(state.omega)
        cols["mu"].append(mu)
        cols["k_stanley"].append(gains.k_stanley)
        cols["k_speed"].append(gains.k_speed)

        stop = None
        if on_step is not None:
            next_obs = TrackingObservation(
                proj.e, proj.heading_error, dv_post, slip.dv, slip.domega
            )
            stop = on_step(obs, gains, reward, next_obs, done)

        prev_slip_dv = slip.dv
        prev_slip_domega = slip.domega
        if done:
            reached = True
            break
        if stop:
            break

    return EpisodeTrace(cols, reached)
