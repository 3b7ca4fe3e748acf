"""Steering and speed control laws for path tracking."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._core import wrap_angle
from .robot import RobotParams, RobotState, _clamp
from .trajectory import Projection, ReferenceTrajectory, project

__all__ = [
    "GAIN_LOW",
    "GAIN_HIGH",
    "Gains",
    "PredictiveConfig",
    "stanley_basic",
    "propagate_previews",
    "stanley_predictive",
    "speed_p",
    "synthesize_body_command",
]

# Valid range for both controller gains; the adaptive policy maps its
# actions into the same interval.
GAIN_LOW = 0.5
GAIN_HIGH = 5.0


@dataclass(frozen=True)
class Gains:
    k_stanley: float
    k_speed: float

    def clipped(self) -> "Gains":
        return Gains(
            _clamp(self.k_stanley, GAIN_LOW, GAIN_HIGH),
            _clamp(self.k_speed, GAIN_LOW, GAIN_HIGH),
        )


@dataclass
class PredictiveConfig:
    n_previews: int = 2
    p1: float = 0.2  # weight of the first preview; weights square onward
    # Preview hop duration.  Two control periods per hop anticipates the
    # corner ahead without over-rotating the predicted poses: the hop
    # holds the instantaneous heading rate delta/control_period, which
    # the real loop only applies for one period before re-planning, so
    # long hops exaggerate the turn and degrade tracking.
    preview_dt: float = 0.1
    delta_max: float = math.pi / 3.0
    v_epsilon: float = 0.05
    lateral: str = "predictive"  # or "basic"


def _effective_speed(v: float, cfg: PredictiveConfig) -> float:
    # Floor the denominator speed so the steering term stays bounded
    # when the robot is slow or stopped.
    return v if v > cfg.v_epsilon else cfg.v_epsilon


def stanley_basic(
    heading_error: float, cross_track: float, v: float, k: float, cfg: PredictiveConfig
) -> float:
    """Classic front-axle steering law with output saturation.

    cross_track is positive when the path lies to the left of the robot.
    Output is the heading term plus the cross-track arctan term, clamped
    to +-delta_max.
    """
    veff = _effective_speed(v, cfg)
    raw = heading_error + math.atan(k * cross_track / veff)
    return _clamp(raw, -cfg.delta_max, cfg.delta_max)


def propagate_previews(
    state: RobotState, delta: float, cfg: PredictiveConfig, params: RobotParams
):
    """Predict the next n_previews poses under the current steering.

    Constant speed, heading rate delta / control period, forward Euler
    with preview_dt per hop.  A stopped (or reversing) robot does not
    move, so all previews stay at the current pose.
    """
    poses = []
    px, py, pyaw = state.x, state.y, state.yaw
    moving = state.v > 0.0
    w = delta / params.control_period
    for _ in range(cfg.n_previews):
        if moving:
            px = px + state.v * math.cos(pyaw) * cfg.preview_dt
            py = py + state.v * math.sin(pyaw) * cfg.preview_dt
            pyaw = wrap_angle(pyaw + w * cfg.preview_dt)
        poses.append((px, py, pyaw))
    return poses


def stanley_predictive(
    state: RobotState,
    traj: ReferenceTrajectory,
    k: float,
    cfg: PredictiveConfig,
    params: RobotParams,
    current: Projection | None = None,
) -> float:
    """Preview-weighted steering law.

    Sums the basic steering term at the current pose and at n_previews
    predicted poses, weighted 1, p1, p1**2, ...; the total saturates at
    +-delta_max.  project() reports the robot's leftward offset from the
    path while the steering term wants the path's offset from the robot,
    hence the sign flip on e.

    Pass the current projection when the caller already has it; the
    previews are always projected internally.
    """
    if current is None:
        current = project(traj, state.x, state.y, state.yaw)
    veff = _effective_speed(state.v, cfg)
    term = current.heading_error + math.atan(k * -current.e / veff)
    delta_now = _clamp(term, -cfg.delta_max, cfg.delta_max)
    total = term
    weight = cfg.p1
    for px, py, pyaw in propagate_previews(state, delta_now, cfg, params):
        p = project(traj, px, py, pyaw)
        total = total + weight * (p.heading_error + math.atan(k * -p.e / veff))
        weight = weight * weight
    return _clamp(total, -cfg.delta_max, cfg.delta_max)


def speed_p(v: float, v_ref: float, k_speed: float) -> float:
    """Proportional longitudinal acceleration command."""
    return k_speed * (v_ref - v)


def synthesize_body_command(
    state: RobotState, delta: float, alpha: float, params: RobotParams
):
    """Steering angle + acceleration to body velocity setpoints."""
    v_cmd = state.v + alpha * params.control_period
    omega_cmd = delta / params.control_period
    return v_cmd, omega_cmd
