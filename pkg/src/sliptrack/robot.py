"""Differential-drive kinematics and the traction-limited step model."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._core import wrap_angle

__all__ = [
    "RobotParams",
    "RobotState",
    "WheelCommand",
    "SlipSignals",
    "wheels_to_body",
    "body_to_wheels",
    "step",
    "compute_slip_signals",
]


@dataclass
class RobotParams:
    wheel_radius: float = 0.033
    wheel_base: float = 0.287
    control_period: float = 0.05
    gravity: float = 9.81
    traction_factor: float = 1.0  # scales the angular traction cap
    v_max: float = 1.0
    omega_max: float = 4.0


@dataclass(frozen=True)
class RobotState:
    x: float = 0.0
    y: float = 0.0
    yaw: float = 0.0
    v: float = 0.0
    omega: float = 0.0


@dataclass(frozen=True)
class WheelCommand:
    omega_r: float
    omega_l: float


@dataclass(frozen=True)
class SlipSignals:
    """Commanded-minus-achieved body velocity change over one step."""

    dv: float = 0.0
    domega: float = 0.0


def _clamp(value: float, lo: float, hi: float) -> float:
    if value > hi:
        return hi
    if value < lo:
        return lo
    return value


def wheels_to_body(cmd: WheelCommand, params: RobotParams):
    """Wheel speeds (rad/s) to body (v, omega)."""
    v = (cmd.omega_r + cmd.omega_l) * params.wheel_radius / 2.0
    omega = (cmd.omega_r - cmd.omega_l) * params.wheel_radius / params.wheel_base
    return v, omega


def body_to_wheels(v: float, omega: float, params: RobotParams) -> WheelCommand:
    """Body (v, omega) to wheel speeds, exact inverse of wheels_to_body."""
    omega_r = (2.0 * v + omega * params.wheel_base) / (2.0 * params.wheel_radius)
    omega_l = (2.0 * v - omega * params.wheel_base) / (2.0 * params.wheel_radius)
    return WheelCommand(omega_r, omega_l)


def _traction_update(state: RobotState, cmd: WheelCommand, mu: float, params: RobotParams):
    """Desired body velocities (feasibility-clamped) and what traction allows."""
    vd, wd = wheels_to_body(cmd, params)
    vd = _clamp(vd, -params.v_max, params.v_max)
    wd = _clamp(wd, -params.omega_max, params.omega_max)
    # Friction bounds how much of the requested change one period can deliver:
    # mu*g for linear, scaled 2*mu*g/b for angular.
    cap_v = mu * params.gravity * params.control_period
    cap_w = (
        params.traction_factor * 2.0 * mu * params.gravity / params.wheel_base
        * params.control_period
    )
    new_v = state.v + _clamp(vd - state.v, -cap_v, cap_v)
    new_omega = state.omega + _clamp(wd - state.omega, -cap_w, cap_w)
    return vd, wd, new_v, new_omega


def step(state: RobotState, cmd: WheelCommand, mu: float, params: RobotParams):
    """Advance one control period under friction mu.

    Velocities track the commanded values as far as traction allows, the
    pose integrates with the new velocities along the old heading.
    Returns the new state and the slip signals for this step.
    """
    vd, wd, new_v, new_omega = _traction_update(state, cmd, mu, params)
    dt = params.control_period
    new_x = state.x + new_v * math.cos(state.yaw) * dt
    new_y = state.y + new_v * math.sin(state.yaw) * dt
    new_yaw = wrap_angle(state.yaw + new_omega * dt)
    return (
        RobotState(new_x, new_y, new_yaw, new_v, new_omega),
        SlipSignals(vd - new_v, wd - new_omega),
    )


def compute_slip_signals(
    state: RobotState, cmd: WheelCommand, mu: float, params: RobotParams
) -> SlipSignals:
    """Slip that step() would report for this command, without stepping."""
    vd, wd, new_v, new_omega = _traction_update(state, cmd, mu, params)
    return SlipSignals(vd - new_v, wd - new_omega)
