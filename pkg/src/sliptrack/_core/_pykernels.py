"""Pure-python fallback for the hot kernels.

Every arithmetic expression here is written in the exact order the
compiled variant uses, so both backends produce bit-identical floats.
Keep the two in sync when editing either.
"""

import math

import numpy as np


def wrap_angle(a: float) -> float:
    """Wrap an angle to the half-open interval (-pi, pi]."""
    return a - 2.0 * math.pi * math.ceil((a - math.pi) / (2.0 * math.pi))


def project_polyline(xs, ys, yaws, x: float, y: float, yaw: float):
    """Project a pose onto a sampled path.

    Returns (index, signed lateral error, heading error).  The lateral
    error is positive when the robot sits to the left of the path
    direction; heading error is reference yaw minus robot yaw, wrapped.
    Nearest point by euclidean distance, first index wins ties.
    """
    dx = xs - x
    dy = ys - y
    i = int(np.argmin(dx * dx + dy * dy))
    ryaw = yaws[i]
    rx = x - xs[i]
    ry = y - ys[i]
    e = ry * math.cos(ryaw) - rx * math.sin(ryaw)
    heading = wrap_angle(ryaw - yaw)
    return i, e, heading
