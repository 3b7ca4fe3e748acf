"""Reference trajectories: generation, sampling, file round trip, projection."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from ._core import project_polyline, wrap_angle

__all__ = [
    "Waypoint",
    "ReferencePoint",
    "ReferenceTrajectory",
    "Projection",
    "sample_random_waypoints",
    "generate_spline",
    "project",
    "wrap_angle",
]

# Matching tolerance when a regular arclength target collides with a
# waypoint's own arclength; the waypoint sample wins.
_KNOT_TOL = 1e-9


@dataclass(frozen=True)
class Waypoint:
    x: float
    y: float


@dataclass(frozen=True)
class ReferencePoint:
    s: float
    x: float
    y: float
    yaw: float
    v_ref: float


@dataclass(frozen=True)
class Projection:
    """Result of projecting a pose onto a trajectory.

    e is the signed lateral offset of the robot, positive when the robot
    is to the left of the local path direction.  heading_error is the
    reference yaw minus the robot yaw, wrapped to (-pi, pi].
    """

    index: int
    e: float
    heading_error: float


class ReferenceTrajectory:
    """A densely sampled path with arclength, pose and speed per sample."""

    def __init__(self, s, x, y, yaw, v_ref):
        self.s = np.asarray(s, dtype=np.float64)
        self.x = np.asarray(x, dtype=np.float64)
        self.y = np.asarray(y, dtype=np.float64)
        self.yaw = np.asarray(yaw, dtype=np.float64)
        self.v_ref = np.asarray(v_ref, dtype=np.float64)
        n = len(self.s)
        if not (len(self.x) == len(self.y) == len(self.yaw) == len(self.v_ref) == n):
            raise ValueError("trajectory columns must have equal length")
        if n < 2:
            raise ValueError("trajectory needs at least two samples")

    def __len__(self):
        return len(self.s)

    @property
    def length(self) -> float:
        return float(self.s[-1])

    def point(self, i: int) -> ReferencePoint:
        return ReferencePoint(
            float(self.s[i]), float(self.x[i]), float(self.y[i]),
            float(self.yaw[i]), float(self.v_ref[i]),
        )

    def bounds(self, margin: float = 0.0):
        """Axis-aligned bounding box (xmin, ymin, xmax, ymax) of the samples."""
        return (
            float(self.x.min()) - margin,
            float(self.y.min()) - margin,
            float(self.x.max()) + margin,
            float(self.y.max()) + margin,
        )

    def save_csv(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as fh:
            fh.write("s,x,y,yaw,v_ref\n")
            for i in range(len(self.s)):
                fh.write(
                    f"{self.s[i]:.9g},{self.x[i]:.9g},{self.y[i]:.9g},"
                    f"{self.yaw[i]:.9g},{self.v_ref[i]:.9g}\n"
                )

    @classmethod
    def load_csv(cls, path) -> "ReferenceTrajectory":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        if data.shape[1] != 5:
            raise ValueError(f"expected 5 columns in {path}, got {data.shape[1]}")
        return cls(data[:, 0], data[:, 1], data[:, 2], data[:, 3], data[:, 4])


def sample_random_waypoints(rng: np.random.Generator, n: int = 5) -> list[Waypoint]:
    """Draw a random waypoint chain for episode generation.

    The first point lands in a fixed start box, the chain then walks
    forward with per-leg distance U[1, 2] m and relative turn
    U[-pi/2, pi/2], so consecutive waypoints are 1 to 2 m apart.
    """
    x = float(rng.uniform(1.0, 2.0))
    y = float(rng.uniform(3.5, 4.5))
    heading = 0.0
    points = [Waypoint(x, y)]
    for _ in range(n - 1):
        dist = float(rng.uniform(1.0, 2.0))
        turn = float(rng.uniform(-0.5 * math.pi, 0.5 * math.pi))
        heading = heading + turn
        x = x + dist * math.cos(heading)
        y = y + dist * math.sin(heading)
        points.append(Waypoint(x, y))
    return points


def _chord_parameter(xs, ys):
    d = np.hypot(np.diff(xs), np.diff(ys))
    if np.any(d <= 0.0):
        raise ValueError("waypoints must be pairwise distinct in order")
    return np.concatenate(([0.0], np.cumsum(d)))


def generate_spline(
    waypoints: list[Waypoint], ds: float = 0.05, v_ref: float = 0.5
) -> ReferenceTrajectory:
    """Fit a natural cubic spline through the waypoints and resample it.

    The spline is parameterised by cumulative chord length and resampled
    at (approximately) equal arclength steps ds.  Waypoints are kept as
    exact samples: the resampling grid is nudged so each waypoint's own
    arclength is one of the targets.
    """
    if len(waypoints) < 2:
        raise ValueError("need at least two waypoints")
    xs = np.array([w.x for w in waypoints], dtype=np.float64)
    ys = np.array([w.y for w in waypoints], dtype=np.float64)
    t = _chord_parameter(xs, ys)
    spline = CubicSpline(t, np.column_stack([xs, ys]), bc_type="natural")
    deriv = spline.derivative()

    # Dense arclength table with the knots as exact entries.
    per_interval = 512
    u_parts = [
        np.linspace(t[k], t[k + 1], per_interval, endpoint=False)
        for k in range(len(t) - 1)
    ]
    u_dense = np.concatenate(u_parts + [t[-1:]])
    dxy = deriv(u_dense)
    speed = np.hypot(dxy[:, 0], dxy[:, 1])
    gaps = np.diff(u_dense)
    arc = np.concatenate(
        ([0.0], np.cumsum(0.5 * gaps * (speed[1:] + speed[:-1])))
    )
    total = float(arc[-1])
    knot_idx = np.arange(len(t)) * per_interval
    knot_idx[-1] = len(u_dense) - 1
    knot_s = arc[knot_idx]

    # Regular grid, then substitute/insert the waypoint arclengths.
    targets = list(np.arange(0.0, total, ds))
    if total - targets[-1] > _KNOT_TOL:
        targets.append(total)
    targets = np.asarray(targets)
    for sk in knot_s:
        j = int(np.argmin(np.abs(targets - sk)))
        if abs(targets[j] - sk) <= _KNOT_TOL:
            targets[j] = sk
        else:
            targets = np.insert(targets, np.searchsorted(targets, sk), sk)

    u_targets = np.interp(targets, arc, u_dense)
    # Snap to exact knot parameters so waypoints survive the round trip.
    for sk, uk in zip(knot_s, t):
        u_targets[np.abs(targets - sk) <= _KNOT_TOL] = uk

    pts = spline(u_targets)
    der = deriv(u_targets)
    yaw = np.arctan2(der[:, 1], der[:, 0])
    return ReferenceTrajectory(
        targets, pts[:, 0], pts[:, 1], yaw, np.full(len(targets), v_ref)
    )


def project(traj: ReferenceTrajectory, x: float, y: float, yaw: float) -> Projection:
    """Find the nearest trajectory sample and the tracking errors there."""
    i, e, heading = project_polyline(traj.x, traj.y, traj.yaw, x, y, yaw)
    return Projection(i, e, heading)
