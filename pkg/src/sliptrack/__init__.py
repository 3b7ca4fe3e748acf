"""Trajectory tracking workbench for a differential-drive robot on
mixed-friction terrain: controllers, slip simulation, metrics, and an
online gain-adaptation agent."""

__version__ = "0.1.0"

from ._core import BACKEND, HAVE_COMPILED
from .controllers import (
    GAIN_HIGH,
    GAIN_LOW,
    Gains,
    PredictiveConfig,
    speed_p,
    stanley_basic,
    stanley_predictive,
    synthesize_body_command,
)
from .metrics import (
    EpisodeTrace,
    MetricsReport,
    RewardCoeffs,
    StepRecord,
    compute_metrics,
    is_slipping,
    step_reward,
)
from .robot import (
    RobotParams,
    RobotState,
    SlipSignals,
    WheelCommand,
    body_to_wheels,
    compute_slip_signals,
    step,
    wheels_to_body,
)
from .trajectory import (
    Projection,
    ReferencePoint,
    ReferenceTrajectory,
    Waypoint,
    generate_spline,
    project,
    sample_random_waypoints,
    wrap_angle,
)
from .world import FrictionMap, WorldConfig, generate_world
