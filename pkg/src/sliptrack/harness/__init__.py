from .episode import EpisodeConfig, run_episode
from .evaluation import compare_with_sweep, evaluate_policy, gain_friction_probe
from .fixtures import Fixture, build_fixtures, ensure_fixtures, load_fixtures
from .sweep import SweepSpec, default_gain_grid, evaluate_cell, run_sweep
from .training import TrainResult, train

__all__ = [
    "EpisodeConfig",
    "Fixture",
    "SweepSpec",
    "TrainResult",
    "build_fixtures",
    "compare_with_sweep",
    "default_gain_grid",
    "ensure_fixtures",
    "evaluate_cell",
    "evaluate_policy",
    "gain_friction_probe",
    "load_fixtures",
    "run_episode",
    "run_sweep",
    "train",
]
