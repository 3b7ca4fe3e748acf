from .buffer import ReplayBuffer, Transition
from .nets import MLP, Adam, polyak_update
from .observation import OBS_DIM, OBS_SCALES, TrackingObservation
from .sac import SACAgent, SACConfig, config_hash

__all__ = [
    "OBS_DIM",
    "OBS_SCALES",
    "MLP",
    "Adam",
    "ReplayBuffer",
    "SACAgent",
    "SACConfig",
    "TrackingObservation",
    "Transition",
    "config_hash",
    "polyak_update",
]
