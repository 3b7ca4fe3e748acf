"""TOML-backed configuration for the whole workbench."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

try:
    import tomllib
except ImportError:  # python 3.10
    import tomli as tomllib

from .controllers import PredictiveConfig
from .harness.episode import EpisodeConfig
from .metrics import RewardCoeffs
from .rl.sac import SACConfig
from .robot import RobotParams
from .world import WorldConfig

__all__ = ["WorkbenchConfig", "load_config", "config_fingerprint"]

_SECTIONS = {
    "robot": RobotParams,
    "controller": PredictiveConfig,
    "reward": RewardCoeffs,
    "sac": SACConfig,
    "world": WorldConfig,
    "episode": EpisodeConfig,
}


@dataclass
class WorkbenchConfig:
    robot: RobotParams
    controller: PredictiveConfig
    reward: RewardCoeffs
    sac: SACConfig
    world: WorldConfig
    episode: EpisodeConfig


def _build_section(name, cls, data: dict):
    valid = {f.name for f in fields(cls)}
    unknown = set(data) - valid
    if unknown:
        raise ValueError(
            f"unknown key(s) in [{name}]: {', '.join(sorted(unknown))}"
        )
    kwargs = dict(data)
    if name == "sac" and "hidden" in kwargs:
        kwargs["hidden"] = tuple(kwargs["hidden"])
    return cls(**kwargs)


def load_config(path=None) -> WorkbenchConfig:
    """Read a TOML file; missing sections and keys keep their defaults."""
    if path is None:
        data = {}
    else:
        with open(Path(path), "rb") as fh:
            data = tomllib.load(fh)
    unknown = set(data) - set(_SECTIONS)
    if unknown:
        raise ValueError(f"unknown config section(s): {', '.join(sorted(unknown))}")
    sections = {
        name: _build_section(name, cls, data.get(name, {}))
        for name, cls in _SECTIONS.items()
    }
    return WorkbenchConfig(**sections)


def config_fingerprint(config: WorkbenchConfig) -> str:
    payload = json.dumps(
        {name: asdict(getattr(config, name)) for name in _SECTIONS},
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()
