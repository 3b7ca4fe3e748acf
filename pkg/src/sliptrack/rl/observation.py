"""Observation fed to the gain-adaptation agent."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

OBS_DIM = 5

# Fixed per-component scaling applied before the networks.  Chosen so
# typical magnitudes land near [-1, 1]; not adapted during training, so
# checkpoints stay self-contained.
OBS_SCALES = np.array([2.0, 1.0 / math.pi, 2.0, 1.0, 0.25])


@dataclass(frozen=True)
class TrackingObservation:
    """Tracking errors plus the slip measured on the previous step."""

    e: float
    dtheta: float
    dv: float
    slip_dv: float
    slip_domega: float

    def to_array(self) -> np.ndarray:
        return np.array(
            [self.e, self.dtheta, self.dv, self.slip_dv, self.slip_domega]
        )

    def normalized(self) -> np.ndarray:
        return self.to_array() * OBS_SCALES
