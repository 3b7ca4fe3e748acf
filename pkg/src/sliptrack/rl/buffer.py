"""Fixed-capacity FIFO replay buffer backed by preallocated arrays."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..controllers import Gains
from .observation import OBS_DIM, TrackingObservation


@dataclass(frozen=True)
class Transition:
    obs: TrackingObservation
    action: Gains
    action_raw: tuple  # pre-squash network sample behind the gains
    reward: float
    next_obs: TrackingObservation
    done: bool


class ReplayBuffer:
    def __init__(self, capacity: int):
        self.capacity = int(capacity)
        self.obs = np.zeros((capacity, OBS_DIM))
        self.action_raw = np.zeros((capacity, 2))
        self.action = np.zeros((capacity, 2))
        self.reward = np.zeros(capacity)
        self.next_obs = np.zeros((capacity, OBS_DIM))
        self.done = np.zeros(capacity)
        self.head = 0
        self.size = 0

    def __len__(self):
        return self.size

    def add(self, tr: Transition):
        i = self.head
        self.obs[i] = tr.obs.to_array()
        self.action_raw[i] = tr.action_raw
        self.action[i] = (tr.action.k_stanley, tr.action.k_speed)
        self.reward[i] = tr.reward
        self.next_obs[i] = tr.next_obs.to_array()
        self.done[i] = 1.0 if tr.done else 0.0
        self.head = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, rng: np.random.Generator, batch_size: int) -> dict:
        idx = rng.integers(0, self.size, size=batch_size)
        return {
            "obs": self.obs[idx],
            "action_raw": self.action_raw[idx],
            "action": self.action[idx],
            "reward": self.reward[idx],
            "next_obs": self.next_obs[idx],
            "done": self.done[idx],
        }
