"""Step rewards, slip detection, and per-episode tracking metrics."""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

__all__ = [
    "SLIP_DV_THRESHOLD",
    "SLIP_DOMEGA_THRESHOLD",
    "RewardCoeffs",
    "StepRecord",
    "EpisodeTrace",
    "MetricsReport",
    "step_reward",
    "is_slipping",
    "compute_metrics",
    "aggregate_metrics",
]

# A step counts as slipping when either slip signal exceeds its
# threshold strictly.
SLIP_DV_THRESHOLD = 0.7
SLIP_DOMEGA_THRESHOLD = 3.0


@dataclass
class RewardCoeffs:
    r_dist: float = -20.0
    r_ang: float = -1.0
    r_speed: float = -1.0


def step_reward(e: float, dtheta: float, dv: float, coeffs: RewardCoeffs) -> float:
    """Quadratic penalty on lateral, heading and speed error."""
    return (
        coeffs.r_dist * (e * e)
        + coeffs.r_ang * (dtheta * dtheta)
        + coeffs.r_speed * (dv * dv)
    )


def is_slipping(
    slip_dv: float,
    slip_domega: float,
    dv_threshold: float = SLIP_DV_THRESHOLD,
    domega_threshold: float = SLIP_DOMEGA_THRESHOLD,
) -> bool:
    return abs(slip_dv) > dv_threshold or abs(slip_domega) > domega_threshold


@dataclass
class StepRecord:
    """Everything logged for one control step.

    Errors, slip, reward and state are all post-step: they describe the
    situation after the wheel command for this step was applied.
    """

    t: int
    e: float
    dtheta: float
    dv: float
    slip_dv: float
    slip_domega: float
    omega_r: float
    omega_l: float
    reward: float
    x: float
    y: float
    yaw: float
    v: float
    omega: float
    mu: float
    k_stanley: float
    k_speed: float


_FLOAT_FIELDS = [f.name for f in fields(StepRecord) if f.name != "t"]


class EpisodeTrace:
    """Columnar store of an episode's step records."""

    def __init__(self, columns: dict, reached_goal: bool):
        self.t = np.asarray(columns["t"], dtype=np.int64)
        for name in _FLOAT_FIELDS:
            setattr(self, name, np.asarray(columns[name], dtype=np.float64))
        self.reached_goal = bool(reached_goal)
        if len(self.t) == 0:
            raise ValueError("trace must contain at least one step")

    def __len__(self):
        return len(self.t)

    @classmethod
    def from_records(cls, records, reached_goal: bool) -> "EpisodeTrace":
        cols = {"t": [r.t for r in records]}
        for name in _FLOAT_FIELDS:
            cols[name] = [getattr(r, name) for r in records]
        return cls(cols, reached_goal)

    def records(self) -> list[StepRecord]:
        out = []
        for i in range(len(self.t)):
            kw = {"t": int(self.t[i])}
            for name in _FLOAT_FIELDS:
                kw[name] = float(getattr(self, name)[i])
            out.append(StepRecord(**kw))
        return out

    def save_jsonl(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as fh:
            meta = {"meta": {"reached_goal": self.reached_goal, "n_steps": len(self)}}
            fh.write(json.dumps(meta) + "\n")
            for rec in self.records():
                fh.write(json.dumps(rec.__dict__) + "\n")

    @classmethod
    def load_jsonl(cls, path) -> "EpisodeTrace":
        with open(path) as fh:
            first = json.loads(fh.readline())
            if "meta" not in first:
                raise ValueError(f"{path} missing meta line")
            rows = [json.loads(line) for line in fh if line.strip()]
        cols = {"t": [r["t"] for r in rows]}
        for name in _FLOAT_FIELDS:
            cols[name] = [r[name] for r in rows]
        return cls(cols, first["meta"]["reached_goal"])


@dataclass
class MetricsReport:
    """Per-episode tracking metrics.

    The long-term metrics average over every step; the short-term ones
    restrict to steps flagged as slipping and are None when the episode
    never slipped.  Command effort terms pair each step with its
    predecessor, so there are T-1 of them; both effort metrics still
    divide by their own step count (T or the slip count), not by the
    number of pairs.
    """

    avg_reward: float
    avg_lat: float
    avg_dv: float
    avg_du: float
    e_max: float
    avg_lat_slip: Optional[float]
    avg_dv_slip: Optional[float]
    avg_du_slip: Optional[float]
    slip_step_count: int
    disc_return: float
    n_steps: int

    def as_dict(self) -> dict:
        return dict(self.__dict__)


# Metric columns written to sweep/eval CSV files, in order.
METRIC_NAMES = [
    "avg_reward",
    "avg_lat",
    "avg_dv",
    "avg_du",
    "e_max",
    "avg_lat_slip",
    "avg_dv_slip",
    "avg_du_slip",
    "disc_return",
]


def compute_metrics(trace: EpisodeTrace, gamma: float = 0.99) -> MetricsReport:
    n = len(trace)
    abs_e = np.abs(trace.e)
    abs_dv = np.abs(trace.dv)
    rewards = trace.reward

    du = np.zeros(n)
    if n > 1:
        dr = np.diff(trace.omega_r)
        dl = np.diff(trace.omega_l)
        # du[i] is the command change arriving at step i (1-based pairing)
        du[1:] = np.sqrt(dr * dr + dl * dl)

    slipping = (abs(trace.slip_dv) > SLIP_DV_THRESHOLD) | (
        abs(trace.slip_domega) > SLIP_DOMEGA_THRESHOLD
    )
    n_slip = int(np.count_nonzero(slipping))

    acc = 0.0
    g = 1.0
    for r in rewards:
        acc = acc + g * float(r)
        g = g * gamma
    disc_return = acc

    if n_slip > 0:
        avg_lat_slip = float(np.sum(abs_e[slipping])) / n_slip
        avg_dv_slip = float(np.sum(abs_dv[slipping])) / n_slip
        avg_du_slip = float(np.sum(du[slipping])) / n_slip
    else:
        avg_lat_slip = avg_dv_slip = avg_du_slip = None

    return MetricsReport(
        avg_reward=float(np.sum(rewards)) / n,
        avg_lat=float(np.sum(abs_e)) / n,
        avg_dv=float(np.sum(abs_dv)) / n,
        avg_du=float(np.sum(du)) / n,
        e_max=float(np.max(abs_e)),
        avg_lat_slip=avg_lat_slip,
        avg_dv_slip=avg_dv_slip,
        avg_du_slip=avg_du_slip,
        slip_step_count=n_slip,
        disc_return=disc_return,
        n_steps=n,
    )


def aggregate_metrics(reports: list[MetricsReport]) -> dict:
    """Mean of each metric over a list of episodes.

    Plain left-to-right accumulation so the result only depends on the
    episode order.  Slip metrics average over the episodes that actually
    slipped; if none did they come out None.
    """
    if not reports:
        raise ValueError("no reports to aggregate")
    out = {}
    for name in METRIC_NAMES:
        acc = 0.0
        count = 0
        for rep in reports:
            value = getattr(rep, name)
            if value is None:
                continue
            acc = acc + value
            count += 1
        out[name] = acc / count if count else None
    out["slip_step_count"] = sum(r.slip_step_count for r in reports)
    return out
