"""Pre-generated evaluation fixtures: trajectory plus friction world.

The on-disk copy is canonical.  Generation writes CSVs (which quantise
to 9 significant digits) and everything downstream loads them back, so
sweep cells, training evals and comparisons all see the same bytes and
per-cell re-runs reproduce exactly.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..trajectory import ReferenceTrajectory, generate_spline, sample_random_waypoints
from ..world import FrictionMap, WorldConfig, generate_world
from .episode import EpisodeConfig

MANIFEST_NAME = "manifest.json"


@dataclass
class Fixture:
    index: int
    trajectory: ReferenceTrajectory
    world: FrictionMap


def build_fixtures(
    master_seed: int,
    count: int,
    episode_cfg: EpisodeConfig,
    world_cfg: WorldConfig,
) -> list[Fixture]:
    """Generate fixtures in memory; one spawned rng stream per fixture."""
    children = np.random.SeedSequence(master_seed).spawn(count)
    fixtures = []
    for i, child in enumerate(children):
        rng = np.random.default_rng(child)
        waypoints = sample_random_waypoints(rng)
        traj = generate_spline(waypoints, ds=episode_cfg.ds, v_ref=episode_cfg.v_ref)
        world = generate_world(rng, traj.bounds(world_cfg.margin), world_cfg)
        fixtures.append(Fixture(i, traj, world))
    return fixtures


def save_fixtures(fixtures, directory, master_seed, episode_cfg, world_cfg):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for fx in fixtures:
        traj_name = f"traj_{fx.index:03d}.csv"
        world_name = f"world_{fx.index:03d}.csv"
        fx.trajectory.save_csv(directory / traj_name)
        fx.world.save_csv(directory / world_name)
        entries.append({
            "index": fx.index,
            "trajectory": traj_name,
            "world": world_name,
            "origin": list(fx.world.origin),
            "cell_size": fx.world.cell_size,
            "mu_high": fx.world.mu_high,
        })
    manifest = {
        "master_seed": master_seed,
        "count": len(fixtures),
        "ds": episode_cfg.ds,
        "v_ref": episode_cfg.v_ref,
        "world": {
            "mu_high": world_cfg.mu_high,
            "mu_low": world_cfg.mu_low,
            "low_fraction": world_cfg.low_fraction,
            "cell_size": world_cfg.cell_size,
            "margin": world_cfg.margin,
        },
        "fixtures": entries,
    }
    with open(directory / MANIFEST_NAME, "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_fixtures(directory):
    """Read fixtures back from disk.  Returns (fixtures, manifest)."""
    directory = Path(directory)
    with open(directory / MANIFEST_NAME) as fh:
        manifest = json.load(fh)
    fixtures = []
    for entry in manifest["fixtures"]:
        traj = ReferenceTrajectory.load_csv(directory / entry["trajectory"])
        world = FrictionMap.load_csv(
            directory / entry["world"], entry["origin"], entry["cell_size"],
            entry["mu_high"],
        )
        fixtures.append(Fixture(entry["index"], traj, world))
    return fixtures, manifest


def fixtures_fingerprint(directory) -> str:
    """sha256 over the manifest and every fixture file, in manifest order."""
    directory = Path(directory)
    h = hashlib.sha256()
    manifest_bytes = (directory / MANIFEST_NAME).read_bytes()
    h.update(manifest_bytes)
    manifest = json.loads(manifest_bytes)
    for entry in manifest["fixtures"]:
        h.update((directory / entry["trajectory"]).read_bytes())
        h.update((directory / entry["world"]).read_bytes())
    return h.hexdigest()


def ensure_fixtures(directory, master_seed, count, episode_cfg, world_cfg):
    """Load fixtures, generating them first if the directory is empty.

    Always returns disk-backed data.  Raises if an existing manifest
    disagrees with the requested seed or count, rather than silently
    evaluating on different terrain.
    """
    directory = Path(directory)
    manifest_path = directory / MANIFEST_NAME
    if not manifest_path.exists():
        fixtures = build_fixtures(master_seed, count, episode_cfg, world_cfg)
        save_fixtures(fixtures, directory, master_seed, episode_cfg, world_cfg)
    fixtures, manifest = load_fixtures(directory)
    if manifest["master_seed"] != master_seed or manifest["count"] != count:
        raise ValueError(
            f"fixtures at {directory} were generated with seed "
            f"{manifest['master_seed']}/count {manifest['count']}, "
            f"requested {master_seed}/{count}"
        )
    return fixtures, fixtures_fingerprint(directory)
