"""Grid friction world: square cells with one of two friction levels."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = ["WorldConfig", "FrictionMap", "generate_world"]


@dataclass
class WorldConfig:
    mu_high: float = 0.9
    mu_low: float = 0.01
    low_fraction: float = 0.3
    cell_size: float = 1.0
    margin: float = 1.0


class FrictionMap:
    """Row-major friction grid anchored at an origin.

    A point maps to cell (i, j) = (floor((x-ox)/cell), floor((y-oy)/cell)),
    so each cell owns its lower/left edge.  Queries outside the grid
    return the high (default) friction value.
    """

    def __init__(self, grid, origin, cell_size: float, mu_high: float):
        self.grid = np.asarray(grid, dtype=np.float64)
        if self.grid.ndim != 2:
            raise ValueError("grid must be 2-d")
        self.origin = (float(origin[0]), float(origin[1]))
        self.cell_size = float(cell_size)
        self.mu_high = float(mu_high)

    @property
    def shape(self):
        return self.grid.shape

    def cell_index(self, x: float, y: float):
        i = math.floor((x - self.origin[0]) / self.cell_size)
        j = math.floor((y - self.origin[1]) / self.cell_size)
        return i, j

    def mu_at(self, x: float, y: float) -> float:
        i, j = self.cell_index(x, y)
        if 0 <= i < self.grid.shape[0] and 0 <= j < self.grid.shape[1]:
            return float(self.grid[i, j])
        return self.mu_high

    def low_cell_count(self, threshold: float | None = None) -> int:
        thr = threshold if threshold is not None else self.mu_high
        return int(np.count_nonzero(self.grid < thr))

    def save_csv(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        ni, nj = self.grid.shape
        with open(path, "w") as fh:
            fh.write("cell_i,cell_j,mu\n")
            for i in range(ni):
                for j in range(nj):
                    fh.write(f"{i},{j},{self.grid[i, j]:.9g}\n")

    @classmethod
    def load_csv(cls, path, origin, cell_size: float, mu_high: float) -> "FrictionMap":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        if data.shape[1] != 3:
            raise ValueError(f"expected 3 columns in {path}, got {data.shape[1]}")
        ii = data[:, 0].astype(np.int64)
        jj = data[:, 1].astype(np.int64)
        grid = np.full((int(ii.max()) + 1, int(jj.max()) + 1), mu_high)
        grid[ii, jj] = data[:, 2]
        return cls(grid, origin, cell_size, mu_high)


def generate_world(
    rng: np.random.Generator, bounds, config: WorldConfig
) -> FrictionMap:
    """Tile a bounding box with cells and scatter low-friction patches.

    bounds is (xmin, ymin, xmax, ymax).  Exactly round(low_fraction * n)
    of the n cells get the low friction value, chosen uniformly without
    replacement.
    """
    xmin, ymin, xmax, ymax = bounds
    ni = max(1, math.ceil((xmax - xmin) / config.cell_size))
    nj = max(1, math.ceil((ymax - ymin) / config.cell_size))
    grid = np.full((ni, nj), config.mu_high, dtype=np.float64)
    n_low = int(round(config.low_fraction * ni * nj))
    if n_low > 0:
        flat = rng.choice(ni * nj, size=n_low, replace=False)
        grid.flat[flat] = config.mu_low
    return FrictionMap(grid, (xmin, ymin), config.cell_size, config.mu_high)
