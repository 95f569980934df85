"""Uniform time grids and multi-channel response trajectories.

Channel ordering convention used throughout: story 1 is channel 0,
stories ascend with channel index. Single-channel trajectories hold
ground accelerations.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class TimeGrid:
    """Uniform temporal discretization: samples at t_k = k*dt, k = 0..n_t-1."""

    dt: float
    n_t: int

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.n_t < 2:
            raise ValueError(f"n_t must be >= 2, got {self.n_t}")

    @property
    def duration(self):
        return (self.n_t - 1) * self.dt

    def times(self):
        return np.arange(self.n_t) * self.dt

    def refined(self, factor):
        """Grid with `factor` substeps per original step (same duration)."""
        return TimeGrid(self.dt / factor, (self.n_t - 1) * factor + 1)


@dataclass(frozen=True)
class Trajectory:
    """Real-valued response histories on a time grid, shape [n_ch, n_t]."""

    grid: TimeGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim == 1:
            v = v[None, :]
        if v.ndim != 2 or v.shape[1] != self.grid.n_t:
            raise ValueError(
                f"values must have shape [n_ch, {self.grid.n_t}], got {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("trajectory contains non-finite entries")
        object.__setattr__(self, "values", v)

    @property
    def n_ch(self):
        return self.values.shape[0]

    def channel(self, i):
        return self.values[i]
