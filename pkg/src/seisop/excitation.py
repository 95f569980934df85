"""Stochastic ground-acceleration synthesis.

Band-limited white noise built as a finite Fourier series with
independent standard Gaussian coefficients:

    a_g(t) = sigma * sum_{j=1}^{n/2} [ X_j cos(w_j t) + X_{n/2+j} sin(w_j t) ]

with w_j = j*dw, sigma = sqrt(2*S*dw) and cutoff w_cut = (n/2)*dw.
The cutoff is derived from (n, dw) rather than stored separately, so the
spectral description cannot contradict itself. At any fixed t the
process is zero-mean Gaussian with variance sigma^2 * n/2 = 2*S*w_cut.
"""

from dataclasses import dataclass

import numpy as np

from .grid import TimeGrid, Trajectory
from .rng import standard_normal


@dataclass(frozen=True)
class WhiteNoiseSpec:
    """Frequency-domain description of the synthetic excitation.

    S      spectral intensity (m^2/s^3)
    n      number of Gaussian coefficients (even, cos + sin halves)
    d_omega  frequency increment (rad/s)
    grid   sampling grid for the synthesized record
    """

    S: float
    n: int
    d_omega: float
    grid: TimeGrid

    def __post_init__(self):
        if not self.S > 0:
            raise ValueError(f"spectral intensity S must be positive, got {self.S}")
        if self.n < 2 or self.n % 2 != 0:
            raise ValueError(f"n must be even and >= 2, got {self.n}")
        if not self.d_omega > 0:
            raise ValueError(f"d_omega must be positive, got {self.d_omega}")

    @property
    def sigma(self):
        return np.sqrt(2.0 * self.S * self.d_omega)

    @property
    def omega_cut(self):
        return (self.n // 2) * self.d_omega

    @property
    def pointwise_variance(self):
        """Analytic Var[a_g(t)] at any fixed t: sigma^2 * n/2."""
        return self.sigma**2 * (self.n // 2)


def paper_spec(dt=0.01, duration=30.0, S=0.015, n=1200, d_omega=np.pi / 30.0):
    """Default broadband configuration (20*pi rad/s cutoff, 30 s records)."""
    n_t = int(round(duration / dt)) + 1
    return WhiteNoiseSpec(S=S, n=n, d_omega=d_omega, grid=TimeGrid(dt, n_t))


def synthesize(spec, rng):
    """One ground-motion record; deterministic for a given stream."""
    X = standard_normal(rng, spec.n)
    values = _evaluate(spec, X)
    return Trajectory(spec.grid, values[None, :])


def synthesize_batch(spec, rng, count):
    """`count` records from indexed child streams, stacked [count, n_t].

    Record i uses rng.child(i), so individual records can be regenerated
    without synthesizing the whole batch.
    """
    out = np.empty((count, spec.grid.n_t))
    for i in range(count):
        X = standard_normal(rng.child(i), spec.n)
        out[i] = _evaluate(spec, X)
    return out


def _evaluate(spec, X):
    half = spec.n // 2
    t = spec.grid.times()
    omega = np.arange(1, half + 1) * spec.d_omega
    phase = np.outer(omega, t)  # [n/2, n_t]
    return spec.sigma * (X[:half] @ np.cos(phase) + X[half:] @ np.sin(phase))
