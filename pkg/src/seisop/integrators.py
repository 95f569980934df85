"""Classical 4th-order Runge-Kutta integration of the building dynamics.

The hysteretic evolution law is a first-order ODE, so the equation of
motion embeds naturally in the augmented state (u, udot, h) and one
explicit integrator serves the nonlinear system, its linearization and
the modal-reduced variant alike. Ground acceleration is linearly
interpolated between input samples; interpolation kinks land exactly on
step boundaries, so the integrator sees a smooth right-hand side within
every step.
"""

import numpy as np

from .building import hysteresis_rate, restoring_force, build_modal_damping
from .grid import Trajectory


class BlowUpError(RuntimeError):
    """Integration produced non-finite state."""


def half_step_samples(values, substeps):
    """Linear interpolation of [B, n_t] samples onto the half-substep grid.

    Output has 2*substeps*(n_t - 1) + 1 points per record: one per RK4
    stage time (t, t + h/2, t + h for every substep of size h).
    """
    B, n_t = values.shape
    m = 2 * substeps
    w = np.arange(m) / m
    # each original interval expands into m points, + the final sample
    left = values[:, :-1, None]
    right = values[:, 1:, None]
    fine = left * (1.0 - w) + right * w
    out = np.empty((B, m * (n_t - 1) + 1))
    out[:, :-1] = fine.reshape(B, -1)
    out[:, -1] = values[:, -1]
    return out


def rk4_record(y0, deriv, n_record, substeps, h, on_blowup=None):
    """Integrate y' = deriv(half_index, y) from batched state y0 [B, S].

    Records the state at every outer grid point (n_record points
    including the initial state). `half_index` counts global half-steps
    of size h/2, matching `half_step_samples` indexing. Returns
    [B, n_record, S].
    """
    B, S = y0.shape
    out = np.empty((B, n_record, S))
    out[:, 0] = y0
    y = y0.copy()
    half = 0
    for i in range(1, n_record):
        for _ in range(substeps):
            k1 = deriv(half, y)
            k2 = deriv(half + 1, y + (0.5 * h) * k1)
            k3 = deriv(half + 1, y + (0.5 * h) * k2)
            k4 = deriv(half + 2, y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            half += 2
        if not np.all(np.isfinite(y)):
            bad = np.nonzero(~np.all(np.isfinite(y), axis=1))[0]
            t = i * substeps * h
            msg = (
                f"state became non-finite at t = {t:.6g} s"
                f" (record indices {bad.tolist()}); try more substeps"
            )
            if on_blowup:
                msg = on_blowup(msg)
            raise BlowUpError(msg)
        out[:, i] = y
    return out


def simulate_batch(model, ag, grid, substeps=1, with_velocity=False):
    """Nonlinear response of a batch of records.

    ag: [B, n_t] ground accelerations on `grid`. Returns displacements
    [B, n_d, n_t] (plus velocities and hysteretic states if requested).
    Initial state is zero; zero input is exactly preserved.
    """
    ag = np.asarray(ag, dtype=np.float64)
    B, n_t = ag.shape
    if n_t != grid.n_t:
        raise ValueError(f"ag has {n_t} samples, grid expects {grid.n_t}")
    if substeps < 1:
        raise ValueError("substeps must be >= 1")
    n = model.n_d
    m = model.masses
    Af = model.compat_matrix()
    C = build_modal_damping(model)
    ag_half = half_step_samples(ag, substeps)
    bw = model.bw

    def deriv(hi, y):
        u, ud, h = y[:, :n], y[:, n : 2 * n], y[:, 2 * n :]
        v = u @ Af.T
        vd = ud @ Af.T
        r = restoring_force(model, v, h)
        force = -np.outer(ag_half[:, hi], m) - ud @ C - r @ Af
        return np.concatenate([ud, force / m, hysteresis_rate(bw, vd, h)], axis=1)

    y0 = np.zeros((B, 3 * n))
    ys = rk4_record(y0, deriv, n_t, substeps, grid.dt / substeps)
    u = np.swapaxes(ys[:, :, :n], 1, 2)
    if with_velocity:
        ud = np.swapaxes(ys[:, :, n : 2 * n], 1, 2)
        h = np.swapaxes(ys[:, :, 2 * n :], 1, 2)
        return u, ud, h
    return u


def simulate_linear_batch(model, ag, grid, K, substeps=1):
    """Linear response with stiffness matrix K (same damping and masses)."""
    ag = np.asarray(ag, dtype=np.float64)
    B, n_t = ag.shape
    if n_t != grid.n_t:
        raise ValueError(f"ag has {n_t} samples, grid expects {grid.n_t}")
    n = model.n_d
    m = model.masses
    C = build_modal_damping(model)
    ag_half = half_step_samples(ag, substeps)

    def deriv(hi, y):
        u, ud = y[:, :n], y[:, n:]
        force = -np.outer(ag_half[:, hi], m) - ud @ C - u @ K
        return np.concatenate([ud, force / m], axis=1)

    y0 = np.zeros((B, 2 * n))
    ys = rk4_record(y0, deriv, n_t, substeps, grid.dt / substeps)
    return np.swapaxes(ys[:, :, :n], 1, 2)


def simulate_nonlinear(model, a_g, substeps=1):
    """Single-record convenience wrapper returning a Trajectory."""
    if a_g.n_ch != 1:
        raise ValueError("ground motion must be single-channel")
    u = simulate_batch(model, a_g.values, a_g.grid, substeps=substeps)
    return Trajectory(a_g.grid, u[0])
