"""Simplified-physics operators mapping a ground motion to a coarse
trajectory z(t) on the full time grid.

Three interchangeable strategies:
  * ELS            behavioral simplification: linear system with the
                   initial elastic stiffness
  * modal           spatial simplification: projection onto the r lowest
                   mass-normalized modes, nonlinear forces projected
  * relaxed         temporal simplification: full nonlinear model driven
                   by the excitation decimated to step k*dt, response
                   linearly interpolated back to the fine grid

All three reuse the one RK4 integrator, so the identity cases (alpha=1,
r=n_d, k=1) hold exactly rather than approximately.
"""

from dataclasses import dataclass

import numpy as np

from .building import build_modal_damping, hysteresis_rate, restoring_force
from .grid import TimeGrid, Trajectory
from .integrators import BlowUpError, half_step_samples, rk4_record, \
    simulate_batch, simulate_linear_batch

KINDS = ("els", "modal", "relaxed")


@dataclass(frozen=True)
class SimplifierKind:
    """Which coarse-graining strategy to use and its single parameter.

    kind='els' ignores param; 'modal' uses param = r retained modes;
    'relaxed' uses param = k time-step multiplier.
    """

    kind: str
    param: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind in ("modal", "relaxed") and self.param < 1:
            raise ValueError(f"{self.kind} requires param >= 1, got {self.param}")

    def label(self):
        if self.kind == "els":
            return "els"
        return f"{self.kind}({self.param})"


def els_response_batch(model, ag, grid, substeps=1):
    """Equivalent-linear response: elastic stiffness, original M and C."""
    K = model.elastic_stiffness_matrix()
    return simulate_linear_batch(model, ag, grid, K, substeps=substeps)


def els_response(model, a_g, substeps=1):
    z = els_response_batch(model, a_g.values, a_g.grid, substeps=substeps)
    return Trajectory(a_g.grid, z[0])


@dataclass(frozen=True)
class ModalReducedModel:
    """Projection of the full model onto the r lowest modes.

    The hysteretic states stay at story level (driven by deformations of
    the back-projected displacements Phi_r q); only the equation of
    motion is reduced.
    """

    model: object
    Phi_r: np.ndarray  # [n_d, r], mass-orthonormal
    M_r: np.ndarray  # [r, r], identity for mass-normalized modes
    C_r: np.ndarray  # [r, r]
    load_r: np.ndarray  # Phi_r^T M 1, length r

    @property
    def r(self):
        return self.Phi_r.shape[1]


def build_modal_reduced(model, r):
    if not 1 <= r <= model.n_d:
        raise ValueError(f"r must be in [1, {model.n_d}], got {r}")
    _, Phi = model.modes()
    Phi_r = Phi[:, :r]
    M = model.mass_matrix()
    C = build_modal_damping(model)
    ones = np.ones(model.n_d)
    return ModalReducedModel(
        model=model,
        Phi_r=Phi_r,
        M_r=Phi_r.T @ M @ Phi_r,
        C_r=Phi_r.T @ C @ Phi_r,
        load_r=Phi_r.T @ (M @ ones),
    )


def modal_response_batch(reduced, ag, grid, substeps=1):
    ag = np.asarray(ag, dtype=np.float64)
    B, n_t = ag.shape
    if n_t != grid.n_t:
        raise ValueError(f"ag has {n_t} samples, grid expects {grid.n_t}")
    model = reduced.model
    n, r = model.n_d, reduced.r
    Af = model.compat_matrix()
    Phi = reduced.Phi_r
    Mr_inv = np.linalg.inv(reduced.M_r)
    Cr = reduced.C_r
    load = reduced.load_r
    bw = model.bw
    ag_half = half_step_samples(ag, substeps)
    AfPhi = Af @ Phi  # deformations of the back-projected displacements

    def deriv(hi, y):
        q, qd, h = y[:, :r], y[:, r : 2 * r], y[:, 2 * r :]
        v = q @ AfPhi.T
        vd = qd @ AfPhi.T
        rf = restoring_force(model, v, h)
        # projected nonlinear force: Phi^T A_f^T rf
        force = -np.outer(ag_half[:, hi], load) - qd @ Cr - rf @ AfPhi
        return np.concatenate(
            [qd, force @ Mr_inv.T, hysteresis_rate(bw, vd, h)], axis=1
        )

    y0 = np.zeros((B, 2 * r + n))
    ys = rk4_record(y0, deriv, n_t, substeps, grid.dt / substeps)
    q = ys[:, :, :r]  # [B, n_t, r]
    z = q @ Phi.T  # back to physical coordinates
    return np.swapaxes(z, 1, 2)


def modal_response(reduced, a_g, substeps=1):
    z = modal_response_batch(reduced, a_g.values, a_g.grid, substeps=substeps)
    return Trajectory(a_g.grid, z[0])


def relaxed_response_batch(model, ag, grid, k, substeps=None):
    """Coarse-time solve: decimate excitation to every k-th sample,
    integrate on the coarse grid, linearly interpolate back.

    `substeps` controls the integrator's internal step on the coarse
    grid; the default 2k keeps the internal step at half the fine dt,
    which the explicit integrator needs for stability of the hysteretic
    state on near-yield records (the fine dt alone is marginal). The
    information reduction comes from the decimated excitation and the
    coarse output sampling, not from solver error. k=1 keeps a single
    internal step and reproduces the full simulation bit for bit.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if substeps is None:
        substeps = k if k == 1 else 2 * k
    ag = np.asarray(ag, dtype=np.float64)
    B, n_t = ag.shape
    coarse_idx = np.arange(0, n_t, k)
    ag_coarse = ag[:, coarse_idx]
    coarse_grid = TimeGrid(k * grid.dt, len(coarse_idx))
    try:
        z_coarse = simulate_batch(model, ag_coarse, coarse_grid, substeps=substeps)
    except BlowUpError as e:
        raise BlowUpError(f"coarse-grid (k={k}) integration failed: {e}") from e
    if k == 1:
        return z_coarse
    t_fine = grid.times()
    t_coarse = coarse_grid.times()
    z = np.empty((B, model.n_d, n_t))
    for b in range(B):
        for i in range(model.n_d):
            z[b, i] = np.interp(t_fine, t_coarse, z_coarse[b, i])
    return z


def relaxed_response(model, a_g, k, substeps=None):
    z = relaxed_response_batch(model, a_g.values, a_g.grid, k, substeps=substeps)
    return Trajectory(a_g.grid, z[0])


def apply_simplifier(model, simp, ag, grid, substeps=1):
    """Dispatch on SimplifierKind; returns z as [B, n_d, n_t]."""
    if simp.kind == "els":
        return els_response_batch(model, ag, grid, substeps=substeps)
    if simp.kind == "modal":
        reduced = build_modal_reduced(model, simp.param)
        return modal_response_batch(reduced, ag, grid, substeps=substeps)
    return relaxed_response_batch(model, ag, grid, simp.param)
