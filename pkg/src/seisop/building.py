"""Nonlinear shear-building model with story-level smooth hysteresis.

A lumped-mass chain: floor masses m_i, story stiffnesses k_i, modal
damping, and a smooth hysteresis law per story. Interstory deformations
follow from global displacements via the compatibility matrix A_f
(v_1 = u_1, v_i = u_i - u_{i-1}).

Story shear force:  r_i = k_i * (alpha * v_i + (1 - alpha) * h_i)
Hysteretic state:   dh_i/dt = -delta*|vdot_i|*|h_i|^(n_exp-1)*h_i
                              - zeta*vdot_i*|h_i|^n_exp + A*vdot_i
"""

from dataclasses import dataclass

import numpy as np

from .linalg import solve_sym_generalized_eig


@dataclass(frozen=True)
class BoucWenParams:
    alpha: float  # post-to-pre yield stiffness ratio
    n_exp: float  # hysteresis exponent
    A: float
    delta: float  # m^-n_exp
    zeta: float  # m^-n_exp
    u_y: float  # yield displacement, m

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.n_exp < 1:
            raise ValueError(f"n_exp must be >= 1, got {self.n_exp}")
        if not self.u_y > 0:
            raise ValueError(f"u_y must be positive, got {self.u_y}")

    @classmethod
    def from_yield_displacement(cls, u_y=0.01, alpha=0.1, n_exp=3.0, A=1.0):
        """Preset with delta = zeta = 1/(2*u_y^n_exp).

        With A = 1 this pins the ultimate hysteretic displacement
        (A/(delta+zeta))^(1/n_exp) at exactly u_y.
        """
        dz = 1.0 / (2.0 * u_y**n_exp)
        return cls(alpha=alpha, n_exp=n_exp, A=A, delta=dz, zeta=dz, u_y=u_y)

    @property
    def ultimate_h(self):
        return (self.A / (self.delta + self.zeta)) ** (1.0 / self.n_exp)


@dataclass(frozen=True)
class ShearBuildingModel:
    masses: np.ndarray  # kg, per floor
    stiffnesses: np.ndarray  # N/m, per story
    zeta_damp: float  # modal damping ratio, all modes
    bw: BoucWenParams

    def __post_init__(self):
        m = np.atleast_1d(np.asarray(self.masses, dtype=np.float64))
        k = np.atleast_1d(np.asarray(self.stiffnesses, dtype=np.float64))
        if m.shape != k.shape or m.ndim != 1:
            raise ValueError("masses and stiffnesses must be 1-D and the same length")
        if np.any(m <= 0) or np.any(k <= 0):
            raise ValueError("all masses and stiffnesses must be positive")
        if not 0.0 <= self.zeta_damp < 1.0:
            raise ValueError(f"zeta_damp must be in [0, 1), got {self.zeta_damp}")
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "stiffnesses", k)

    @property
    def n_d(self):
        return self.masses.shape[0]

    def mass_matrix(self):
        return np.diag(self.masses)

    def compat_matrix(self):
        """A_f mapping global displacements to interstory deformations."""
        Af = np.eye(self.n_d)
        idx = np.arange(1, self.n_d)
        Af[idx, idx - 1] = -1.0
        return Af

    def elastic_stiffness_matrix(self):
        Af = self.compat_matrix()
        return Af.T @ np.diag(self.stiffnesses) @ Af

    def modes(self):
        """(omega, Phi): natural frequencies (rad/s, ascending) and
        mass-normalized mode shapes of the elastic pencil."""
        lam, Phi = solve_sym_generalized_eig(
            self.elastic_stiffness_matrix(), self.mass_matrix()
        )
        return np.sqrt(lam), Phi


def paper_building(n_d=5, mass=3.0e4, stiffness=2.0e7, zeta_damp=0.05, bw=None):
    """Default five-story system.

    The story stiffness is a documented default, not a published value;
    override `stiffness` to study other systems.
    """
    if bw is None:
        bw = BoucWenParams.from_yield_displacement()
    return ShearBuildingModel(
        masses=np.full(n_d, mass),
        stiffnesses=np.full(n_d, stiffness),
        zeta_damp=zeta_damp,
        bw=bw,
    )


def build_modal_damping(model):
    """Damping matrix giving ratio zeta_damp in every elastic mode:
    C = M Phi diag(2 zeta omega) Phi^T M."""
    omega, Phi = model.modes()
    M = model.mass_matrix()
    C = M @ Phi @ np.diag(2.0 * model.zeta_damp * omega) @ Phi.T @ M
    return 0.5 * (C + C.T)  # symmetrize roundoff


def restoring_force(model, v, h):
    """Story shear forces r_i = k_i*(alpha*v_i + (1-alpha)*h_i).

    Accepts batched input with story axis last. The corresponding global
    nodal force vector is A_f^T r (story i shear acts on floors i and
    i-1 with opposite signs).
    """
    bw = model.bw
    return model.stiffnesses * (bw.alpha * v + (1.0 - bw.alpha) * h)


def hysteresis_rate(bw, vdot, h):
    """dh/dt of the hysteretic state; sign-safe at h = 0 for n_exp > 1."""
    habs = np.abs(h)
    h_pow = habs ** (bw.n_exp - 1.0)
    return (
        -bw.delta * np.abs(vdot) * h_pow * h
        - bw.zeta * vdot * h_pow * habs
        + bw.A * vdot
    )
