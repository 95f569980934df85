"""Closed-form linear-regression refinement of composite predictions.

Per degree of freedom, a stationary affine model over sampled
(time, record) pairs:

    u_tilde_i(t) = w_i1 + w_i2 * z_i(t) + w_i3 * u_hat_i(t) + eps_i(t)

with eps_i zero-mean Gaussian of constant standard deviation sigma_i.
Calibration is ordinary least squares on `sample_count` uniformly
sampled (with replacement) response values from the training set;
sigma_i is the maximum-likelihood residual scale (divide by the sample
count).
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .rng import RngStream

RIDGE_FACTOR = 1e-8


@dataclass(frozen=True)
class RefinementModel:
    weights: np.ndarray  # [n_d, 3]: intercept, z, u_hat
    sigma: np.ndarray  # [n_d], residual std (m)
    sample_count: int
    seed: int

    @property
    def n_d(self):
        return self.weights.shape[0]


def fit_refinement(z, u_hat, u, sample_count=1000, seed=0):
    """Fit per-DOF weights and residual scales.

    z, u_hat, u: [N, n_d, n_t] intermediate, predicted and true
    trajectories over the training set. The (record, time) index pairs
    are drawn uniformly with replacement, deterministically per seed.
    """
    z = np.asarray(z, dtype=np.float64)
    u_hat = np.asarray(u_hat, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    if z.shape != u_hat.shape or z.shape != u.shape:
        raise ValueError("z, u_hat and u must share the shape [N, n_d, n_t]")
    N, n_d, n_t = z.shape
    gen = RngStream(seed).substream("regression").generator()
    rec = gen.integers(0, N, size=sample_count)
    tk = gen.integers(0, n_t, size=sample_count)

    weights = np.empty((n_d, 3))
    sigma = np.empty(n_d)
    for i in range(n_d):
        X = np.column_stack(
            [np.ones(sample_count), z[rec, i, tk], u_hat[rec, i, tk]]
        )
        y = u[rec, i, tk]
        XtX = X.T @ X
        if np.linalg.matrix_rank(XtX) < 3:
            warnings.warn(
                f"rank-deficient refinement design for DOF {i + 1}; "
                "solving ridge-stabilized normal equations"
            )
        lam = RIDGE_FACTOR * np.trace(XtX)
        w = np.linalg.solve(XtX + lam * np.eye(3), X.T @ y)
        resid = y - X @ w
        weights[i] = w
        sigma[i] = np.sqrt(np.mean(resid**2))
    return RefinementModel(
        weights=weights, sigma=sigma, sample_count=sample_count, seed=seed
    )


def refine_predict(model, z, u_hat):
    """(mean trajectory [n_d, n_t], per-DOF std [n_d]).

    Accepts batched input [N, n_d, n_t] as well, with the DOF axis
    second to last.
    """
    z = np.asarray(z, dtype=np.float64)
    u_hat = np.asarray(u_hat, dtype=np.float64)
    if z.shape != u_hat.shape:
        raise ValueError(f"shape mismatch: {z.shape} vs {u_hat.shape}")
    w = model.weights
    shape = [1] * z.ndim
    shape[-2] = model.n_d
    w1 = w[:, 0].reshape(shape)
    w2 = w[:, 1].reshape(shape)
    w3 = w[:, 2].reshape(shape)
    return w1 + w2 * z + w3 * u_hat, model.sigma.copy()


def render_refinement(model):
    """Human-readable, versioned text block (round-trips exactly)."""
    lines = [f"samples {model.sample_count}", f"seed {model.seed}"]
    for i in range(model.n_d):
        # repr of a python float round-trips bit-exactly
        w = [float(x) for x in model.weights[i]]
        s = float(model.sigma[i])
        lines.append(
            f"dof {i + 1} w1 {w[0]!r} w2 {w[1]!r} w3 {w[2]!r} sigma {s!r}"
        )
    return "\n".join(lines) + "\n"


def parse_refinement(text):
    lines = [ln for ln in text.strip().splitlines() if ln]
    if len(lines) < 3 or not lines[0].startswith("samples "):
        raise ValueError("malformed refinement block")
    sample_count = int(lines[0].split()[1])
    seed = int(lines[1].split()[1])
    weights, sigma = [], []
    for ln in lines[2:]:
        tok = ln.split()
        if tok[0] != "dof":
            raise ValueError(f"malformed refinement line: {ln!r}")
        weights.append([float(tok[3]), float(tok[5]), float(tok[7])])
        sigma.append(float(tok[9]))
    return RefinementModel(
        weights=np.array(weights),
        sigma=np.array(sigma),
        sample_count=sample_count,
        seed=seed,
    )
