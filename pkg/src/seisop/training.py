"""Training machinery: relative L2 loss, Adam, channel normalization and
the mini-batch loop shared by the baseline and composite models.

The training loss is the sum over samples and channels of Euclidean
trajectory-error norms, normalized by the same sum for the targets
(a per-record form, distinct from the pooled evaluation metric in
`seisop.metrics`).
"""

from dataclasses import dataclass

import numpy as np

from .fno import fno_backward, fno_forward, init_params


def relative_l2_loss(pred, target):
    """(loss, dloss/dpred) on [B, C, n] tensors.

    loss = sum_{j,i} ||pred_ji - target_ji||_2 / sum_{j,i} ||target_ji||_2.
    Targets with identically zero norm contribute nothing to the
    denominator; an all-zero target batch is rejected.
    """
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch: {pred.shape} vs {target.shape}")
    err = pred - target
    err_norms = np.sqrt(np.sum(err**2, axis=-1))  # [B, C]
    denom = float(np.sum(np.sqrt(np.sum(target**2, axis=-1))))
    if denom == 0.0:
        raise ValueError("all target channels have zero norm")
    loss = float(np.sum(err_norms)) / denom
    safe = np.where(err_norms > 0.0, err_norms, 1.0)
    grad = err / (denom * safe[:, :, None])
    grad[err_norms == 0.0] = 0.0
    return loss, grad


def _float_view(a):
    """Real view of an array; complex entries appear as interleaved
    (re, im) pairs, so Adam treats them as independent reals."""
    return a.view(np.float64) if np.iscomplexobj(a) else a


def adam_init(params):
    state = {"t": 0, "m": {}, "v": {}}
    for k, p in params.items():
        fv = _float_view(p)
        state["m"][k] = np.zeros_like(fv)
        state["v"][k] = np.zeros_like(fv)
    return state


def adam_step(params, grads, state, lr, beta1=0.9, beta2=0.999, eps=1e-8):
    """One Adam update with bias correction; mutates params and state."""
    state["t"] += 1
    t = state["t"]
    c1 = 1.0 - beta1**t
    c2 = 1.0 - beta2**t
    for k, p in params.items():
        g = _float_view(np.ascontiguousarray(grads[k]))
        pv = _float_view(p)
        m = state["m"][k]
        v = state["v"][k]
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * g * g
        pv -= lr * (m / c1) / (np.sqrt(v / c2) + eps)
    return params, state


@dataclass(frozen=True)
class ChannelStats:
    """Per-channel z-score statistics fit on the training set."""

    mean: np.ndarray  # [C]
    std: np.ndarray  # [C]

    @classmethod
    def fit(cls, data):
        """data: [N, C, n]."""
        mean = data.mean(axis=(0, 2))
        std = data.std(axis=(0, 2))
        std = np.where(std > 0.0, std, 1.0)
        return cls(mean=mean, std=std)

    def normalize(self, data):
        return (data - self.mean[:, None]) / self.std[:, None]

    def denormalize(self, data):
        return data * self.std[:, None] + self.mean[:, None]


@dataclass(frozen=True)
class TrainingParams:
    batch_size: int = 20
    epochs: int = 300
    lr: float = 1e-3
    lr_decay: float = 0.5
    lr_decay_every: int = 100  # epochs between step decays


def assemble_input(features, grid):
    """Stack function channels with normalized time t/tau: [N, C+1, n]."""
    N, _, n_t = features.shape
    t_norm = grid.times() / grid.duration
    t_ch = np.broadcast_to(t_norm, (N, 1, n_t))
    return np.concatenate([features, t_ch], axis=1)


def evaluate_loss(params, config, inputs, targets, batch_size=50):
    """Relative L2 loss over a dataset, in fixed-size chunks."""
    err_sum = 0.0
    den_sum = 0.0
    for start in range(0, inputs.shape[0], batch_size):
        sl = slice(start, start + batch_size)
        pred, _ = fno_forward(params, config, inputs[sl])
        err_sum += float(np.sum(np.sqrt(np.sum((pred - targets[sl]) ** 2, axis=-1))))
        den_sum += float(np.sum(np.sqrt(np.sum(targets[sl] ** 2, axis=-1))))
    return err_sum / den_sum


def train_fno(config, train_inputs, train_targets, val_inputs, val_targets,
              hyper, rng):
    """Mini-batch Adam on the relative L2 loss.

    Inputs/targets are already normalized. Returns (best_params, history)
    where best_params minimizes the validation loss and history carries
    per-epoch train/validation losses.
    """
    params = init_params(config, rng.substream("init"))
    state = adam_init(params)
    batch_gen = rng.substream("batching").generator()
    N = train_inputs.shape[0]
    history = {"train": [], "val": []}
    best_val = np.inf
    best_params = {k: p.copy() for k, p in params.items()}

    for epoch in range(hyper.epochs):
        lr = hyper.lr * hyper.lr_decay ** (epoch // hyper.lr_decay_every)
        order = batch_gen.permutation(N)
        epoch_losses = []
        for start in range(0, N, hyper.batch_size):
            idx = order[start : start + hyper.batch_size]
            pred, tape = fno_forward(params, config, train_inputs[idx])
            loss, dpred = relative_l2_loss(pred, train_targets[idx])
            if not np.isfinite(loss):
                raise RuntimeError(f"training loss diverged at epoch {epoch}")
            grads = fno_backward(params, config, tape, dpred)
            adam_step(params, grads, state, lr)
            epoch_losses.append(loss)
        val_loss = evaluate_loss(params, config, val_inputs, val_targets)
        history["train"].append(float(np.mean(epoch_losses)))
        history["val"].append(val_loss)
        if val_loss < best_val:
            best_val = val_loss
            best_params = {k: p.copy() for k, p in params.items()}
    return best_params, history
