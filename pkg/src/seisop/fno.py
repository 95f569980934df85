"""Fourier neural operator on 1-D time signals, implemented from scratch
on numpy with hand-derived reverse-mode gradients.

Architecture: per-timestep affine lifting, L spectral layers
    v <- relu( idft_K( W_spec * dft_K(v) ) + W_loc v + b ),
then a two-layer per-timestep projection. Tensors are ordered
[batch, channel, time] throughout.

The spectral transforms keep only the first K modes. Because every mode
>= K is discarded anyway, a truncated direct product (O(n*K) per
channel) against cached cos/sin tables is mathematically identical to a
full transform followed by zeroing. Both backends are provided and
agree to roundoff: `fno_forward` uses the direct product (a single
BLAS matrix product over the K kept modes, which beats an FFT that
computes all n/2 modes when K << n), and the FFT route is kept as an
independent cross-check. The adjoint of the truncated forward transform is
the conjugate transpose of the truncated Fourier matrix, i.e. an
un-normalized inverse-transform structure; see `fno_backward` for the
derivation in terms of (re, im) parts.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class FnoConfig:
    in_channels: int  # input function channels + 1 time channel
    out_channels: int
    width: int = 64
    n_layers: int = 4
    n_modes: int = 16
    proj_hidden: int = 128
    activation: str = "relu"
    pad_fraction: float = 0.0  # optional zero padding of the time axis

    def __post_init__(self):
        if self.n_modes < 1 or self.n_layers < 1 or self.width < 1:
            raise ValueError("n_modes, n_layers and width must all be >= 1")
        if self.activation != "relu":
            raise ValueError(f"unsupported activation {self.activation!r}")
        if not 0.0 <= self.pad_fraction < 1.0:
            raise ValueError("pad_fraction must be in [0, 1)")

    def param_shapes(self):
        """Parameter names and shapes in declaration (serialization) order."""
        shapes = [
            ("lift_w", (self.width, self.in_channels), False),
            ("lift_b", (self.width,), False),
        ]
        for l in range(self.n_layers):
            shapes.append((f"spec_w{l}", (self.n_modes, self.width, self.width), True))
            shapes.append((f"loc_w{l}", (self.width, self.width), False))
            shapes.append((f"loc_b{l}", (self.width,), False))
        shapes += [
            ("proj1_w", (self.proj_hidden, self.width), False),
            ("proj1_b", (self.proj_hidden,), False),
            ("proj2_w", (self.out_channels, self.proj_hidden), False),
            ("proj2_b", (self.out_channels,), False),
        ]
        return shapes

    def param_count(self):
        total = 0
        for _, shape, cplx in self.param_shapes():
            total += int(np.prod(shape)) * (2 if cplx else 1)
        return total


@lru_cache(maxsize=32)
def _fourier_tables(n, K):
    """cos/sin tables [n, K] for exp(-+2*pi*i*k*t/n)."""
    t = np.arange(n)[:, None]
    k = np.arange(K)[None, :]
    theta = 2.0 * np.pi * t * k / n
    return np.cos(theta), np.sin(theta)


def truncated_dft(x, K):
    """First K complex modes of a real signal along the last axis:
    c(k) = sum_t x(t) exp(-2*pi*i*k*t/n). Direct-product reference."""
    n = x.shape[-1]
    if K > n // 2 + 1:
        raise ValueError(f"K={K} exceeds floor(n/2)+1={n // 2 + 1}")
    cos, sin = _fourier_tables(n, K)
    return (x @ cos) - 1j * (x @ sin)


def truncated_dft_fft(x, K):
    """FFT route: same sums as `truncated_dft` up to roundoff."""
    n = x.shape[-1]
    if K > n // 2 + 1:
        raise ValueError(f"K={K} exceeds floor(n/2)+1={n // 2 + 1}")
    return np.fft.rfft(x, axis=-1)[..., :K]


def _idft_weights(n, K):
    w = np.full(K, 2.0 / n)
    w[0] = 1.0 / n
    if n % 2 == 0 and K == n // 2 + 1:
        w[-1] = 1.0 / n  # Nyquist mode is its own conjugate
    return w


@lru_cache(maxsize=32)
def _idft_matrix(n, K):
    """Stacked real matrix [2K, n] so that the truncated inverse transform
    is the single product concat(Re c, Im c) @ M."""
    cos, sin = _fourier_tables(n, K)
    w = _idft_weights(n, K)[:, None]
    return np.concatenate([w * cos.T, -(w * sin.T)], axis=0)


def truncated_idft(c, n):
    """Real inverse of `truncated_dft` under conjugate symmetry with all
    modes >= K set to zero:
    y(t) = (1/n) Re[ c(0) + 2 sum_{k>=1} c(k) exp(+2*pi*i*k*t/n) ]."""
    K = c.shape[-1]
    if K > n // 2 + 1:
        raise ValueError(f"K={K} exceeds floor(n/2)+1={n // 2 + 1}")
    parts = np.concatenate([c.real, c.imag], axis=-1)
    return parts @ _idft_matrix(n, K)


def truncated_idft_fft(c, n):
    """FFT route: same values as `truncated_idft` up to roundoff."""
    K = c.shape[-1]
    if K > n // 2 + 1:
        raise ValueError(f"K={K} exceeds floor(n/2)+1={n // 2 + 1}")
    full = np.zeros(c.shape[:-1] + (n // 2 + 1,), dtype=np.complex128)
    full[..., :K] = c
    return np.fft.irfft(full, n=n, axis=-1)


def init_params(config, rng):
    """Deterministic parameter initialization.

    Affine weights ~ U(-a, a) with a = 1/sqrt(fan_in); spectral weights
    ~ (U(-1,1) + i U(-1,1)) / width^2; biases zero.
    """
    gen = rng.generator()
    params = {}
    for name, shape, cplx in config.param_shapes():
        if cplx:
            scale = 1.0 / config.width**2
            re = gen.uniform(-1.0, 1.0, size=shape)
            im = gen.uniform(-1.0, 1.0, size=shape)
            params[name] = scale * (re + 1j * im)
        elif len(shape) == 1:  # biases
            params[name] = np.zeros(shape)
        else:
            fan_in = shape[1]
            a = 1.0 / np.sqrt(fan_in)
            params[name] = gen.uniform(-a, a, size=shape)
    return params


def zero_grads(config):
    return {
        name: np.zeros(shape, dtype=np.complex128 if cplx else np.float64)
        for name, shape, cplx in config.param_shapes()
    }


def _affine(w, b, x):
    """Per-timestep affine map on [B, C_in, n] -> [B, C_out, n]."""
    return np.matmul(w, x) + b[None, :, None]


def _spectral_mix(w, c):
    """mixed[b,o,k] = sum_i w[k,o,i] c[b,i,k], as a matmul batched over
    the mode axis."""
    ct = np.ascontiguousarray(c.transpose(2, 0, 1))  # [K, B, I]
    wt = w.transpose(0, 2, 1)  # [K, I, O]
    return np.matmul(ct, wt).transpose(1, 2, 0)  # [B, O, K]


def fno_forward(params, config, x):
    """Forward pass. x: [B, in_channels, n] with the normalized time
    coordinate as the last channel. Returns (output [B, out, n], tape)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 + 1:
        raise ValueError(f"input must be [batch, channel, time], got ndim {x.ndim}")
    if x.shape[1] != config.in_channels:
        raise ValueError(
            f"channel axis has {x.shape[1]} channels, config expects {config.in_channels}"
        )
    n_orig = x.shape[2]
    pad = int(round(config.pad_fraction * n_orig))
    if pad:
        x = np.pad(x, ((0, 0), (0, 0), (0, pad)))
    n = x.shape[2]
    if config.n_modes > n // 2 + 1:
        raise ValueError(
            f"n_modes={config.n_modes} exceeds floor(n/2)+1={n // 2 + 1} for n={n}"
        )

    tape = {"x": x, "n": n, "pad": pad, "layers": []}
    v = _affine(params["lift_w"], params["lift_b"], x)
    for l in range(config.n_layers):
        c = truncated_dft(v, config.n_modes)  # [B, W, K]
        mixed = _spectral_mix(params[f"spec_w{l}"], c)
        s = truncated_idft(mixed, n)
        pre = s + _affine(params[f"loc_w{l}"], params[f"loc_b{l}"], v)
        post = np.maximum(pre, 0.0)
        tape["layers"].append({"v": v, "c": c, "pre": pre})
        v = post
    tape["vL"] = v
    p_pre = _affine(params["proj1_w"], params["proj1_b"], v)
    p_post = np.maximum(p_pre, 0.0)
    tape["p_pre"] = p_pre
    tape["p_post"] = p_post
    out = _affine(params["proj2_w"], params["proj2_b"], p_post)
    if pad:
        out = out[:, :, :n_orig]
    return out, tape


def _affine_backward(w, x, dout):
    dw = np.tensordot(dout, x, axes=([0, 2], [0, 2]))
    db = dout.sum(axis=(0, 2))
    dx = np.matmul(w.T, dout)
    return dw, db, dx


def _dft_backward(dc, n):
    """Adjoint of truncated_dft for real input.

    With c = x @ (cos - i sin): dx = Re(dc) @ cos^T - Im(dc) @ sin^T,
    the conjugate-transpose (un-normalized inverse) Fourier action.
    """
    K = dc.shape[-1]
    parts = np.concatenate([dc.real, dc.imag], axis=-1)
    return parts @ _dft_adjoint_matrix(n, K)


@lru_cache(maxsize=32)
def _dft_adjoint_matrix(n, K):
    cos, sin = _fourier_tables(n, K)
    return np.concatenate([cos.T, -sin.T], axis=0)


def _idft_backward(ds, K):
    """Adjoint of truncated_idft.

    y = w_k (Re c cos - Im c sin) gives, per mode, gradients
    d(Re c) = w_k ds @ cos, d(Im c) = -w_k ds @ sin; packed as a complex
    array this is w_k * (un-normalized forward transform of ds).
    """
    n = ds.shape[-1]
    w = _idft_weights(n, K)
    return truncated_dft(ds, K) * w


def fno_backward(params, config, tape, dout):
    """Exact reverse-mode gradients for every parameter.

    dout: gradient of a real scalar loss w.r.t. the forward output.
    Complex spectral gradients carry d/d(Re) + i d/d(Im).
    """
    if "vL" not in tape:
        raise ValueError("stale or incomplete tape")
    n = tape["n"]
    if tape["pad"]:
        dout = np.pad(dout, ((0, 0), (0, 0), (0, tape["pad"])))
    grads = {}

    dp_post = np.matmul(params["proj2_w"].T, dout)
    grads["proj2_w"] = np.tensordot(dout, tape["p_post"], axes=([0, 2], [0, 2]))
    grads["proj2_b"] = dout.sum(axis=(0, 2))
    dp_pre = dp_post * (tape["p_pre"] > 0.0)
    grads["proj1_w"], grads["proj1_b"], dv = _affine_backward(
        params["proj1_w"], tape["vL"], dp_pre
    )

    for l in range(config.n_layers - 1, -1, -1):
        lt = tape["layers"][l]
        dpre = dv * (lt["pre"] > 0.0)
        grads[f"loc_w{l}"], grads[f"loc_b{l}"], dv_loc = _affine_backward(
            params[f"loc_w{l}"], lt["v"], dpre
        )
        dmixed = _idft_backward(dpre, config.n_modes)  # [B, W, K] complex
        w_spec = params[f"spec_w{l}"]
        dm_t = np.ascontiguousarray(dmixed.transpose(2, 0, 1))  # [K, B, O]
        cc_t = np.ascontiguousarray(lt["c"].conj().transpose(2, 0, 1))  # [K, B, I]
        # grads[k,o,i] = sum_b dmixed[b,o,k] conj(c)[b,i,k]
        grads[f"spec_w{l}"] = np.matmul(dm_t.transpose(0, 2, 1), cc_t)
        # dc[b,i,k] = sum_o conj(w)[k,o,i] dmixed[b,o,k]
        dc = np.matmul(dm_t, w_spec.conj()).transpose(1, 2, 0)
        dv = dv_loc + _dft_backward(dc, n)

    grads["lift_w"], grads["lift_b"], _ = _affine_backward(
        params["lift_w"], tape["x"], dv
    )
    return grads
