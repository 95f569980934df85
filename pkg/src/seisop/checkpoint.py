"""Model checkpoints and the FNO1 binary format.

An FNO1 file is: magic "FNO1", version u32, header-length u64, a
canonical-JSON header (architecture, mode, normalization statistics,
training history, structural/simplifier provenance, seed), the
parameter arrays in declaration order as 64-bit little-endian floats
with complex weights interleaved (re, im), and an optional trailing
human-readable refinement block. Loading then saving reproduces the
file byte for byte.
"""

import json
import struct
import warnings
from dataclasses import dataclass, field

import numpy as np

from .config import canonical_json
from .fno import FnoConfig, fno_forward
from .grid import Trajectory
from .simplify import SimplifierKind, apply_simplifier
from .training import ChannelStats, assemble_input

FNO1_MAGIC = b"FNO1"
FNO1_VERSION = 1
REFINE_MARKER = b"\nREFINE1\n"


@dataclass
class Checkpoint:
    config: FnoConfig
    params: dict
    input_stats: ChannelStats
    output_stats: ChannelStats
    history: dict  # per-epoch {"train": [...], "val": [...]}
    mode: str  # "baseline" | "composite"
    provenance: dict  # structure/excitation/simplifier/substeps/seed/model_hash
    seed: int
    refinement: object = field(default=None)  # RefinementModel, optional

    def simplifier(self):
        simp = self.provenance.get("simplifier")
        if simp is None:
            return None
        return SimplifierKind(simp["kind"], simp["param"])


def _config_to_dict(cfg):
    return {
        "in_channels": cfg.in_channels,
        "out_channels": cfg.out_channels,
        "width": cfg.width,
        "n_layers": cfg.n_layers,
        "n_modes": cfg.n_modes,
        "proj_hidden": cfg.proj_hidden,
        "activation": cfg.activation,
        "pad_fraction": cfg.pad_fraction,
    }


def save_fno1(ckpt, path):
    header = {
        "config": _config_to_dict(ckpt.config),
        "mode": ckpt.mode,
        "input_mean": ckpt.input_stats.mean.tolist(),
        "input_std": ckpt.input_stats.std.tolist(),
        "output_mean": ckpt.output_stats.mean.tolist(),
        "output_std": ckpt.output_stats.std.tolist(),
        "history": ckpt.history,
        "provenance": ckpt.provenance,
        "seed": ckpt.seed,
    }
    blob = canonical_json(header).encode()
    with open(path, "wb") as f:
        f.write(FNO1_MAGIC)
        f.write(struct.pack("<I", FNO1_VERSION))
        f.write(struct.pack("<Q", len(blob)))
        f.write(blob)
        for name, _, cplx in ckpt.config.param_shapes():
            arr = ckpt.params[name]
            if cplx:
                f.write(arr.astype("<c16").tobytes())
            else:
                f.write(arr.astype("<f8").tobytes())
        if ckpt.refinement is not None:
            from .refine import render_refinement

            f.write(REFINE_MARKER)
            f.write(render_refinement(ckpt.refinement).encode())


def load_fno1(path):
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != FNO1_MAGIC:
            raise ValueError(f"{path}: not an FNO1 file (magic {magic!r})")
        (version,) = struct.unpack("<I", f.read(4))
        if version != FNO1_VERSION:
            raise ValueError(f"{path}: unsupported FNO1 version {version}")
        (hlen,) = struct.unpack("<Q", f.read(8))
        h = json.loads(f.read(hlen))
        cfg = FnoConfig(**h["config"])
        params = {}
        for name, shape, cplx in cfg.param_shapes():
            count = int(np.prod(shape))
            if cplx:
                raw = f.read(16 * count)
                params[name] = np.frombuffer(raw, dtype="<c16").reshape(shape).astype(
                    np.complex128
                )
            else:
                raw = f.read(8 * count)
                params[name] = np.frombuffer(raw, dtype="<f8").reshape(shape).astype(
                    np.float64
                )
        rest = f.read()
    refinement = None
    if rest:
        if not rest.startswith(REFINE_MARKER):
            raise ValueError(f"{path}: unexpected trailing bytes")
        from .refine import parse_refinement

        refinement = parse_refinement(rest[len(REFINE_MARKER) :].decode())
    return Checkpoint(
        config=cfg,
        params=params,
        input_stats=ChannelStats(
            mean=np.array(h["input_mean"]), std=np.array(h["input_std"])
        ),
        output_stats=ChannelStats(
            mean=np.array(h["output_mean"]), std=np.array(h["output_std"])
        ),
        history=h["history"],
        mode=h["mode"],
        provenance=h["provenance"],
        seed=h["seed"],
        refinement=refinement,
    )


def _features(ckpt, ag, z):
    """Raw input function channels for a batch: [N, C, n_t]."""
    if ckpt.mode == "baseline":
        return ag[:, None, :]
    if z is None:
        raise ValueError("composite checkpoint requires intermediate trajectories")
    return z


def predict_batch(ckpt, grid, ag, z=None, model=None, substeps=None):
    """Denormalized predictions [N, n_d, n_t] for a batch of records.

    Composite checkpoints compute z with the recorded simplifier when it
    is not supplied; `model` defaults to the structure stored in the
    checkpoint provenance.
    """
    ag = np.asarray(ag, dtype=np.float64)
    if ckpt.mode == "composite" and z is None:
        simp = ckpt.simplifier()
        if simp is None:
            raise ValueError("checkpoint is missing simplifier metadata")
        if model is None:
            model = _model_from_provenance(ckpt)
        if substeps is None:
            substeps = ckpt.provenance.get("substeps", 1)
        z = apply_simplifier(model, simp, ag, grid, substeps=substeps)
    feats = _features(ckpt, ag, z)
    if feats.shape[1] + 1 != ckpt.config.in_channels:
        raise ValueError(
            f"input has {feats.shape[1]} function channels, checkpoint expects "
            f"{ckpt.config.in_channels - 1}"
        )
    x = assemble_input(ckpt.input_stats.normalize(feats), grid)
    preds = np.empty((ag.shape[0], ckpt.config.out_channels, grid.n_t))
    for start in range(0, ag.shape[0], 50):
        sl = slice(start, start + 50)
        out, _ = fno_forward(ckpt.params, ckpt.config, x[sl])
        preds[sl] = ckpt.output_stats.denormalize(out)
    return preds


def predict(ckpt, a_g, z=None, model=None):
    """Single-record prediction as a Trajectory."""
    z_batch = None if z is None else z.values[None]
    preds = predict_batch(ckpt, a_g.grid, a_g.values, z=z_batch, model=model)
    return Trajectory(a_g.grid, preds[0])


def _model_from_provenance(ckpt):
    from .config import ExperimentConfig

    structure = ckpt.provenance.get("structure")
    if structure is None:
        raise ValueError("checkpoint has no structural model in its provenance")
    return ExperimentConfig({"structure": structure}).building()


def check_dataset_match(ckpt, ds):
    """Warn when a dataset's provenance hash differs from the checkpoint's."""
    expected = ckpt.provenance.get("model_hash", "")
    if expected and ds.model_hash and expected != ds.model_hash:
        warnings.warn(
            "dataset provenance hash does not match checkpoint "
            f"({ds.model_hash} vs {expected}); predictions may be inconsistent"
        )
