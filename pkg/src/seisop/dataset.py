"""Paired datasets and the SRD1 binary container.

An SRD1 file is: magic "SRD1", version u32, header-length u64, a
canonical-JSON header (dt, n_t, n_d, N, channel flags, simplifier
metadata, seeds, model hash), then per-record arrays [a_g | z? | u?] as
64-bit little-endian floats, row-major [channel][time]. Chosen for
bit-exact reproducibility and trivial parsing in any language.
"""

import csv
import json
import struct
from dataclasses import dataclass, replace

import numpy as np

from .config import canonical_json
from .excitation import synthesize_batch
from .grid import TimeGrid
from .integrators import BlowUpError, simulate_batch
from .rng import RngStream
from .simplify import SimplifierKind, apply_simplifier

SRD1_MAGIC = b"SRD1"
SRD1_VERSION = 1


@dataclass(frozen=True)
class PairedDataset:
    """Aligned excitation / intermediate / response records.

    ag: [N, n_t]; z: [N, n_d, n_t] or None (baseline datasets carry no
    intermediate channel); u: [N, n_d, n_t] or None (excitation-only
    files). Channel 0 is story 1.
    """

    grid: TimeGrid
    n_d: int
    ag: np.ndarray
    z: np.ndarray | None
    u: np.ndarray | None
    simplifier: SimplifierKind | None
    seed: int
    model_hash: str
    substeps: int = 1

    @property
    def n_records(self):
        return self.ag.shape[0]

    def subset(self, indices):
        idx = np.asarray(indices)
        return replace(
            self,
            ag=self.ag[idx],
            z=None if self.z is None else self.z[idx],
            u=None if self.u is None else self.u[idx],
        )


def generate_ground_motions(spec, n_records, seed):
    """Excitation-only dataset; record i comes from child stream i of the
    master seed's 'excitation' substream."""
    rng = RngStream(seed).substream("excitation")
    ag = synthesize_batch(spec, rng, n_records)
    return PairedDataset(
        grid=spec.grid,
        n_d=0,
        ag=ag,
        z=None,
        u=None,
        simplifier=None,
        seed=seed,
        model_hash="",
    )


def generate_dataset(model, spec, simplifier, n_records, seed,
                     substeps=1, model_hash=""):
    """Full paired dataset: u from the nonlinear model, z from the
    chosen simplifier (None for a baseline dataset). Deterministic per
    master seed."""
    rng = RngStream(seed).substream("excitation")
    ag = synthesize_batch(spec, rng, n_records)
    try:
        u = simulate_batch(model, ag, spec.grid, substeps=substeps)
    except BlowUpError as e:
        raise BlowUpError(f"response simulation failed: {e}") from e
    z = None
    if simplifier is not None:
        try:
            z = apply_simplifier(model, simplifier, ag, spec.grid, substeps=substeps)
        except BlowUpError as e:
            raise BlowUpError(
                f"simplifier {simplifier.label()} failed: {e}"
            ) from e
    return PairedDataset(
        grid=spec.grid,
        n_d=model.n_d,
        ag=ag,
        z=z,
        u=u,
        simplifier=simplifier,
        seed=seed,
        model_hash=model_hash,
        substeps=substeps,
    )


def split(dataset, n_train, n_val, n_test, seed):
    """Disjoint train/val/test subsets after a deterministic shuffle."""
    total = n_train + n_val + n_test
    if total > dataset.n_records:
        raise ValueError(
            f"split sizes sum to {total} but dataset has {dataset.n_records} records"
        )
    order = RngStream(seed).substream("split").generator().permutation(
        dataset.n_records
    )
    train = dataset.subset(order[:n_train])
    val = dataset.subset(order[n_train : n_train + n_val])
    test = dataset.subset(order[n_train + n_val : total])
    return train, val, test


def _header(ds):
    return {
        "dt": ds.grid.dt,
        "n_t": ds.grid.n_t,
        "n_d": ds.n_d,
        "n_records": ds.n_records,
        "has_z": ds.z is not None,
        "has_u": ds.u is not None,
        "simplifier": None
        if ds.simplifier is None
        else {"kind": ds.simplifier.kind, "param": ds.simplifier.param},
        "seed": ds.seed,
        "model_hash": ds.model_hash,
        "substeps": ds.substeps,
    }


def save_srd1(ds, path):
    header = canonical_json(_header(ds)).encode()
    with open(path, "wb") as f:
        f.write(SRD1_MAGIC)
        f.write(struct.pack("<I", SRD1_VERSION))
        f.write(struct.pack("<Q", len(header)))
        f.write(header)
        for i in range(ds.n_records):
            f.write(ds.ag[i].astype("<f8").tobytes())
            if ds.z is not None:
                f.write(ds.z[i].astype("<f8").tobytes())
            if ds.u is not None:
                f.write(ds.u[i].astype("<f8").tobytes())


def load_srd1(path):
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != SRD1_MAGIC:
            raise ValueError(f"{path}: not an SRD1 file (magic {magic!r})")
        (version,) = struct.unpack("<I", f.read(4))
        if version != SRD1_VERSION:
            raise ValueError(f"{path}: unsupported SRD1 version {version}")
        (hlen,) = struct.unpack("<Q", f.read(8))
        h = json.loads(f.read(hlen))
        n_t, n_d, N = h["n_t"], h["n_d"], h["n_records"]
        ag = np.empty((N, n_t))
        z = np.empty((N, n_d, n_t)) if h["has_z"] else None
        u = np.empty((N, n_d, n_t)) if h["has_u"] else None
        for i in range(N):
            ag[i] = np.frombuffer(f.read(8 * n_t), dtype="<f8")
            if z is not None:
                z[i] = np.frombuffer(f.read(8 * n_d * n_t), dtype="<f8").reshape(
                    n_d, n_t
                )
            if u is not None:
                u[i] = np.frombuffer(f.read(8 * n_d * n_t), dtype="<f8").reshape(
                    n_d, n_t
                )
        trailing = f.read(1)
        if trailing:
            raise ValueError(f"{path}: trailing bytes after last record")
    simp = h["simplifier"]
    return PairedDataset(
        grid=TimeGrid(h["dt"], n_t),
        n_d=n_d,
        ag=ag,
        z=z,
        u=u,
        simplifier=None if simp is None else SimplifierKind(simp["kind"], simp["param"]),
        seed=h["seed"],
        model_hash=h["model_hash"],
        substeps=h["substeps"],
    )


def export_record_csv(ds, index, path):
    """One record as CSV for external plotting: t, a_g, z_*, u_*."""
    t = ds.grid.times()
    cols = [("t", t), ("a_g", ds.ag[index])]
    if ds.z is not None:
        cols += [(f"z_{i + 1}", ds.z[index, i]) for i in range(ds.n_d)]
    if ds.u is not None:
        cols += [(f"u_{i + 1}", ds.u[index, i]) for i in range(ds.n_d)]
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow([name for name, _ in cols])
        for k in range(ds.grid.n_t):
            writer.writerow([repr(float(vals[k])) for _, vals in cols])
