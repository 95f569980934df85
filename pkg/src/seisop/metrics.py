"""Trajectory error metrics, peak-displacement statistics and
comparison-report assembly.

Two deliberately distinct relative-L2 quantities exist in this codebase:
the training loss (per-record sum of norms, `seisop.training`) and the
evaluation metric here, which pools squared errors over all test
records per DOF before taking the ratio.
"""

import csv
import json
from dataclasses import dataclass

import numpy as np


def rmse(preds, targets):
    """Per-DOF root-mean-square error over [N, n_d, n_t] tensors."""
    preds = np.asarray(preds, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if preds.shape != targets.shape:
        raise ValueError(f"shape mismatch: {preds.shape} vs {targets.shape}")
    return np.sqrt(np.mean((preds - targets) ** 2, axis=(0, 2)))


def relative_l2(preds, targets):
    """Per-DOF pooled relative L2 error:
    sqrt( sum_{j,k} err^2 / sum_{j,k} target^2 )."""
    preds = np.asarray(preds, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if preds.shape != targets.shape:
        raise ValueError(f"shape mismatch: {preds.shape} vs {targets.shape}")
    num = np.sum((preds - targets) ** 2, axis=(0, 2))
    den = np.sum(targets**2, axis=(0, 2))
    if np.any(den == 0.0):
        bad = int(np.nonzero(den == 0.0)[0][0])
        raise ValueError(f"target channel {bad} has zero energy")
    return np.sqrt(num / den)


def peak_distribution(trajectories):
    """Per-record peak absolute displacement, [N, n_d]; raw samples for
    external density plotting."""
    tr = np.asarray(trajectories, dtype=np.float64)
    if tr.ndim != 3 or tr.shape[0] < 1:
        raise ValueError("expected a nonempty [N, n_d, n_t] tensor")
    return np.max(np.abs(tr), axis=2)


def ks_statistic(a, b):
    """Two-sample Kolmogorov-Smirnov statistic between 1-D samples."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    pooled = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, pooled, side="right") / a.size
    cdf_b = np.searchsorted(b, pooled, side="right") / b.size
    return float(np.max(np.abs(cdf_a - cdf_b)))


@dataclass(frozen=True)
class MetricReport:
    """Per-run metrics for one model configuration."""

    label: str
    seed: int
    rmse: np.ndarray  # [n_d]
    rel_l2: np.ndarray  # [n_d]
    n_records: int
    n_t: int


def evaluate_predictions(label, seed, preds, targets):
    return MetricReport(
        label=label,
        seed=seed,
        rmse=rmse(preds, targets),
        rel_l2=relative_l2(preds, targets),
        n_records=preds.shape[0],
        n_t=preds.shape[2],
    )


def assemble_report(runs):
    """Aggregate per-run reports into per-model per-DOF means.

    Runs aggregate only over identical configurations (same label, DOF
    count, record count, grid length); mixed configurations under one
    label are rejected.
    """
    if not runs:
        raise ValueError("no runs to aggregate")
    out = {}
    for run in runs:
        group = out.setdefault(run.label, {"runs": [], "seeds": []})
        group["runs"].append(run)
        group["seeds"].append(run.seed)
    report = {}
    for label, group in out.items():
        rs = group["runs"]
        first = rs[0]
        for r in rs[1:]:
            if (
                r.rmse.shape != first.rmse.shape
                or r.n_records != first.n_records
                or r.n_t != first.n_t
            ):
                raise ValueError(f"mixed configurations under label {label!r}")
        report[label] = {
            "rmse": np.mean([r.rmse for r in rs], axis=0).tolist(),
            "rel_l2": np.mean([r.rel_l2 for r in rs], axis=0).tolist(),
            "n_runs": len(rs),
            "seeds": group["seeds"],
            "n_records": first.n_records,
            "n_t": first.n_t,
        }
    return report


def report_to_csv(report, path, sigma=None):
    """Comparison table: one row per model, per-DOF RMSE and relative L2
    columns; optional per-DOF residual-std columns from refinement."""
    labels = list(report)
    n_d = len(report[labels[0]]["rmse"])
    header = (
        ["model"]
        + [f"rmse_{i + 1}" for i in range(n_d)]
        + [f"rel_l2_{i + 1}" for i in range(n_d)]
    )
    if sigma is not None:
        header += [f"sigma_{i + 1}" for i in range(n_d)]
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for label in labels:
            row = [label]
            row += [repr(v) for v in report[label]["rmse"]]
            row += [repr(v) for v in report[label]["rel_l2"]]
            if sigma is not None:
                row += [repr(float(s)) for s in sigma.get(label, [float("nan")] * n_d)]
            writer.writerow(row)


def report_to_json(report, path):
    with open(path, "w") as f:
        json.dump(report, f, sort_keys=True, indent=2)
        f.write("\n")


def peaks_to_csv(peaks_by_label, path):
    """Per-record peak samples, one column per (model, DOF)."""
    labels = list(peaks_by_label)
    n, n_d = peaks_by_label[labels[0]].shape
    header = [f"{label}_peak_{i + 1}" for label in labels for i in range(n_d)]
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for k in range(n):
            row = []
            for label in labels:
                row += [repr(float(v)) for v in peaks_by_label[label][k]]
            writer.writerow(row)
