"""Command-line interface for the full experiment lifecycle.

Subcommands: synth-gm, build-dataset, train, evaluate, study. Every
subcommand is deterministic given identical inputs and seed; outputs are
written atomically (temp file + rename) so failures leave no partial
artifacts. The SEISOP_OUT environment variable, when set, becomes the
root for relative output paths.
"""

import argparse
import contextlib
import os
import sys

import numpy as np

from .checkpoint import check_dataset_match, load_fno1, save_fno1
from .config import ConfigError, ExperimentConfig
from .dataset import (
    generate_dataset,
    generate_ground_motions,
    load_srd1,
    save_srd1,
    split,
)
from .metrics import (
    assemble_report,
    ks_statistic,
    peak_distribution,
    peaks_to_csv,
    report_to_csv,
    report_to_json,
)
from .pipeline import evaluate_model, train_model
from .rng import RngStream
from .simplify import SimplifierKind


def _resolve_out(path):
    root = os.environ.get("SEISOP_OUT")
    if root and not os.path.isabs(path):
        os.makedirs(root, exist_ok=True)
        return os.path.join(root, path)
    return path


@contextlib.contextmanager
def _atomic(path):
    """Yield a temp path, rename to `path` on success, remove on failure."""
    tmp = path + ".tmp"
    try:
        yield tmp
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def _parse_simplifier(text):
    if text == "none":
        return None
    if ":" in text:
        kind, param = text.split(":", 1)
        return SimplifierKind(kind, int(param))
    return SimplifierKind(text)


def _load_config(args):
    if args.config:
        exp = ExperimentConfig.from_file(args.config)
    else:
        exp = ExperimentConfig(desk=args.desk if hasattr(args, "desk") else False)
    if getattr(args, "seed", None) is not None:
        exp = ExperimentConfig({**exp.data, "seed": args.seed})
    return exp


def cmd_synth_gm(args):
    exp = _load_config(args)
    ds = generate_ground_motions(exp.wn_spec(), args.count, exp.seed)
    out = _resolve_out(args.out)
    with _atomic(out) as tmp:
        save_srd1(ds, tmp)
    print(f"wrote {args.count} ground motions to {out}")
    return 0


def cmd_build_dataset(args):
    exp = _load_config(args)
    simp = exp.simplifier() if args.simplifier is None else _parse_simplifier(args.simplifier)
    count = args.count if args.count else sum(exp.splits)
    ds = generate_dataset(
        exp.building(),
        exp.wn_spec(),
        simp,
        count,
        exp.seed,
        substeps=exp.substeps,
        model_hash=exp.model_hash(),
    )
    out = _resolve_out(args.out)
    with _atomic(out) as tmp:
        save_srd1(ds, tmp)
    label = "none" if simp is None else simp.label()
    print(f"wrote {count} paired records (simplifier: {label}) to {out}")
    return 0


def cmd_train(args):
    exp = _load_config(args)
    simp = exp.simplifier() if args.mode == "composite" else None
    if args.data:
        full = load_srd1(args.data)
        if args.mode == "composite" and full.z is None:
            raise ValueError("composite training needs a dataset with z channels")
        train_ds, val_ds, _ = split(full, *exp.splits, exp.seed)
    else:
        from .pipeline import prepare_splits

        train_ds, val_ds, _ = prepare_splits(exp, simp)
    ckpt = train_model(exp, args.mode, train_ds, val_ds)
    out = _resolve_out(args.out)
    with _atomic(out) as tmp:
        save_fno1(ckpt, tmp)
    print(
        f"trained {args.mode} model: final train loss "
        f"{ckpt.history['train'][-1]:.4f}, best val loss "
        f"{min(ckpt.history['val']):.4f} -> {out}"
    )
    return 0


def cmd_evaluate(args):
    ckpt = load_fno1(args.checkpoint)
    test_ds = load_srd1(args.data)
    check_dataset_match(ckpt, test_ds)
    label = ckpt.mode if ckpt.mode == "baseline" else f"composite-{_simp_label(ckpt)}"
    run, preds = evaluate_model(ckpt, test_ds, label)
    runs = [run]
    sigma = None
    if args.refine:
        refined_run, preds = evaluate_model(
            ckpt, test_ds, label + "-refined", refined=True
        )
        runs.append(refined_run)
        sigma = {label + "-refined": ckpt.refinement.sigma.tolist()}
    report = assemble_report(runs)
    prefix = _resolve_out(args.report)
    with _atomic(prefix + ".csv") as tmp:
        report_to_csv(report, tmp, sigma=sigma)
    with _atomic(prefix + ".json") as tmp:
        report_to_json(report, tmp)
    peaks = {
        "true": peak_distribution(test_ds.u),
        "predicted": peak_distribution(preds),
    }
    with _atomic(prefix + "_peaks.csv") as tmp:
        peaks_to_csv(peaks, tmp)
    ks = [
        ks_statistic(peaks["predicted"][:, i], peaks["true"][:, i])
        for i in range(test_ds.n_d)
    ]
    print(f"evaluated {label}: per-story relative L2 {np.round(run.rel_l2, 4).tolist()}")
    print(f"peak-distribution KS per story: {np.round(ks, 4).tolist()}")
    print(f"report written to {prefix}.csv / {prefix}.json / {prefix}_peaks.csv")
    return 0


def _simp_label(ckpt):
    simp = ckpt.simplifier()
    return "none" if simp is None else simp.label()


def cmd_study(args):
    exp = _load_config(args)
    values = [int(v) for v in args.values.split(",")]
    master = RngStream(exp.seed).substream("study")
    out_dir = _resolve_out(args.out)
    os.makedirs(out_dir, exist_ok=True)
    rows = []
    for value in values:
        if args.vary == "train-size":
            varied = ExperimentConfig(
                {**exp.data, "splits": {**exp.data["splits"], "train": value}}
            )
        else:
            varied = ExperimentConfig(
                {**exp.data, "network": {**exp.data["network"], "n_layers": value}}
            )
        for run in range(args.runs):
            seed = master.substream(f"{args.vary}={value}").child(run).seed
            from .pipeline import prepare_splits

            train_ds, val_ds, test_ds = prepare_splits(
                varied, varied.simplifier(), seed=seed
            )
            for mode in ("baseline", "composite"):
                ckpt = train_model(varied, mode, train_ds, val_ds, seed=seed,
                                   fit_refine=False)
                rep, _ = evaluate_model(ckpt, test_ds, mode)
                for story in range(test_ds.n_d):
                    rows.append(
                        [args.vary, value, run, seed, mode, story + 1,
                         repr(float(rep.rel_l2[story]))]
                    )
            print(f"{args.vary}={value} run {run}: done")
    import csv as _csv

    path = os.path.join(out_dir, "study.csv")
    with _atomic(path) as tmp:
        with open(tmp, "w", newline="") as f:
            w = _csv.writer(f)
            w.writerow(["vary", "value", "run", "seed", "model", "story", "rel_l2"])
            w.writerows(rows)
    print(f"study results written to {path}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="seisop",
        description="Composite simplified-physics + Fourier-neural-operator "
        "pipeline for seismic response prediction",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=True):
        sp.add_argument("--config", help="JSON experiment config (defaults apply)")
        sp.add_argument("--desk", action="store_true",
                        help="use the desk-scale preset instead of full scale")
        if seed:
            sp.add_argument("--seed", type=int, help="override the master seed")

    sp = sub.add_parser("synth-gm", help="synthesize ground motions into an SRD1 file")
    common(sp)
    sp.add_argument("--count", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_synth_gm)

    sp = sub.add_parser("build-dataset", help="simulate paired (a_g, z, u) records")
    common(sp)
    sp.add_argument("--simplifier", help="els | modal:R | relaxed:K | none")
    sp.add_argument("--count", type=int)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_build_dataset)

    sp = sub.add_parser("train", help="train a baseline or composite model")
    common(sp)
    sp.add_argument("--mode", choices=["baseline", "composite"], required=True)
    sp.add_argument("--data", help="existing SRD1 dataset (generated if omitted)")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("evaluate", help="evaluate a checkpoint on a dataset")
    sp.add_argument("--checkpoint", required=True)
    sp.add_argument("--data", required=True)
    sp.add_argument("--report", required=True, help="output path prefix")
    sp.add_argument("--refine", action="store_true")
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("study", help="parametric study over train size or depth")
    common(sp)
    sp.add_argument("--vary", choices=["train-size", "layers"], required=True)
    sp.add_argument("--values", required=True, help="comma-separated values")
    sp.add_argument("--runs", type=int, default=10)
    sp.add_argument("--out", required=True, help="output directory")
    sp.set_defaults(func=cmd_study)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
