"""End-to-end orchestration: dataset preparation, training of baseline
and composite models, prediction and evaluation.

The baseline and composite modes differ only in how the input function
channels are assembled (ground acceleration vs intermediate trajectory);
everything downstream of that choice is shared.
"""

import numpy as np

from .checkpoint import Checkpoint, predict_batch
from .dataset import generate_dataset, split
from .metrics import evaluate_predictions
from .refine import fit_refinement, refine_predict
from .rng import RngStream
from .training import ChannelStats, assemble_input, train_fno


def prepare_splits(exp, simplifier, seed=None):
    """Generate N = train+val+test records and split them.

    `simplifier` may be None for a baseline-only dataset. The split uses
    the same master seed as the generation, so one seed pins the whole
    dataset layout.
    """
    seed = exp.seed if seed is None else seed
    n_train, n_val, n_test = exp.splits
    ds = generate_dataset(
        exp.building(),
        exp.wn_spec(),
        simplifier,
        n_train + n_val + n_test,
        seed,
        substeps=exp.substeps,
        model_hash=exp.model_hash(),
    )
    return split(ds, n_train, n_val, n_test, seed)


def dataset_features(ds, mode):
    """Input function channels for a dataset under the given mode."""
    if mode == "baseline":
        return ds.ag[:, None, :]
    if mode != "composite":
        raise ValueError(f"unknown mode {mode!r}")
    if ds.z is None:
        raise ValueError("composite mode requires a dataset with z channels")
    return ds.z


def train_model(exp, mode, train_ds, val_ds, seed=None, fit_refine=None):
    """Train one model and return its checkpoint.

    `fit_refine` defaults to True for composite mode: the closed-form
    refinement is calibrated on the training set and stored alongside
    the network parameters.
    """
    seed = exp.seed if seed is None else seed
    if train_ds.u is None or val_ds.u is None:
        raise ValueError("training requires datasets with response channels")
    config = exp.fno_config(mode)
    feats_train = dataset_features(train_ds, mode)
    feats_val = dataset_features(val_ds, mode)
    input_stats = ChannelStats.fit(feats_train)
    output_stats = ChannelStats.fit(train_ds.u)
    grid = train_ds.grid

    x_train = assemble_input(input_stats.normalize(feats_train), grid)
    x_val = assemble_input(input_stats.normalize(feats_val), grid)
    y_train = output_stats.normalize(train_ds.u)
    y_val = output_stats.normalize(val_ds.u)

    params, history = train_fno(
        config, x_train, y_train, x_val, y_val, exp.training_params(), RngStream(seed)
    )
    simp = train_ds.simplifier
    ckpt = Checkpoint(
        config=config,
        params=params,
        input_stats=input_stats,
        output_stats=output_stats,
        history=history,
        mode=mode,
        provenance={
            "structure": exp.data["structure"],
            "excitation": exp.data["excitation"],
            "simplifier": None
            if simp is None or mode == "baseline"
            else {"kind": simp.kind, "param": simp.param},
            "substeps": exp.substeps,
            "splits": exp.data["splits"],
            "model_hash": exp.model_hash(),
            "dataset_seed": train_ds.seed,
        },
        seed=seed,
    )
    if fit_refine is None:
        fit_refine = mode == "composite"
    if fit_refine:
        if train_ds.z is None:
            raise ValueError("refinement requires a dataset with z channels")
        u_hat = predict_batch(ckpt, grid, train_ds.ag, z=train_ds.z)
        ckpt.refinement = fit_refinement(train_ds.z, u_hat, train_ds.u, seed=seed)
    return ckpt


def evaluate_model(ckpt, test_ds, label, refined=False):
    """MetricReport for a checkpoint on a test dataset.

    With refined=True the stored regression refinement is applied and
    the metrics are those of the refined mean predictions.
    """
    if test_ds.u is None:
        raise ValueError("evaluation requires a dataset with response channels")
    preds = predict_batch(ckpt, test_ds.grid, test_ds.ag, z=test_ds.z)
    if refined:
        if ckpt.refinement is None:
            raise ValueError("checkpoint carries no refinement model")
        z = test_ds.z
        if z is None:
            raise ValueError("refined evaluation requires z channels")
        preds, _ = refine_predict(ckpt.refinement, z, preds)
    return evaluate_predictions(label, ckpt.seed, preds, test_ds.u), preds
