"""Train a baseline and a composite model at desk scale and compare.

The baseline network maps ground acceleration directly to the response;
the composite model corrects a simplified-physics trajectory instead,
then applies a closed-form per-story linear refinement with an
uncertainty estimate. Takes roughly ten minutes on one core; shrink
epochs or splits below for a quicker look.
"""

import numpy as np

from seisop.config import ExperimentConfig
from seisop.pipeline import evaluate_model, prepare_splits, train_model


def main():
    exp = ExperimentConfig({"training": {"epochs": 60}}, desk=True)
    print("desk-scale config:", exp.splits, "records,",
          exp.training_params().epochs, "epochs")

    train_ds, val_ds, test_ds = prepare_splits(exp, exp.simplifier())
    print("datasets simulated")

    rows = []
    base = train_model(exp, "baseline", train_ds, val_ds)
    rep, _ = evaluate_model(base, test_ds, "baseline")
    rows.append(("baseline", rep.rel_l2))

    comp = train_model(exp, "composite", train_ds, val_ds)
    rep, _ = evaluate_model(comp, test_ds, "composite(els)")
    rows.append(("composite(els)", rep.rel_l2))
    rep, _ = evaluate_model(comp, test_ds, "refined", refined=True)
    rows.append(("  + refinement", rep.rel_l2))

    print(f"\n{'model':<16}" + "".join(f"  story{i + 1:>2}" for i in range(5)))
    for name, rel in rows:
        print(f"{name:<16}" + "".join(f" {v:8.4f}" for v in rel))
    print("\nper-story refinement sigma:",
          np.round(comp.refinement.sigma, 6).tolist())


if __name__ == "__main__":
    main()
