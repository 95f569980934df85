"""Acceptance suite: ten property-based criteria for the full pipeline.

Each test prints a single PASS/FAIL line. Criteria 6-9 share one set of
desk-scale end-to-end runs (3 seeds x 4 models), computed lazily on
first use and cached for the rest of the session. Expect roughly an
hour of runtime for the full module on one core.
"""

import json
from dataclasses import replace

import numpy as np
import pytest

from seisop import (
    RngStream,
    fit_refinement,
    ks_statistic,
    paper_building,
    paper_spec,
    peak_distribution,
    refine_predict,
    simulate_batch,
    synthesize_batch,
    truncated_dft,
    truncated_idft,
)
from seisop.config import ExperimentConfig
from seisop.fno import FnoConfig
from seisop.pipeline import evaluate_model, prepare_splits, train_model
from seisop.simplify import (
    SimplifierKind,
    apply_simplifier,
    els_response_batch,
    modal_response_batch,
    relaxed_response_batch,
)
from seisop.training import relative_l2_loss


_CAP = None


@pytest.fixture(autouse=True)
def _live_output(capsys):
    """Expose the capture handle so progress/result lines reach the
    real stdout (pytest's fd-level capture swallows sys.__stdout__)."""
    global _CAP
    _CAP = capsys
    yield
    _CAP = None


def _live(line):
    if _CAP is not None:
        with _CAP.disabled():
            print(line, flush=True)
    else:
        print(line, flush=True)


def _report(num, ok, detail):
    _live(f"[criterion {num:2d}] {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


# ----------------------------------------------------------------- 1-5

def test_criterion_1_simplifier_identities():
    b = paper_building()
    spec = paper_spec(dt=0.02, duration=10.0)
    ag = synthesize_batch(spec, RngStream(1), 20)
    grid = spec.grid
    full = simulate_batch(b, ag, grid)

    relaxed = relaxed_response_batch(b, ag, grid, k=1)
    bitwise = np.array_equal(full, relaxed)

    from seisop import build_modal_reduced

    modal = modal_response_batch(build_modal_reduced(b, 5), ag, grid)
    modal_err = float(np.abs(full - modal).max())

    from seisop.building import BoucWenParams

    b_lin = paper_building(bw=BoucWenParams.from_yield_displacement(0.01, alpha=1.0))
    u_alpha1 = simulate_batch(b_lin, ag, grid)
    els = els_response_batch(b_lin, ag, grid)
    els_err = float(np.abs(u_alpha1 - els).max())

    ok = bitwise and modal_err < 1e-6 and els_err < 1e-6
    _report(1, ok,
            f"relaxed k=1 bitwise={bitwise}, modal r=n_d max err {modal_err:.2e} m, "
            f"alpha=1 vs ELS max err {els_err:.2e} m (20 records)")


def test_criterion_2_integrator_convergence_and_bound():
    b = paper_building()
    spec = paper_spec(dt=0.02, duration=10.0)
    # order is measured in the smooth sub-yield regime; at yielding
    # amplitudes the |vdot| kink in the hysteresis law caps the observed
    # global order near 2 regardless of implementation
    ag = synthesize_batch(spec, RngStream(7), 2) * 0.05
    ref = simulate_batch(b, ag, spec.grid, substeps=8)
    errs = [float(np.abs(simulate_batch(b, ag, spec.grid, substeps=s) - ref).max())
            for s in (1, 2, 4)]
    orders = (np.log2(errs[0] / errs[1]), np.log2(errs[1] / errs[2]))

    ag_big = synthesize_batch(spec, RngStream(7), 3) * 3.0
    _, _, h = simulate_batch(b, ag_big, spec.grid, substeps=2, with_velocity=True)
    hmax = float(np.abs(h).max())
    bound_ok = hmax <= 0.01 * (1 + 1e-6)
    yields = hmax > 0.009

    ok = min(orders) >= 3.0 and bound_ok and yields
    _report(2, ok,
            f"observed RK4 orders {orders[0]:.2f}, {orders[1]:.2f} (>= 3); "
            f"max|h| = {hmax:.6f} <= u_y(1+1e-6): {bound_ok}")


def test_criterion_3_excitation_variance():
    # analytic pointwise variance of the synthesis series is
    # sigma^2 n/2 = 2 S omega_cut (the quoted S*omega_cut = 0.9425 is
    # the one-sided value; the series carries both cos and sin terms)
    spec = paper_spec(dt=0.02, duration=6.0)
    recs = synthesize_batch(spec, RngStream(0), 2000)
    var = float(np.mean(recs**2))
    target = spec.pointwise_variance
    rel = abs(var / target - 1.0)
    ok = rel < 0.05
    _report(3, ok,
            f"pooled variance {var:.4f} vs analytic {target:.4f} m^2/s^4 "
            f"(rel dev {rel:.2%}, tol 5%)")


def test_criterion_4_spectral_correctness():
    rng = np.random.default_rng(12)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(16, 3002))
        K = int(rng.integers(1, n // 2 + 2))
        x = rng.standard_normal((1, n))
        t = np.arange(n)[:, None]
        k = np.arange(K)[None, :]
        F = np.exp(-2j * np.pi * t * k / n)  # explicit O(n^2)-style matrix
        c_ref = (x @ F)
        worst = max(worst, float(np.abs(truncated_dft(x, K) - c_ref).max()))
        c = rng.standard_normal((1, K)) + 1j * rng.standard_normal((1, K))
        w = np.full(K, 2.0 / n)
        w[0] = 1.0 / n
        if n % 2 == 0 and K == n // 2 + 1:
            w[-1] = 1.0 / n
        y_ref = ((c * w) @ F.conj().T).real
        worst = max(worst, float(np.abs(truncated_idft(c, n) - y_ref).max()))
    ok = worst < 1e-10
    _report(4, ok, f"100 random signals (n in [16, 3001]), worst abs dev {worst:.2e}")


def test_criterion_5_gradient_exactness():
    from test_fno import full_gradient_check

    cfg = FnoConfig(in_channels=2, out_channels=2, width=4, n_layers=2, n_modes=3,
                    proj_hidden=5)
    n_ok, n_tot, worst = full_gradient_check(cfg, seed=0, n=16, tol=1e-4)
    frac = n_ok / n_tot

    rng = np.random.default_rng(0)
    pred = rng.standard_normal((2, 3, 16))
    target = rng.standard_normal((2, 3, 16))
    _, grad = relative_l2_loss(pred, target)
    eps = 1e-7
    worst_loss = 0.0
    for idx in [(0, 0, 0), (1, 2, 15), (0, 1, 7), (1, 0, 3)]:
        p = pred.copy()
        p[idx] += eps
        lp, _ = relative_l2_loss(p, target)
        p[idx] -= 2 * eps
        lm, _ = relative_l2_loss(p, target)
        fd = (lp - lm) / (2 * eps)
        worst_loss = max(worst_loss, abs(fd - grad[idx]) / max(abs(fd), 1e-12))
    ok = frac >= 0.99 and worst_loss < 1e-6
    _report(5, ok,
            f"network gradients: {n_ok}/{n_tot} within 1e-4 "
            f"(worst {worst:.2e}); loss gradient worst rel dev {worst_loss:.2e}")


# ------------------------------------------------------------- 6-9

SEEDS = (0, 1, 2)
_CACHE = {}


def _with_z(ds, z, simp):
    return replace(ds, z=z, simplifier=simp)


def _desk_results():
    """3 seeds x {baseline, els, relaxed k=30, modal r=2}; cached."""
    if _CACHE:
        return _CACHE
    exp = ExperimentConfig(desk=True)
    model = exp.building()
    simps = {
        "els": SimplifierKind("els"),
        "relaxed": SimplifierKind("relaxed", 30),
        "modal": SimplifierKind("modal", 2),
    }
    results = {name: [] for name in ("baseline", "els", "relaxed", "modal")}
    for seed in SEEDS:
        tr, va, te = prepare_splits(exp, simps["els"], seed=seed)
        grid = tr.grid
        _live(f"  [desk runs] seed {seed}: datasets ready")
        datasets = {"els": (tr, va, te)}
        for name in ("relaxed", "modal"):
            simp = simps[name]
            parts = tuple(
                _with_z(ds, apply_simplifier(model, simp, ds.ag, grid), simp)
                for ds in (tr, va, te)
            )
            datasets[name] = parts
        for name in results:
            mode = "baseline" if name == "baseline" else "composite"
            dtr, dva, dte = datasets.get(name, datasets["els"])
            ckpt = train_model(exp, mode, dtr, dva, seed=seed)
            rep, preds = evaluate_model(ckpt, dte, name)
            entry = {"rel_l2": rep.rel_l2, "preds": preds, "u": dte.u,
                     "ckpt": ckpt, "test": dte}
            if mode == "composite":
                rep_ref, preds_ref = evaluate_model(
                    ckpt, dte, name + "-refined", refined=True
                )
                entry["rel_l2_refined"] = rep_ref.rel_l2
                entry["preds_refined"] = preds_ref
            results[name].append(entry)
            _live(f"  [desk runs] seed {seed} {name}: mean rel L2 "
                  f"{float(np.mean(rep.rel_l2)):.4f}")
    _CACHE.update(results)
    return _CACHE


def _mean_rel_l2(runs, key="rel_l2"):
    return np.mean([r[key] for r in runs], axis=0)  # [n_d]


def test_criterion_6_composite_beats_baseline():
    res = _desk_results()
    base = _mean_rel_l2(res["baseline"])
    els = _mean_rel_l2(res["els"])
    ratios = els / base
    ok = bool(np.all(ratios <= 0.85))
    _report(6, ok,
            f"per-story rel L2 ratio composite/baseline {np.round(ratios, 3).tolist()} "
            f"(all <= 0.85); composite {np.round(els, 3).tolist()}, "
            f"baseline {np.round(base, 3).tolist()}")


def test_criterion_7_simplifier_ordering():
    res = _desk_results()
    means = {name: float(np.mean(_mean_rel_l2(res[name])))
             for name in ("els", "relaxed", "modal")}
    ok = means["els"] < means["relaxed"] and means["els"] < means["modal"]
    expected = "els < relaxed < modal"
    observed = " < ".join(sorted(means, key=means.get))
    _report(7, ok,
            f"mean rel L2 {({k: round(v, 4) for k, v in means.items()})}; "
            f"observed ordering {observed} (expected {expected}; ELS strictly "
            f"best required)")


def test_criterion_8_refinement():
    res = _desk_results()
    unref = _mean_rel_l2(res["els"])
    ref = _mean_rel_l2(res["els"], key="rel_l2_refined")
    deltas = ref - unref
    sigmas_pos = all(
        np.all(r["ckpt"].refinement.sigma > 0.0) for r in res["els"]
    )

    # planted linear problem: +-sigma covers ~68% of gaussian residuals
    rng = np.random.default_rng(3)
    z = rng.standard_normal((40, 3, 400))
    u_hat = rng.standard_normal((40, 3, 400))
    u = 2.0 * z + 3.0 * u_hat + 0.5 + 0.25 * rng.standard_normal(z.shape)
    planted = fit_refinement(z, u_hat, u, sample_count=4000, seed=2)
    pred, sigma = refine_predict(planted, z, u_hat)
    cover = float((np.abs(u - pred) <= sigma[None, :, None]).mean())

    ok = bool(np.all(deltas <= 0.005)) and sigmas_pos and 0.63 <= cover <= 0.73
    _report(8, ok,
            f"refined - unrefined rel L2 per story {np.round(deltas, 4).tolist()} "
            f"(<= 0.005); sigma > 0: {sigmas_pos}; planted +-sigma coverage "
            f"{cover:.1%} (68% +- 5)")


def test_criterion_9_peak_distribution():
    res = _desk_results()

    def pooled_ks(runs, key):
        true_peaks = np.concatenate([peak_distribution(r["u"]) for r in runs])
        pred_peaks = np.concatenate([peak_distribution(r[key]) for r in runs])
        return float(np.mean([
            ks_statistic(pred_peaks[:, i], true_peaks[:, i])
            for i in range(true_peaks.shape[1])
        ]))

    ks_base = pooled_ks(res["baseline"], "preds")
    ks_els = pooled_ks(res["els"], "preds")
    ok = ks_els < ks_base
    _report(9, ok,
            f"mean per-story KS: composite {ks_els:.4f} < baseline {ks_base:.4f}")


# ---------------------------------------------------------------- 10

def test_criterion_10_cli_reproducibility(tmp_path):
    from seisop.cli import main

    cfg = {
        "excitation": {"dt": 0.02, "duration": 3.0},
        "network": {"width": 4, "n_layers": 1, "n_modes": 4, "proj_hidden": 4},
        "training": {"batch_size": 4, "epochs": 2, "lr_decay_every": 1},
        "splits": {"train": 6, "val": 2, "test": 2},
        "seed": 5,
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    c = str(cfg_path)

    identical = {}
    for tag in ("x", "y"):
        d = tmp_path / tag
        d.mkdir()
        assert main(["synth-gm", "--config", c, "--count", "3",
                     "--out", str(d / "gm.srd1")]) == 0
        assert main(["build-dataset", "--config", c,
                     "--out", str(d / "data.srd1")]) == 0
        assert main(["train", "--config", c, "--mode", "composite",
                     "--data", str(d / "data.srd1"),
                     "--out", str(d / "model.fno1")]) == 0
        assert main(["evaluate", "--checkpoint", str(d / "model.fno1"),
                     "--data", str(d / "data.srd1"), "--refine",
                     "--report", str(d / "rep")]) == 0
        assert main(["study", "--config", c, "--vary", "layers",
                     "--values", "1", "--runs", "1",
                     "--out", str(d / "study")]) == 0
    names = ["gm.srd1", "data.srd1", "model.fno1", "rep.csv", "rep.json",
             "rep_peaks.csv", "study/study.csv"]
    for name in names:
        a = (tmp_path / "x" / name).read_bytes()
        b = (tmp_path / "y" / name).read_bytes()
        identical[name] = a == b
    ok = all(identical.values())
    _report(10, ok, f"byte-identical artifacts across re-runs: {identical}")
