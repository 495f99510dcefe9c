"""End-to-end acceptance checks for the whole pipeline.

Each test pins one release gate: headline cross-validated accuracy, the
model ordering in the comparison report, the feature-selection results, grid
reachability of the reference hyperparameters, solver/classifier/metric
correctness against independent oracles, CLI determinism, and the data
pipeline row accounting.
"""
import json
import time

import numpy as np
import pytest

from cadml.classifiers import (
    KNNParams,
    NBParams,
    SVMParams,
    fit_model,
    nb_fit,
    save_model,
    svm_fit,
)
from cadml.classifiers.svm import dual_objective, kkt_residuals
from cadml.cli import main
from cadml.dataset import REMOVED_FEATURES, SELECTED_FEATURES, load_dataset, select_columns
from cadml.evaluation import ConfusionMatrix, confusion, cross_validate, metrics
from cadml.feature_selection import best_first_subset, rank_features
from cadml.tuning import compare_models, default_grids, grid_search

from conftest import DATA_PATH, make_dataset
from test_knn import oracle_predict
from test_svm import qp_oracle, random_instance

METRIC_NAMES = ("accuracy", "recall", "specificity", "precision")


def test_headline_accuracy(cleveland7):
    """Gaussian NB on the 7-feature dataset: mean 10-fold CV accuracy 0.84 +- 0.03."""
    start = time.monotonic()
    result = cross_validate(cleveland7, NBParams(), 10, seed=2018, scaling=False)
    elapsed = time.monotonic() - start
    assert abs(result.mean_accuracy - 0.84) <= 0.03, result.mean_accuracy
    assert elapsed < 5.0, elapsed


def test_model_ordering(cleveland7):
    """NB matches or beats SVM and KNN on all four metrics (within 0.02);
    KNN is strictly worst on at least 3 of 4."""
    start = time.monotonic()
    report = compare_models(cleveland7, 10, seed=2018)
    elapsed = time.monotonic() - start
    d = report.to_dict()
    for metric in METRIC_NAMES:
        nb = d["models"]["nb"][metric]
        for other in ("svm", "knn"):
            assert nb >= d["models"][other][metric] - 0.02, (metric, d["models"])
    knn_strict_min = sum(
        1 for metric in METRIC_NAMES
        if d["models"]["knn"][metric] < min(d["models"]["nb"][metric],
                                            d["models"]["svm"][metric])
    )
    assert knn_strict_min >= 3, d["models"]
    assert elapsed < 60.0, elapsed


def test_feature_ranking_separates_groups(cleveland):
    """Every kept feature outranks every dropped feature in at least one of
    the two rankings."""
    positions = {}
    for evaluator in ("info_gain", "correlation"):
        names = rank_features(cleveland, evaluator).names()
        positions[evaluator] = {n: i for i, n in enumerate(names)}
    for good in SELECTED_FEATURES:
        for bad in REMOVED_FEATURES:
            assert any(positions[e][good] < positions[e][bad]
                       for e in positions), (good, bad)


def test_wrapper_subset_membership(cleveland):
    """The NB wrapper subset keeps >= 4 of the 7 relevant features and at
    most 1 of the 6 dropped ones."""
    result = best_first_subset(cleveland, NBParams(), folds=10, seed=1)
    selected = set(result.selected)
    assert len(selected & set(SELECTED_FEATURES)) >= 4, result.selected
    assert len(selected & set(REMOVED_FEATURES)) <= 1, result.selected


def test_grid_reachability(cleveland7):
    """The reference winners (SVM C=0.25, KNN k=5, NB gaussian) are selected
    or within 0.01 mean accuracy of the selection."""
    reference = {
        "svm": SVMParams(C=0.25, sigma=0.1268408),
        "knn": KNNParams(k=5),
        "nb": NBParams(use_kernel_density=False),
    }
    for algo, grid in default_grids().items():
        result = grid_search(cleveland7, grid, 10, seed=2018)
        accs = dict(result.per_candidate)
        best_acc = accs[result.best]
        ref_acc = accs[reference[algo]]
        assert best_acc - ref_acc <= 0.01, (algo, accs)


def test_svm_against_qp_oracle():
    """50 random small instances: dual objective within 1e-4 of a dense QP
    solution, KKT residuals <= 1e-3, alphas feasible."""
    rng = np.random.default_rng(7)
    for _ in range(50):
        ds, params = random_instance(rng, n_max=8)
        model = svm_fit(ds, params, tol=1e-6, max_passes=100000)
        assert np.all(model.alpha >= -1e-12)
        assert np.all(model.alpha <= params.C + 1e-12)
        assert abs(model.alpha @ model.train_y) <= 1e-8
        a_star = qp_oracle(model.train_gram, model.train_y, params.C)
        gap = abs(dual_objective(model.train_gram, model.train_y, a_star)
                  - model.dual_objective)
        assert gap <= 1e-4, gap
        res = kkt_residuals(model.train_gram, model.train_y, model.alpha,
                            model.bias, params.C)
        assert res.max() <= 1e-3, res.max()


def test_nb_posterior_normalization(cleveland7):
    """Posteriors sum to 1 within 1e-9 on 10^4 random queries."""
    model = nb_fit(cleveland7, NBParams())
    rng = np.random.default_rng(42)
    lo = cleveland7.X.min(axis=0)
    hi = cleveland7.X.max(axis=0)
    for _ in range(10_000):
        q = rng.uniform(lo - 1.0, hi + 1.0)
        post = model.posterior(q)
        assert abs(post.sum() - 1.0) <= 1e-9


def test_nb_matches_bayes_optimal_boundary():
    """On synthetic axis-aligned Gaussians the NB error rate is within 0.02
    of the closed-form Bayes-optimal rule."""
    rng = np.random.default_rng(2024)
    n = 10_000
    mu0, mu1 = np.array([0.0, 0.0]), np.array([1.5, -1.0])
    s0, s1 = np.array([1.0, 2.0]), np.array([1.5, 0.8])
    half = n // 2
    X = np.vstack([rng.normal(mu0, s0, size=(half, 2)),
                   rng.normal(mu1, s1, size=(half, 2))])
    y = np.array([0] * half + [1] * half)
    model = nb_fit(make_dataset(X, y), NBParams())

    Xt = np.vstack([rng.normal(mu0, s0, size=(half, 2)),
                    rng.normal(mu1, s1, size=(half, 2))])
    yt = y.copy()

    def bayes_rule(Q):
        def log_density(Q, mu, s):
            return np.sum(-np.log(s) - 0.5 * ((Q - mu) / s) ** 2, axis=1)
        return (log_density(Q, mu1, s1) > log_density(Q, mu0, s0)).astype(int)

    nb_err = np.mean(model.predict_batch(Xt) != yt)
    bayes_err = np.mean(bayes_rule(Xt) != yt)
    assert abs(nb_err - bayes_err) <= 0.02, (nb_err, bayes_err)


def test_metrics_against_brute_force():
    """metrics(confusion(...)) equals an independent recount on 10^3 random
    prediction/label pairs; zero-denominator cases return the marker."""
    rng = np.random.default_rng(5)
    for _ in range(1000):
        n = int(rng.integers(1, 40))
        predicted = rng.integers(0, 2, n)
        actual = rng.integers(0, 2, n)
        cm = confusion(predicted, actual)
        tp = sum(1 for p, a in zip(predicted, actual) if p == 1 and a == 1)
        fp = sum(1 for p, a in zip(predicted, actual) if p == 1 and a == 0)
        tn = sum(1 for p, a in zip(predicted, actual) if p == 0 and a == 0)
        fn = sum(1 for p, a in zip(predicted, actual) if p == 0 and a == 1)
        assert (cm.tp, cm.fp, cm.tn, cm.fn) == (tp, fp, tn, fn)
        rep = metrics(cm)
        assert rep.accuracy == (tp + tn) / n
        assert rep.recall == (tp / (tp + fn) if tp + fn else None)
        assert rep.specificity == (tn / (tn + fp) if tn + fp else None)
        assert rep.precision == (tp / (tp + fp) if tp + fp else None)
    rep = metrics(ConfusionMatrix(tp=0, fp=0, tn=2, fn=0))
    assert rep.recall is None and rep.precision is None


def test_knn_against_exhaustive_oracle():
    """Exact agreement with an exhaustive-scan oracle on 10^3 queries,
    including forced ties from duplicated exemplars."""
    from cadml.classifiers.knn import KNNModel

    rng = np.random.default_rng(77)
    base = rng.normal(size=(25, 3))
    X = np.vstack([base, base[:10]])  # duplicates guarantee distance ties
    y = rng.integers(0, 2, len(X))
    checked = 0
    for k in (1, 3, 5, 7):
        model = KNNModel(X, y, k)
        for _ in range(250):
            if rng.random() < 0.5:
                q = rng.normal(size=3)
            else:
                q = base[int(rng.integers(0, 25))]  # lands exactly on exemplars
            assert model.predict(q) == oracle_predict(X, y, k, q)
            checked += 1
    assert checked == 1000


def _run_cli(args):
    try:
        main(list(args))
    except SystemExit as exc:
        assert exc.code in (0, None), (args, exc.code)


def test_cli_determinism(tmp_path):
    """Every subcommand run twice with the same configuration writes
    byte-identical JSON."""
    model_path = tmp_path / "model.json"
    ds = select_columns(load_dataset(DATA_PATH), SELECTED_FEATURES)
    save_model(fit_model(ds, NBParams()), model_path)
    record = ",".join(str(v) for v in ds.X[0])
    commands = {
        "inspect": ["inspect", "--data", DATA_PATH],
        "rank": ["rank", "--data", DATA_PATH, "--evaluator", "info_gain"],
        "subset": ["subset", "--data", DATA_PATH, "--folds", "5",
                   "--stale-limit", "2"],
        "cv": ["cv", "--data", DATA_PATH],
        "tune": ["tune", "--data", DATA_PATH, "--algorithm", "knn"],
        "compare": ["compare", "--data", DATA_PATH, "--folds", "5"],
        "predict": ["predict", "--model", str(model_path), "--record", record],
    }
    for name, args in commands.items():
        outputs = []
        for run in (0, 1):
            out = tmp_path / f"{name}-{run}.json"
            _run_cli(args + ["--format", "json", "--out", str(out)])
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1], name
        json.loads(outputs[0])  # must be valid JSON


def test_data_pipeline_accounting(cleveland):
    """303 parsed, 6 dropped, 297 kept, 160/137 class balance — verified
    against a direct count over the raw file."""
    with open(DATA_PATH, "r", encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    assert len(lines) == 303
    incomplete = sum(1 for ln in lines if "?" in ln)
    assert incomplete == 6
    complete = [ln for ln in lines if "?" not in ln]
    raw_targets = [float(ln.split(",")[-1]) for ln in complete]
    negatives = sum(1 for t in raw_targets if t == 0.0)
    positives = len(raw_targets) - negatives
    assert (negatives, positives) == (160, 137)
    assert cleveland.n_rows == 297
    assert cleveland.class_counts() == (160, 137)
