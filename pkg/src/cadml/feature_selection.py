"""Feature relevance scoring and wrapper subset search.

Two rankers: information gain (continuous features binned by supervised MDL
discretization, discrete features by their codes) and absolute Pearson
correlation against the 0/1 label. The wrapper is a greedy best-first search
over feature subsets whose objective is the mean cross-validated accuracy of
a wrapped classifier, stopping after a fixed number of consecutive
non-improving expansions.

Ties everywhere break by schema order so every result is deterministic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classifiers import HyperParams, NBParams
from .dataset import CONTINUOUS, Dataset, select_columns
from .errors import EmptyInput
from .evaluation import cross_validate, stratified_folds


def entropy(labels) -> float:
    """Shannon entropy of the label multiset, in bits."""
    labels = np.asarray(labels)
    if labels.size == 0:
        raise EmptyInput("entropy of an empty multiset")
    _, counts = np.unique(labels, return_counts=True)
    p = counts / labels.size
    return float(-np.sum(p * np.log2(p)))


def _split_entropy(labels, mask) -> float:
    n = len(labels)
    left, right = labels[mask], labels[~mask]
    h = 0.0
    if left.size:
        h += left.size / n * entropy(left)
    if right.size:
        h += right.size / n * entropy(right)
    return h


def _mdl_accepts(labels, left, right, gain) -> bool:
    n = len(labels)
    k = len(np.unique(labels))
    k1 = len(np.unique(left))
    k2 = len(np.unique(right))
    delta = math.log2(3.0**k - 2.0) - (k * entropy(labels)
                                       - k1 * entropy(left) - k2 * entropy(right))
    return gain > (math.log2(n - 1) + delta) / n


def discretize_mdl(values, labels) -> list[float]:
    """Supervised cut points by recursive entropy minimization with the MDL
    stopping criterion. Empty list means a single bin."""
    values = np.asarray(values, dtype=np.float64)
    labels = np.asarray(labels)
    if values.size == 0:
        raise EmptyInput("cannot discretize an empty column")
    order = np.argsort(values, kind="stable")
    cuts: list[float] = []
    _mdl_recurse(values[order], labels[order], cuts)
    return sorted(cuts)


def _mdl_recurse(values, labels, cuts) -> None:
    # values sorted ascending
    n = len(values)
    if n < 2 or entropy(labels) == 0.0:
        return
    boundaries = np.flatnonzero(np.diff(values) > 0) + 1  # split before index b
    if boundaries.size == 0:
        return
    base = entropy(labels)
    best_gain, best_b = -1.0, -1
    for b in boundaries:
        mask = np.zeros(n, dtype=bool)
        mask[:b] = True
        gain = base - _split_entropy(labels, mask)
        if gain > best_gain + 1e-12:
            best_gain, best_b = gain, int(b)
    left, right = labels[:best_b], labels[best_b:]
    if not _mdl_accepts(labels, left, right, best_gain):
        return
    cuts.append(0.5 * (values[best_b - 1] + values[best_b]))
    _mdl_recurse(values[:best_b], left, cuts)
    _mdl_recurse(values[best_b:], right, cuts)


def info_gain(values, labels, kind: str) -> float:
    """H(labels) minus the conditional entropy given the feature's bins."""
    values = np.asarray(values, dtype=np.float64)
    labels = np.asarray(labels)
    if values.size == 0:
        raise EmptyInput("information gain of an empty column")
    if kind == CONTINUOUS:
        cuts = discretize_mdl(values, labels)
        bins = np.digitize(values, cuts) if cuts else np.zeros(len(values), dtype=np.int64)
    else:
        bins = values
    base = entropy(labels)
    cond = 0.0
    for b in np.unique(bins):
        part = labels[bins == b]
        cond += part.size / labels.size * entropy(part)
    return max(0.0, base - cond)


def correlation_score(values, labels) -> float:
    """|Pearson r| between the feature column and the 0/1 labels; 0 when
    either column is constant."""
    values = np.asarray(values, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if values.size == 0:
        raise EmptyInput("correlation of an empty column")
    if values.size < 2 or np.std(values) == 0.0 or np.std(labels) == 0.0:
        return 0.0
    r = np.corrcoef(values, labels)[0, 1]
    return float(abs(r))


@dataclass(frozen=True)
class FeatureScore:
    feature: str
    score: float


@dataclass(frozen=True)
class RankedList:
    entries: tuple[FeatureScore, ...]

    def names(self) -> tuple[str, ...]:
        return tuple(e.feature for e in self.entries)

    def to_dict(self):
        return {"entries": [{"feature": e.feature, "score": e.score} for e in self.entries]}


EVALUATORS = ("info_gain", "correlation")


def rank_features(ds: Dataset, evaluator: str) -> RankedList:
    if evaluator not in EVALUATORS:
        raise ValueError(f"unknown evaluator {evaluator!r}")
    scores = []
    for j, feat in enumerate(ds.schema):
        col = ds.X[:, j]
        if evaluator == "info_gain":
            s = info_gain(col, ds.y, feat.kind)
        else:
            s = correlation_score(col, ds.y)
        scores.append((j, FeatureScore(feature=feat.name, score=s)))
    # descending score, schema order on ties
    scores.sort(key=lambda t: (-t[1].score, t[0]))
    return RankedList(entries=tuple(fs for _, fs in scores))


@dataclass(frozen=True)
class SubsetSearchResult:
    selected: tuple[str, ...]
    objective: float
    expansions: int

    def to_dict(self):
        return {"selected": list(self.selected), "objective": self.objective,
                "expansions": self.expansions}


def best_first_subset(ds: Dataset, wrapped: HyperParams = NBParams(), folds: int = 10,
                      seed: int = 1, stale_limit: int | None = 5,
                      min_improvement: float = 0.005) -> SubsetSearchResult:
    """Greedy best-first search from the empty set, expanding by single-feature
    addition and deletion; objective is the wrapped classifier's mean k-fold CV
    accuracy on the subset. The fold assignment is computed once so every
    subset is scored on identical splits. stale_limit=None searches until the
    open list is exhausted.

    A candidate only displaces the incumbent best subset when it beats it by
    more than min_improvement; gains below half a percentage point of CV
    accuracy on a dataset this size are partition noise, and counting them
    drags marginal features into the subset.
    """
    if stale_limit is not None and stale_limit < 1:
        raise ValueError("stale_limit must be >= 1")
    names = ds.feature_names
    assignment = stratified_folds(ds.y, folds, seed)
    majority = max(ds.class_counts()) / ds.n_rows
    cache: dict[frozenset, float] = {}

    def objective(subset: frozenset) -> float:
        if subset in cache:
            return cache[subset]
        if not subset:
            score = majority  # prior-only classifier predicts the majority class
        else:
            view = select_columns(ds, [n for n in names if n in subset])
            score = cross_validate(view, wrapped, folds, seed, scaling=False,
                                   folds=assignment).mean_accuracy
        cache[subset] = score
        return score

    start = frozenset()
    open_list: list[tuple[frozenset, int]] = [(start, 0)]  # (subset, discovery order)
    discovered = {start}
    expanded: set[frozenset] = set()
    best_subset, best_score = start, objective(start)
    counter = 1
    stale = 0
    expansions = 0
    while open_list:
        open_list.sort(key=lambda t: (-cache[t[0]], t[1]))
        node, _ = open_list.pop(0)
        expanded.add(node)
        expansions += 1
        improved = False
        for name in names:
            child = node | {name} if name not in node else node - {name}
            if child in discovered:
                continue
            discovered.add(child)
            score = objective(child)
            open_list.append((child, counter))
            counter += 1
            if score > best_score + min_improvement:
                best_subset, best_score = child, score
                improved = True
        if improved:
            stale = 0
        else:
            stale += 1
            if stale_limit is not None and stale >= stale_limit:
                break
    selected = tuple(n for n in names if n in best_subset)
    return SubsetSearchResult(selected=selected, objective=best_score, expansions=expansions)
