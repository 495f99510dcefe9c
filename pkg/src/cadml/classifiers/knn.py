"""k-nearest neighbors with Euclidean distance and majority vote.

Tie rules are fixed for determinism: equal distances break by exemplar index,
equal vote counts break by smaller summed distance, then class 0.
"""
from __future__ import annotations

import numpy as np

from ..dataset import Dataset
from ..errors import LengthMismatch, TooFewRows
from .params import KNNParams


def euclidean_distance(x, p) -> float:
    x = np.asarray(x, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    if x.shape != p.shape:
        raise LengthMismatch(x.shape, p.shape)
    return float(np.sqrt(np.sum((x - p) ** 2)))


class KNNModel:
    def __init__(self, X, y, k: int):
        self.X = np.asarray(X, dtype=np.float64)
        self.y = np.asarray(y, dtype=np.int64)
        if k > len(self.y):
            raise TooFewRows(f"k={k} exceeds {len(self.y)} exemplars")
        self.k = k

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def predict(self, x) -> int:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n_features,):
            raise LengthMismatch(self.n_features, x.shape)
        d = np.sqrt(np.sum((self.X - x) ** 2, axis=1))
        # stable sort: distance ties resolve by exemplar index
        nearest = np.argsort(d, kind="stable")[: self.k]
        labels = self.y[nearest]
        votes = np.bincount(labels, minlength=2)
        if votes[0] != votes[1]:
            return int(np.argmax(votes))
        sums = np.array([np.sum(d[nearest[labels == c]]) for c in (0, 1)])
        return 0 if sums[0] <= sums[1] else 1

    def predict_batch(self, X) -> np.ndarray:
        return np.array([self.predict(row) for row in np.asarray(X, dtype=np.float64)])

    def to_dict(self):
        return {
            "algorithm": "knn",
            "version": 1,
            "k": self.k,
            "exemplars": [[float(v) for v in row] for row in self.X],
            "labels": [int(v) for v in self.y],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(X=np.asarray(d["exemplars"]), y=np.asarray(d["labels"]), k=int(d["k"]))


def knn_fit(ds: Dataset, params: KNNParams = KNNParams()) -> KNNModel:
    return KNNModel(X=ds.X.copy(), y=ds.y.copy(), k=params.k)
