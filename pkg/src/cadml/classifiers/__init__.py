"""Unified train/predict surface over the three classifiers.

FittedModel bundles the trained classifier with the input-scaling stats and
feature names it was trained with, so a saved model can be applied to raw
records later. Serialization is versioned JSON and round-trips exactly.
"""
from __future__ import annotations

import json

import numpy as np

from ..dataset import Dataset, FeatureSchema, Standardization, fit_standardization, standardize
from ..errors import LengthMismatch
from .knn import KNNModel, euclidean_distance, knn_fit
from .naive_bayes import NBModel, nb_fit
from .params import HyperParams, KNNParams, NBParams, SVMParams, params_from_dict
from .svm import SVMModel, dual_objective, kkt_residuals, rbf_gram, rbf_kernel, svm_fit

__all__ = [
    "NBParams", "KNNParams", "SVMParams", "HyperParams", "params_from_dict",
    "NBModel", "KNNModel", "SVMModel", "FittedModel",
    "nb_fit", "knn_fit", "svm_fit", "fit_model",
    "euclidean_distance", "rbf_kernel", "rbf_gram", "dual_objective", "kkt_residuals",
    "load_model", "save_model",
]


class FittedModel:
    def __init__(self, model, schema: tuple[FeatureSchema, ...],
                 scaling: Standardization | None):
        self.model = model
        self.schema = schema
        self.scaling = scaling

    @property
    def algorithm(self) -> str:
        return self.model.params.algorithm if hasattr(self.model, "params") else "knn"

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.schema)

    def _transform(self, X: np.ndarray) -> np.ndarray:
        if X.ndim != 2 or X.shape[1] != len(self.schema):
            raise LengthMismatch(len(self.schema), X.shape)
        return self.scaling.apply(X) if self.scaling is not None else X

    def predict(self, x) -> int:
        X = np.asarray(x, dtype=np.float64)[None, :]
        return int(self.model.predict(self._transform(X)[0]))

    def predict_batch(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        return self.model.predict_batch(self._transform(X))

    def posterior(self, x):
        """Class-probability vector; only the naive Bayes model supplies one."""
        if not isinstance(self.model, NBModel):
            return None
        X = np.asarray(x, dtype=np.float64)[None, :]
        return self.model.posterior(self._transform(X)[0])

    def to_dict(self):
        d = {
            "format_version": 1,
            "schema": [
                {"name": f.name, "kind": f.kind,
                 "allowed_values": list(f.allowed_values) if f.allowed_values else None}
                for f in self.schema
            ],
            "model": self.model.to_dict(),
            "scaling": None,
        }
        if self.scaling is not None:
            d["scaling"] = {"mean": [float(v) for v in self.scaling.mean],
                            "std": [float(v) for v in self.scaling.std]}
        return d

    @classmethod
    def from_dict(cls, d):
        schema = tuple(
            FeatureSchema(name=f["name"], kind=f["kind"],
                          allowed_values=tuple(f["allowed_values"]) if f["allowed_values"] else None)
            for f in d["schema"]
        )
        md = d["model"]
        if md["algorithm"] == "nb":
            model = NBModel.from_dict(md, schema)
        elif md["algorithm"] == "knn":
            model = KNNModel.from_dict(md)
        elif md["algorithm"] == "svm":
            model = SVMModel.from_dict(md)
        else:
            raise ValueError(f"unknown algorithm {md['algorithm']!r}")
        scaling = None
        if d.get("scaling") is not None:
            scaling = Standardization(mean=np.asarray(d["scaling"]["mean"]),
                                      std=np.asarray(d["scaling"]["std"]))
        return cls(model=model, schema=schema, scaling=scaling)


def fit_model(ds: Dataset, params: HyperParams, scaling: bool = False,
              **fit_kwargs) -> FittedModel:
    """Fit the classifier selected by params, optionally z-scoring continuous
    features first (stats computed from ds itself)."""
    stats = None
    train = ds
    if scaling:
        stats = fit_standardization(ds)
        train, _ = standardize(ds, stats)
    if isinstance(params, NBParams):
        model = nb_fit(train, params)
    elif isinstance(params, KNNParams):
        model = knn_fit(train, params)
    elif isinstance(params, SVMParams):
        model = svm_fit(train, params, **fit_kwargs)
    else:
        raise TypeError(f"unknown hyperparameter type {type(params)!r}")
    return FittedModel(model=model, schema=ds.schema, scaling=stats)


def save_model(fitted: FittedModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(fitted.to_dict(), fh, sort_keys=True, indent=2)


def load_model(path) -> FittedModel:
    with open(path, "r", encoding="utf-8") as fh:
        return FittedModel.from_dict(json.load(fh))
