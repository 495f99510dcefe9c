"""Hyperparameter records for the three classifiers."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class NBParams:
    use_kernel_density: bool = False
    laplace: float = 0.0
    bandwidth_adjust: float = 1.0

    algorithm = "nb"

    def __post_init__(self):
        if self.laplace < 0:
            raise ValueError("laplace must be >= 0")
        if self.bandwidth_adjust <= 0:
            raise ValueError("bandwidth_adjust must be > 0")

    def to_dict(self):
        return {"algorithm": "nb", "use_kernel_density": self.use_kernel_density,
                "laplace": self.laplace, "bandwidth_adjust": self.bandwidth_adjust}


@dataclass(frozen=True)
class KNNParams:
    k: int = 5

    algorithm = "knn"

    def __post_init__(self):
        if self.k < 1 or self.k % 2 == 0:
            raise ValueError("k must be an odd positive integer")

    def to_dict(self):
        return {"algorithm": "knn", "k": self.k}


@dataclass(frozen=True)
class SVMParams:
    C: float = 0.25
    sigma: float = 0.1268408

    algorithm = "svm"

    def __post_init__(self):
        if self.C <= 0 or self.sigma <= 0:
            raise ValueError("C and sigma must be > 0")

    def to_dict(self):
        return {"algorithm": "svm", "C": self.C, "sigma": self.sigma}


HyperParams = NBParams | KNNParams | SVMParams


def params_from_dict(d) -> HyperParams:
    algo = d["algorithm"]
    if algo == "nb":
        return NBParams(use_kernel_density=bool(d["use_kernel_density"]),
                        laplace=float(d["laplace"]),
                        bandwidth_adjust=float(d["bandwidth_adjust"]))
    if algo == "knn":
        return KNNParams(k=int(d["k"]))
    if algo == "svm":
        return SVMParams(C=float(d["C"]), sigma=float(d["sigma"]))
    raise ValueError(f"unknown algorithm {algo!r}")
