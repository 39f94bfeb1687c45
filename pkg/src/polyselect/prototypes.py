"""Class-mean prototype baseline: softmax over negative squared distances.

This is the threshold-classifier reference point, deliberately run on raw
features (no learned embedding) to expose where nearest-mean classification
breaks: a complete balanced parity task collapses every class mean onto the
same point, leaving no decision boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import LabeledSet
from .kernels import softmax_rows

__all__ = ["PrototypeSet", "build_prototypes", "proto_classify"]


@dataclass(frozen=True)
class PrototypeSet:
    """One mean feature vector per class, row c for class c."""

    means: np.ndarray
    k: int

    def __post_init__(self):
        means = np.asarray(self.means, dtype=np.float64)
        if means.ndim != 2 or means.shape[0] != self.k:
            raise ValueError("means must have one row per class")
        if not np.all(np.isfinite(means)):
            raise ValueError("prototype means must be finite")
        means.setflags(write=False)
        object.__setattr__(self, "means", means)


def build_prototypes(support: LabeledSet) -> PrototypeSet:
    """Arithmetic mean of each class's support rows; every class must appear."""
    means = np.empty((support.k, support.cols), dtype=np.float64)
    for c in range(support.k):
        rows = support.class_rows(c)
        if rows.shape[0] == 0:
            raise ValueError(f"class {c} has no support examples")
        means[c] = rows.mean(axis=0)
    return PrototypeSet(means=means, k=support.k)


def proto_classify(query_features: np.ndarray, protos: PrototypeSet, tau_inv: float = 1.0) -> np.ndarray:
    """Class probabilities: softmax of -tau_inv * squared distance to each mean."""
    queries = np.asarray(query_features, dtype=np.float64)
    if queries.shape[1] != protos.means.shape[1]:
        raise ValueError("query and prototype dimensions differ")
    q2 = np.sum(queries**2, axis=1)[:, None]
    m2 = np.sum(protos.means**2, axis=1)[None, :]
    neg_sq = 2.0 * (queries @ protos.means.T) - q2 - m2
    return softmax_rows(neg_sq, tau_inv)
