"""Similarity kernels, temperature softmax, and the attentional classifier.

The classifier is a softmax-weighted vote of support labels: queries are
attention queries, support features are keys, and one-hot support labels are
values.  With sharp temperature it reduces to 1-nearest-neighbour; with flat
temperature it returns the support class balance.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .core import LabeledSet, Task, one_hot

__all__ = [
    "AttentionConfig",
    "Kernel",
    "attend_classify",
    "attend_probs",
    "confidence_field",
    "confidence_field_csv",
    "predict",
    "similarity",
    "similarity_matrix",
    "softmax_rows",
]


class Kernel(Enum):
    DOT = "dot"
    COSINE = "cosine"
    SQ_EUCLIDEAN = "sq_euclidean"
    LAPLACE = "laplace"


@dataclass(frozen=True)
class AttentionConfig:
    """Kernel kind plus the scale multiplying scores inside the softmax.

    tau_inv is the sharpness: scores are multiplied by it before the softmax,
    so large values approach argmax (nearest neighbour) and values near zero
    approach the uniform vote.
    """

    kind: Kernel = Kernel.DOT
    tau_inv: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.tau_inv) or self.tau_inv <= 0:
            raise ValueError(f"tau_inv must be positive and finite, got {self.tau_inv}")


def _check_rows_nonzero(mat: np.ndarray, who: str) -> None:
    norms = np.linalg.norm(mat, axis=1)
    if np.any(norms == 0.0):
        raise ValueError(f"cosine similarity undefined: zero vector in {who}")


def similarity_matrix(config: AttentionConfig, queries: np.ndarray, keys: np.ndarray) -> np.ndarray:
    """Pairwise similarity scores, one row per query, one column per key."""
    queries = np.asarray(queries, dtype=np.float64)
    keys = np.asarray(keys, dtype=np.float64)
    if queries.shape[1] != keys.shape[1]:
        raise ValueError("query and key vectors must have equal length")
    if config.kind is Kernel.DOT:
        return queries @ keys.T
    if config.kind is Kernel.COSINE:
        _check_rows_nonzero(queries, "queries")
        _check_rows_nonzero(keys, "keys")
        qn = queries / np.linalg.norm(queries, axis=1, keepdims=True)
        kn = keys / np.linalg.norm(keys, axis=1, keepdims=True)
        return qn @ kn.T
    if config.kind is Kernel.SQ_EUCLIDEAN:
        # -|q - k|^2 expanded to stay at one matmul
        q2 = np.sum(queries**2, axis=1)[:, None]
        k2 = np.sum(keys**2, axis=1)[None, :]
        return 2.0 * (queries @ keys.T) - q2 - k2
    # Laplace: negative L1 distance
    return -np.abs(queries[:, None, :] - keys[None, :, :]).sum(axis=2)


def similarity(config: AttentionConfig, q: np.ndarray, s: np.ndarray) -> float:
    """Similarity of two single vectors under the configured kernel."""
    q = np.asarray(q, dtype=np.float64).reshape(1, -1)
    s = np.asarray(s, dtype=np.float64).reshape(1, -1)
    return float(similarity_matrix(config, q, s)[0, 0])


def softmax_rows(scores: np.ndarray, tau_inv: float = 1.0) -> np.ndarray:
    """Row-wise softmax of tau_inv * scores, stabilised by row-max subtraction."""
    scores = np.asarray(scores, dtype=np.float64)
    if not np.all(np.isfinite(scores)):
        raise ValueError("softmax input must be finite")
    z = tau_inv * scores
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def attend_probs(query_features: np.ndarray, support: LabeledSet, config: AttentionConfig) -> np.ndarray:
    """Class probabilities for arbitrary query rows against a support set."""
    scores = similarity_matrix(config, query_features, support.features)
    weights = softmax_rows(scores, config.tau_inv)
    return weights @ one_hot(support.labels, support.k)


def attend_classify(task: Task, config: AttentionConfig) -> np.ndarray:
    """Class probabilities for the task's query set; rows sum to one."""
    return attend_probs(task.query.features, task.support, config)


def predict(probs: np.ndarray) -> np.ndarray:
    """Argmax class ids; ties resolve to the lowest class id."""
    return np.argmax(probs, axis=1)


def confidence_field(
    support: LabeledSet,
    config: AttentionConfig,
    x_range: tuple[float, float] = (-3.0, 3.0),
    y_range: tuple[float, float] = (-3.0, 3.0),
    resolution: int = 101,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """P(class 1) over a 2-d grid, for plotting decision boundaries.

    Returns (xs, ys, p1) where p1[i, j] is the class-1 probability of the
    singleton query (xs[j], ys[i]).
    """
    if support.cols != 2:
        raise ValueError("confidence_field requires a 2-feature support set")
    xs = np.linspace(x_range[0], x_range[1], resolution)
    ys = np.linspace(y_range[0], y_range[1], resolution)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    probs = attend_probs(pts, support, config)
    return xs, ys, probs[:, 1].reshape(resolution, resolution)


def confidence_field_csv(
    path: str | Path,
    support: LabeledSet,
    config: AttentionConfig,
    **kwargs,
) -> Path:
    """Write the confidence grid as (x, y, p1) rows; returns the path."""
    xs, ys, p1 = confidence_field(support, config, **kwargs)
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "p1"])
        for i, y in enumerate(ys):
            for j, x in enumerate(xs):
                writer.writerow([repr(float(x)), repr(float(y)), repr(float(p1[i, j]))])
    return path
