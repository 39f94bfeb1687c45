"""Shared data model: labelled feature sets, tasks, bit encodings, seeding.

All numeric data is float64. Arrays are validated once and then locked
(read-only), so tasks and labelled sets can be shared across threads; every
operation in this package is a pure function of its inputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

__all__ = [
    "Encoding",
    "LabeledSet",
    "Task",
    "TaskMeta",
    "decode_bits",
    "encode_bits",
    "one_hot",
    "rng_for",
    "task_from_json",
    "task_seed",
    "task_to_json",
]


class Encoding(Enum):
    """Value encoding for binary features.

    PLUS_MINUS maps bit 0 to -1 and bit 1 to +1, the natural encoding for
    dot-product and cosine similarity.  ZERO_ONE keeps bits as-is, the
    natural encoding for squared-Euclidean and L1 similarity.
    """

    PLUS_MINUS = "plus_minus"
    ZERO_ONE = "zero_one"


def _as_feature_matrix(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"feature matrix must be 2-d, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"feature matrix must be non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("feature matrix contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LabeledSet:
    """A feature matrix with dense integer class ids in [0, k).

    External label spaces are arbitrary; callers map them to 0..k-1 on
    ingestion.  k >= 2 is required because every consumer here classifies.
    """

    features: np.ndarray
    labels: np.ndarray
    k: int

    def __post_init__(self):
        feats = _as_feature_matrix(self.features)
        labels = np.array(self.labels, dtype=np.int64)
        if labels.ndim != 1 or labels.shape[0] != feats.shape[0]:
            raise ValueError("labels must be 1-d with one entry per feature row")
        if self.k < 2:
            raise ValueError(f"class count must be >= 2, got {self.k}")
        if labels.size and (labels.min() < 0 or labels.max() >= self.k):
            raise ValueError(f"labels must lie in [0, {self.k})")
        labels.setflags(write=False)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labels)

    @property
    def rows(self) -> int:
        return self.features.shape[0]

    @property
    def cols(self) -> int:
        return self.features.shape[1]

    def class_rows(self, c: int) -> np.ndarray:
        """Feature rows of class c (possibly empty)."""
        return self.features[self.labels == c]


@dataclass(frozen=True)
class TaskMeta:
    """Generation metadata attached to synthetic tasks."""

    active_indices: tuple[int, ...]
    alpha: int
    beta_irrelevant: int
    p: float
    r: int
    encoding: Encoding
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "active_indices", tuple(int(i) for i in self.active_indices))
        if self.alpha != len(self.active_indices):
            raise ValueError("alpha must equal the number of active indices")
        if self.beta_irrelevant < 0:
            raise ValueError("irrelevant feature count must be >= 0")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.r < 1:
            raise ValueError(f"variant repetition count must be >= 1, got {self.r}")


@dataclass(frozen=True)
class Task:
    """A few-shot episode: labelled support set plus labelled query set."""

    support: LabeledSet
    query: LabeledSet
    meta: TaskMeta | None = None

    def __post_init__(self):
        if self.support.cols != self.query.cols:
            raise ValueError("support and query must have the same feature count")
        if self.support.k != self.query.k:
            raise ValueError("support and query must have the same class count")
        if self.meta is not None:
            n = self.support.cols
            if self.meta.alpha + self.meta.beta_irrelevant != n:
                raise ValueError("alpha + beta_irrelevant must equal feature count")
            if any(not 0 <= i < n for i in self.meta.active_indices):
                raise ValueError("active indices out of range")

    @property
    def n_features(self) -> int:
        return self.support.cols


def one_hot(labels: Sequence[int], k: int) -> np.ndarray:
    """One-hot value matrix for dense class ids: one row per label, k columns."""
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size and (labels.min() < 0 or labels.max() >= k):
        raise ValueError(f"labels must lie in [0, {k})")
    out = np.zeros((labels.shape[0], k), dtype=np.float64)
    out[np.arange(labels.shape[0]), labels] = 1.0
    return out


def encode_bits(bits: Sequence[int], encoding: Encoding) -> np.ndarray:
    """Map {0,1} bits to real feature values under the given encoding."""
    arr = np.asarray(bits)
    if not np.isin(arr, (0, 1)).all():
        raise ValueError("bits must be 0 or 1")
    arr = arr.astype(np.float64)
    if encoding is Encoding.PLUS_MINUS:
        return 2.0 * arr - 1.0
    return arr


def decode_bits(values: Sequence[float], encoding: Encoding) -> np.ndarray:
    """Inverse of encode_bits; rejects values outside the encoding's image."""
    arr = np.asarray(values, dtype=np.float64)
    if encoding is Encoding.PLUS_MINUS:
        if not np.isin(arr, (-1.0, 1.0)).all():
            raise ValueError("values must be -1 or +1 for plus_minus encoding")
        return ((arr + 1.0) / 2.0).astype(np.int64)
    if not np.isin(arr, (0.0, 1.0)).all():
        raise ValueError("values must be 0 or 1 for zero_one encoding")
    return arr.astype(np.int64)


_MASK64 = (1 << 64) - 1


def task_seed(global_seed: int, task_index: int) -> int:
    """Derive a per-task 64-bit seed from a global seed and task index.

    splitmix64 finalizer over ``global_seed + index * golden-gamma``; the
    same inputs give the same output on every platform, and distinct indices
    give well-mixed, collision-resistant streams.
    """
    z = (int(global_seed) + int(task_index) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def rng_for(seed: int) -> np.random.Generator:
    """The package-wide RNG: PCG64, platform-stable given a 64-bit seed."""
    return np.random.Generator(np.random.PCG64(seed))


def _labeled_to_obj(ls: LabeledSet) -> dict:
    return {
        "features": [[float(v) for v in row] for row in ls.features],
        "labels": [int(v) for v in ls.labels],
        "k": ls.k,
    }


def _labeled_from_obj(obj: dict) -> LabeledSet:
    return LabeledSet(
        features=np.array(obj["features"], dtype=np.float64),
        labels=np.array(obj["labels"], dtype=np.int64),
        k=int(obj["k"]),
    )


def task_to_json(task: Task) -> str:
    """Canonical JSON for a task; identical tasks serialize byte-identically."""
    obj = {
        "support": _labeled_to_obj(task.support),
        "query": _labeled_to_obj(task.query),
        "meta": None
        if task.meta is None
        else {
            "active_indices": list(task.meta.active_indices),
            "alpha": task.meta.alpha,
            "beta_irrelevant": task.meta.beta_irrelevant,
            "p": task.meta.p,
            "r": task.meta.r,
            "encoding": task.meta.encoding.value,
            "seed": task.meta.seed,
        },
    }
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def task_from_json(text: str) -> Task:
    obj = json.loads(text)
    meta = None
    if obj.get("meta") is not None:
        m = obj["meta"]
        meta = TaskMeta(
            active_indices=tuple(m["active_indices"]),
            alpha=int(m["alpha"]),
            beta_irrelevant=int(m["beta_irrelevant"]),
            p=float(m["p"]),
            r=int(m["r"]),
            encoding=Encoding(m["encoding"]),
            seed=int(m["seed"]),
        )
    return Task(
        support=_labeled_from_obj(obj["support"]),
        query=_labeled_from_obj(obj["query"]),
        meta=meta,
    )
