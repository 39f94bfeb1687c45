"""Synthetic task generators: parity binary strings, sphere parity, tuples.

All generators are pure functions of their spec (including the seed): the
same spec yields a byte-identical task. Binary-string supports contain every
active-pattern variant exactly r times; queries are drawn iid from the same
distribution as the support.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .core import Encoding, LabeledSet, Task, TaskMeta, encode_bits, rng_for

__all__ = [
    "BooleanTaskSpec",
    "MonotheticRule",
    "PolytheticRule",
    "SphereTaskSpec",
    "TupleTaskSpec",
    "gen_boolean_task",
    "gen_sphere_task",
    "gen_tuple_task",
    "parity",
    "parity_label",
]


def parity(x: np.ndarray, active_indices) -> int:
    """Parity over the active coordinates of a +-1 encoded vector: prod x_i."""
    idx = tuple(active_indices)
    if len(idx) == 0:
        raise ValueError("parity needs a nonempty index set")
    vals = np.asarray(x, dtype=np.float64)[list(idx)]
    if not np.isin(vals, (-1.0, 1.0)).all():
        raise ValueError("parity expects +-1 encoded values")
    return int(np.prod(vals))


def parity_label(chi: int) -> int:
    """Fixed parity-to-class mapping: chi == -1 is class 1, chi == +1 class 0."""
    return 1 if chi == -1 else 0


@dataclass(frozen=True)
class BooleanTaskSpec:
    """Parity classification over binary strings with irrelevant distractors.

    n features total; a hidden subset of alpha features carries the parity
    label; the remaining n - alpha features are iid Bernoulli(p) noise.  The
    support holds each of the 2^alpha active patterns exactly r times.
    """

    n: int
    alpha: int
    p: float = 0.5
    r: int = 1
    query_count: int = 32
    encoding: Encoding = Encoding.PLUS_MINUS
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.alpha <= self.n:
            raise ValueError("alpha must lie in [1, n]")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if self.r < 1:
            raise ValueError("r must be >= 1")
        if self.query_count < 1:
            raise ValueError("query_count must be >= 1")


def _variant_patterns(alpha: int) -> np.ndarray:
    return np.array(list(itertools.product((0, 1), repeat=alpha)), dtype=np.int64)


def _pattern_labels(patterns: np.ndarray) -> np.ndarray:
    # chi = (-1)^(number of zero bits); class 1 iff chi == -1
    zeros = patterns.shape[1] - patterns.sum(axis=1)
    return (zeros % 2).astype(np.int64)


def gen_boolean_task(spec: BooleanTaskSpec) -> Task:
    rng = rng_for(spec.seed)
    active = np.sort(rng.choice(spec.n, size=spec.alpha, replace=False))
    patterns = _variant_patterns(spec.alpha)

    sup_bits = (rng.random((spec.r * 2**spec.alpha, spec.n)) < spec.p).astype(np.int64)
    sup_patterns = np.repeat(patterns, spec.r, axis=0)
    sup_bits[:, active] = sup_patterns
    sup_labels = _pattern_labels(sup_patterns)

    qry_bits = (rng.random((spec.query_count, spec.n)) < spec.p).astype(np.int64)
    qry_patterns = patterns[rng.integers(0, patterns.shape[0], size=spec.query_count)]
    qry_bits[:, active] = qry_patterns
    qry_labels = _pattern_labels(qry_patterns)

    meta = TaskMeta(
        active_indices=tuple(int(i) for i in active),
        alpha=spec.alpha,
        beta_irrelevant=spec.n - spec.alpha,
        p=spec.p,
        r=spec.r,
        encoding=spec.encoding,
        seed=spec.seed,
    )
    return Task(
        support=LabeledSet(encode_bits(sup_bits, spec.encoding), sup_labels, k=2),
        query=LabeledSet(encode_bits(qry_bits, spec.encoding), qry_labels, k=2),
        meta=meta,
    )


@dataclass(frozen=True)
class SphereTaskSpec:
    """Quadrant-parity classification of points uniform on the unit sphere.

    Class is the sign of x*y; z carries no label information.  Points with
    |x| or |y| below 1e-6 are resampled so the label is never ambiguous.
    Support and query each receive sample_count points.
    """

    sample_count: int
    seed: int = 0

    def __post_init__(self):
        if self.sample_count < 4:
            raise ValueError("sample_count must be >= 4")


def _sphere_points(count: int, rng: np.random.Generator) -> np.ndarray:
    chunks = []
    need = count
    while need > 0:
        v = rng.normal(size=(2 * need, 3))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        keep = (np.abs(v[:, 0]) >= 1e-6) & (np.abs(v[:, 1]) >= 1e-6)
        got = v[keep][:need]
        chunks.append(got)
        need -= got.shape[0]
    return np.concatenate(chunks, axis=0)


def gen_sphere_task(spec: SphereTaskSpec) -> Task:
    rng = rng_for(spec.seed)
    sup = _sphere_points(spec.sample_count, rng)
    qry = _sphere_points(spec.sample_count, rng)

    def labels(points: np.ndarray) -> np.ndarray:
        chi = np.sign(points[:, 0]) * np.sign(points[:, 1])
        return (chi < 0).astype(np.int64)  # chi == -1 is class 1

    return Task(
        support=LabeledSet(sup, labels(sup), k=2),
        query=LabeledSet(qry, labels(qry), k=2),
    )


@dataclass(frozen=True)
class MonotheticRule:
    """Class decided by a single attribute value at a single slot."""

    slot: int
    attribute: Literal["symbol", "color"]


@dataclass(frozen=True)
class PolytheticRule:
    """Class = XOR of two binary attribute indicators at a pair of slots."""

    slot_a: int
    attribute_a: Literal["symbol", "color"]
    slot_b: int
    attribute_b: Literal["symbol", "color"]


@dataclass(frozen=True)
class TupleTaskSpec:
    """Tuples of (symbol, color) slots encoded as concatenated one-hot blocks.

    A structural stand-in for composite-image tasks: rule slots carry the
    label signal, all other attributes are uniform noise.  Feature length is
    positions * (symbols_per_slot + colors_per_slot).
    """

    positions: int
    symbols_per_slot: int
    colors_per_slot: int
    rule: MonotheticRule | PolytheticRule
    support_per_group: int = 8
    query_per_group: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.positions < 2:
            raise ValueError("positions must be >= 2")
        if self.symbols_per_slot < 2 or self.colors_per_slot < 2:
            raise ValueError("attribute alphabets need at least 2 values")
        if self.support_per_group < 1 or self.query_per_group < 1:
            raise ValueError("per-group counts must be >= 1")
        slots = (
            (self.rule.slot,)
            if isinstance(self.rule, MonotheticRule)
            else (self.rule.slot_a, self.rule.slot_b)
        )
        for s in slots:
            if not 0 <= s < self.positions:
                raise ValueError(f"rule references missing slot {s}")
        if isinstance(self.rule, PolytheticRule):
            a = (self.rule.slot_a, self.rule.attribute_a)
            b = (self.rule.slot_b, self.rule.attribute_b)
            if a == b:
                raise ValueError("polythetic rule needs two distinct slot/attribute pairs")


def _attr_size(spec: TupleTaskSpec, attribute: str) -> int:
    return spec.symbols_per_slot if attribute == "symbol" else spec.colors_per_slot


def _encode_tuples(spec: TupleTaskSpec, symbols: np.ndarray, colors: np.ndarray) -> np.ndarray:
    count = symbols.shape[0]
    width = spec.positions * (spec.symbols_per_slot + spec.colors_per_slot)
    out = np.zeros((count, width), dtype=np.float64)
    block = spec.symbols_per_slot + spec.colors_per_slot
    rows = np.arange(count)
    for pos in range(spec.positions):
        base = pos * block
        out[rows, base + symbols[:, pos]] = 1.0
        out[rows, base + spec.symbols_per_slot + colors[:, pos]] = 1.0
    return out


def gen_tuple_task(spec: TupleTaskSpec) -> Task:
    rng = rng_for(spec.seed)
    rule = spec.rule

    def draw_values(attribute: str) -> np.ndarray:
        return rng.choice(_attr_size(spec, attribute), size=2, replace=False)

    if isinstance(rule, MonotheticRule):
        rule_values = draw_values(rule.attribute)
        groups = [(c,) for c in (0, 1)]  # group id == class
    else:
        values_a = draw_values(rule.attribute_a)
        values_b = draw_values(rule.attribute_b)
        groups = [(i, j) for i in (0, 1) for j in (0, 1)]  # class = i xor j

    def build(count_per_group: int) -> tuple[np.ndarray, np.ndarray]:
        total = count_per_group * len(groups)
        symbols = rng.integers(0, spec.symbols_per_slot, size=(total, spec.positions))
        colors = rng.integers(0, spec.colors_per_slot, size=(total, spec.positions))
        labels = np.empty(total, dtype=np.int64)
        row = 0
        for group in groups:
            for _ in range(count_per_group):
                if isinstance(rule, MonotheticRule):
                    (i,) = group
                    labels[row] = i
                    target = symbols if rule.attribute == "symbol" else colors
                    target[row, rule.slot] = rule_values[i]
                else:
                    i, j = group
                    labels[row] = i ^ j
                    target_a = symbols if rule.attribute_a == "symbol" else colors
                    target_b = symbols if rule.attribute_b == "symbol" else colors
                    target_a[row, rule.slot_a] = values_a[i]
                    target_b[row, rule.slot_b] = values_b[j]
                row += 1
        return _encode_tuples(spec, symbols, colors), labels

    sup_feats, sup_labels = build(spec.support_per_group)
    qry_feats, qry_labels = build(spec.query_per_group)
    return Task(
        support=LabeledSet(sup_feats, sup_labels, k=2),
        query=LabeledSet(qry_feats, qry_labels, k=2),
    )
