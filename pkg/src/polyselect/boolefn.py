"""Exact Boolean threshold-function lab.

A Boolean function over the +-1 cube is a threshold function when some
hyperplane w.x > t reproduces its truth table.  Everything here is exact:
feasibility is decided by a rational phase-1 simplex over the unit-margin
system (w.x >= t+1 on true corners, w.x <= t-1 on false ones; scale
invariance makes the margin free), every returned witness is re-verified by
substitution on all corners, and "not a threshold function" means the exact
LP proved infeasibility.

Whole-cube enumerations exploit the symmetry group that preserves
threshold-ness (permuting inputs, negating inputs, complementing the
output): the exact LP runs once per canonical class and the decision
transfers along the orbit.  For n = 4 that is 222 classes instead of 65,536
solves.  The enumerated threshold set is cached on disk.

Corner order: corner i takes coordinate k from bit k of i (little-endian),
bit 1 -> +1 and bit 0 -> -1.  Truth tables are bit vectors in that order and
pack into integers with table[i] at bit i.
"""

from __future__ import annotations

import itertools
import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

__all__ = [
    "BooleanFunction",
    "ThresholdWitness",
    "best_threshold_agreement",
    "corners",
    "count_threshold",
    "is_threshold",
    "threshold_stats",
    "threshold_tables",
    "verify_xor_worst",
    "xor_function",
    "xor_max_accuracy",
]

_MAX_SOLVE_N = 8  # 2^n margin constraints per feasibility solve
_MAX_ENUM_N = 4  # 2^(2^n) truth tables per whole-cube enumeration


def corners(n: int) -> list[tuple[int, ...]]:
    """All +-1 cube corners in the package's pinned index order."""
    return [tuple(1 if (i >> k) & 1 else -1 for k in range(n)) for i in range(2**n)]


@dataclass(frozen=True)
class BooleanFunction:
    """Truth table over the +-1 cube corners of n variables."""

    n: int
    truth_table: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        table = tuple(int(v) for v in self.truth_table)
        if len(table) != 2**self.n:
            raise ValueError(f"truth table must have length {2 ** self.n}")
        if any(v not in (0, 1) for v in table):
            raise ValueError("truth table entries must be 0 or 1")
        object.__setattr__(self, "truth_table", table)

    @classmethod
    def from_int(cls, n: int, value: int) -> "BooleanFunction":
        if not 0 <= value < 2 ** (2**n):
            raise ValueError("table integer out of range")
        return cls(n, tuple((value >> i) & 1 for i in range(2**n)))

    @classmethod
    def from_hex(cls, n: int, text: str) -> "BooleanFunction":
        return cls.from_int(n, int(text, 16))

    def to_int(self) -> int:
        return sum(bit << i for i, bit in enumerate(self.truth_table))

    def to_hex(self) -> str:
        return format(self.to_int(), "x")

    def complement(self) -> "BooleanFunction":
        return BooleanFunction(self.n, tuple(1 - v for v in self.truth_table))


def xor_function(n: int) -> BooleanFunction:
    """Parity of all n inputs: true exactly when the corner's product is -1."""
    table = []
    for x in corners(n):
        prod = 1
        for v in x:
            prod *= v
        table.append(1 if prod == -1 else 0)
    return BooleanFunction(n, tuple(table))


@dataclass(frozen=True)
class ThresholdWitness:
    """Exact rational certificate (w, t) with w.x > t iff f(x) = 1."""

    weights: tuple[Fraction, ...]
    threshold: Fraction

    def verify(self, fn: BooleanFunction) -> bool:
        if len(self.weights) != fn.n:
            return False
        for i, x in enumerate(corners(fn.n)):
            value = sum(w * xi for w, xi in zip(self.weights, x))
            if (value > self.threshold) != bool(fn.truth_table[i]):
                return False
        return True


def _margin_feasible(rows: list[tuple[int, ...]]) -> list[Fraction] | None:
    """Exact phase-1 simplex for the system A.u >= 1 with u free.

    Free variables split into positive parts, surplus variables bring rows to
    equalities, and artificials give the starting basis.  Bland's rule on the
    structural columns guarantees termination; an artificial never re-enters
    the basis, which preserves completeness for pure feasibility.  Returns a
    feasible u or None when the optimal artificial sum is nonzero (the exact
    proof of infeasibility).
    """
    m = len(rows)
    d = len(rows[0])
    nstruct = 2 * d + m
    ncols = nstruct + m
    zero = Fraction(0)
    one = Fraction(1)

    tableau: list[list[Fraction]] = []
    for i, a in enumerate(rows):
        row = [Fraction(c) for c in a] + [Fraction(-c) for c in a]
        row += [-one if j == i else zero for j in range(m)]
        row += [one if j == i else zero for j in range(m)]
        row.append(one)
        tableau.append(row)
    basis = [nstruct + i for i in range(m)]

    # reduced costs of structural columns under the all-artificial basis
    reduced = [zero] * nstruct
    for j in range(nstruct):
        s = zero
        for i in range(m):
            s += tableau[i][j]
        reduced[j] = -s

    while True:
        enter = -1
        for j in range(nstruct):  # Bland: first improving structural column
            if reduced[j] < 0:
                enter = j
                break
        if enter < 0:
            break
        leave = -1
        best = None
        for i in range(m):
            coef = tableau[i][enter]
            if coef > 0:
                ratio = tableau[i][ncols] / coef
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave < 0:  # phase-1 objective is bounded below; unreachable
            return None
        pivot = tableau[leave][enter]
        pivot_row = [v / pivot for v in tableau[leave]]
        tableau[leave] = pivot_row
        for i in range(m):
            if i != leave:
                f = tableau[i][enter]
                if f != 0:
                    tableau[i] = [a - f * b for a, b in zip(tableau[i], pivot_row)]
        f = reduced[enter]
        if f != 0:
            for j in range(nstruct):
                reduced[j] -= f * pivot_row[j]
        basis[leave] = enter

    infeasibility = sum(tableau[i][ncols] for i in range(m) if basis[i] >= nstruct)
    if infeasibility != 0:
        return None
    parts = [zero] * (2 * d)
    for i, b in enumerate(basis):
        if b < 2 * d:
            parts[b] = tableau[i][ncols]
    return [parts[j] - parts[d + j] for j in range(d)]


def is_threshold(fn: BooleanFunction) -> ThresholdWitness | None:
    """Exact threshold decision; a witness when one exists, else None."""
    if fn.n > _MAX_SOLVE_N:
        raise ValueError(f"feasibility solve supports n <= {_MAX_SOLVE_N}")
    rows = []
    for i, x in enumerate(corners(fn.n)):
        s = 1 if fn.truth_table[i] else -1
        rows.append(tuple(s * c for c in x) + (-s,))
    u = _margin_feasible(rows)
    if u is None:
        return None
    witness = ThresholdWitness(weights=tuple(u[: fn.n]), threshold=u[fn.n])
    if not witness.verify(fn):  # soundness guard; a correct solve always passes
        raise AssertionError("simplex produced an invalid witness")
    return witness


def _corner_permutations(n: int) -> list[np.ndarray]:
    """Corner index maps for every signed permutation of the inputs."""
    maps = []
    idx = list(range(2**n))
    for perm in itertools.permutations(range(n)):
        for signs in itertools.product((1, -1), repeat=n):
            pi = np.empty(2**n, dtype=np.int64)
            for i in idx:
                j = 0
                for k in range(n):
                    bit = (i >> perm[k]) & 1
                    val = (1 if bit else -1) * signs[k]
                    if val == 1:
                        j |= 1 << k
                pi[i] = j
            maps.append(pi)
    return maps


def _canonical_tables(n: int) -> np.ndarray:
    """Minimum orbit representative for every truth table, as an int array."""
    size = 2**n
    total = 2**size
    values = np.arange(total, dtype=np.uint64)
    bits = ((values[:, None] >> np.arange(size, dtype=np.uint64)[None, :]) & 1).astype(np.uint64)
    full = np.uint64(total - 1)
    canon = values.copy()
    for pi in _corner_permutations(n):
        powers = (np.uint64(1) << pi.astype(np.uint64)).astype(np.uint64)
        permuted = bits @ powers
        np.minimum(canon, permuted, out=canon)
        np.minimum(canon, full - permuted, out=canon)
    return canon


def _cache_dir() -> Path:
    env = os.environ.get("POLYSELECT_CACHE")
    base = Path(env) if env else Path.home() / ".cache" / "polyselect"
    base.mkdir(parents=True, exist_ok=True)
    return base


def threshold_tables(n: int, cache: bool = True) -> np.ndarray:
    """Sorted integer truth tables of every threshold function of n inputs.

    Decided by the exact LP once per symmetry class; cached on disk after the
    first enumeration.
    """
    if not 1 <= n <= _MAX_ENUM_N:
        raise ValueError(f"whole-cube enumeration supports n in [1, {_MAX_ENUM_N}]")
    cache_path = _cache_dir() / f"threshold_tables_n{n}.json"
    if cache and cache_path.exists():
        data = json.loads(cache_path.read_text())
        if data.get("n") == n:
            return np.array(sorted(data["tables"]), dtype=np.uint64)

    canon = _canonical_tables(n)
    reps = np.unique(canon)
    decisions = {}
    for rep in reps:
        fn = BooleanFunction.from_int(n, int(rep))
        decisions[int(rep)] = is_threshold(fn) is not None
    mask = np.fromiter((decisions[int(c)] for c in canon), dtype=bool, count=canon.shape[0])
    tables = np.nonzero(mask)[0].astype(np.uint64)

    if cache:
        tmp = cache_path.with_suffix(".tmp")
        tmp.write_text(json.dumps({"n": n, "tables": [int(t) for t in tables]}))
        tmp.replace(cache_path)
    return tables


def count_threshold(n: int) -> int:
    """Number of threshold functions of n inputs (exact enumeration)."""
    return int(threshold_tables(n).shape[0])


_POPCOUNT = np.array([bin(i).count("1") for i in range(1 << 16)], dtype=np.uint8)


def _agreements(value: int, tables: np.ndarray, size: int) -> np.ndarray:
    diff = np.bitwise_xor(np.uint64(value), tables)
    return size - _POPCOUNT[diff.astype(np.int64)]


def best_threshold_agreement(fn: BooleanFunction) -> tuple[int, ThresholdWitness]:
    """Best corner agreement achievable by any threshold function, plus a
    witness of a maximiser."""
    size = 2**fn.n
    tables = threshold_tables(fn.n)
    agree = _agreements(fn.to_int(), tables, size)
    best_idx = int(np.argmax(agree))
    best_fn = BooleanFunction.from_int(fn.n, int(tables[best_idx]))
    witness = is_threshold(best_fn)
    assert witness is not None
    return int(agree[best_idx]), witness


def xor_max_accuracy(n: int) -> int:
    """Corners of the n-cube a hyperplane can classify correctly under parity.

    Closed form 2^(n-1) + C(n-1, floor((n-1)/2)): planes normal to a cube
    diagonal meet the parity colouring in alternating binomial layers, and
    the best cut keeps the largest layer.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return 2 ** (n - 1) + math.comb(n - 1, (n - 1) // 2)


def verify_xor_worst(n: int) -> tuple[bool, list[int]]:
    """Exhaustively confirm no function is harder to approximate than parity.

    Returns (claim holds, truth tables attaining the minimum best-agreement).
    """
    size = 2**n
    tables = threshold_tables(n)
    total = 2 ** (2**n)
    worst = size + 1
    offenders: list[int] = []
    chunk = 4096
    values = np.arange(total, dtype=np.uint64)
    for start in range(0, total, chunk):
        block = values[start : start + chunk]
        diff = np.bitwise_xor(block[:, None], tables[None, :])
        agree = size - _POPCOUNT[diff.astype(np.int64)]
        best = agree.max(axis=1)
        block_min = int(best.min())
        if block_min < worst:
            worst = block_min
            offenders = [int(v) for v in block[best == block_min]]
        elif block_min == worst:
            offenders.extend(int(v) for v in block[best == block_min])
    return worst == xor_max_accuracy(n), offenders


def threshold_stats(n: int) -> tuple[float, float]:
    """(solved fraction, mean best accuracy) over all n-input functions."""
    size = 2**n
    tables = threshold_tables(n)
    total = 2 ** (2**n)
    solved_fraction = tables.shape[0] / total
    acc_sum = 0.0
    chunk = 4096
    values = np.arange(total, dtype=np.uint64)
    for start in range(0, total, chunk):
        block = values[start : start + chunk]
        diff = np.bitwise_xor(block[:, None], tables[None, :])
        agree = size - _POPCOUNT[diff.astype(np.int64)]
        acc_sum += float(agree.max(axis=1).sum()) / size
    return solved_fraction, acc_sum / total
