"""Analytic misclassification statistics for parity tasks, with oracles.

Setting: a support set holding every active pattern of a parity task exactly
r times, plus beta irrelevant iid Bernoulli(p) features per example.  A query
from the positive class is classified by the sign of the signed attention
score sum  sum_i (-1)^(delta_i) X(delta_i),  where delta_i is the query's
active-pattern Hamming distance to support row i and X is the exponential of
the kernel score.

A pair of irrelevant bits agrees with probability pbar = p^2 + (1-p)^2, so
each support row's irrelevant contribution is a binomial over beta trials.
The closed forms below treat those contributions as independent across
support rows; exhaustive_stats evaluates exactly that model by enumerating
the (query-bit, support-bit) configurations, and mc_misclassification
samples full tasks instead (where one query shares its irrelevant bits
across all support rows, which leaves the mean unchanged but perturbs the
variance when p != 0.5).

Kernel score models on their natural encodings:

    dot           f(delta) = alpha - 2*delta   match +1 / mismatch -1 per bit
    cosine        f(delta) = 1 - 2*delta/alpha match +1 / mismatch -1 per bit
    sq_euclidean  f(delta) = -delta            match  0 / mismatch -1 per bit

The laplace kernel coincides with sq_euclidean on the zero/one encoding and
is treated as an alias.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import rng_for
from .kernels import Kernel

__all__ = [
    "MCResult",
    "ScoreStats",
    "SnrGrowth",
    "TheoryParams",
    "and_boundary",
    "exhaustive_stats",
    "expected_score",
    "mc_misclassification",
    "mc_signed_sums",
    "pbar",
    "qbar",
    "snr_growth",
    "support_sum_stats",
    "var_score",
]

# Enumeration bounds for the exhaustive oracle.
_MAX_ALPHA = 4
_MAX_BETA = 6
_MAX_R = 3

# exp overflows float64 near 709, so closed forms switch to log space; values
# whose log exceeds this still overflow to inf on conversion.
_EXP_OVERFLOW = 709.0


@dataclass(frozen=True)
class TheoryParams:
    alpha: int
    beta_irrelevant: int
    p: float
    r: int
    kernel: Kernel = Kernel.DOT

    def __post_init__(self):
        if self.alpha < 1:
            raise ValueError("alpha must be >= 1")
        if self.beta_irrelevant < 0:
            raise ValueError("beta_irrelevant must be >= 0")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if self.r < 1:
            raise ValueError("r must be >= 1")


@dataclass(frozen=True)
class ScoreStats:
    mean: float
    variance: float


@dataclass(frozen=True)
class MCResult:
    mean: float
    variance: float
    misclass_rate: float
    trials: int


@dataclass(frozen=True)
class SnrGrowth:
    betas: tuple[int, ...]
    ratios: tuple[float, ...]
    fitted_slope: float
    asymptotic_slope: float


def pbar(p: float) -> float:
    """Probability two independent Bernoulli(p) bits agree: p^2 + (1-p)^2."""
    return p * p + (1.0 - p) * (1.0 - p)


def qbar(p: float) -> float:
    """Complement of pbar: probability two independent bits disagree."""
    return 1.0 - pbar(p)


def _base_kernel(kernel: Kernel) -> Kernel:
    return Kernel.SQ_EUCLIDEAN if kernel is Kernel.LAPLACE else kernel


def _active_exponent(kernel: Kernel, alpha: int, delta: np.ndarray | int):
    d = np.asarray(delta, dtype=np.float64)
    kernel = _base_kernel(kernel)
    if kernel is Kernel.DOT:
        return alpha - 2.0 * d
    if kernel is Kernel.COSINE:
        return 1.0 - 2.0 * d / alpha
    return -d


def _bit_exponents(kernel: Kernel) -> tuple[float, float]:
    """Per irrelevant bit: (exponent when matching, exponent when differing)."""
    if _base_kernel(kernel) is Kernel.SQ_EUCLIDEAN:
        return 0.0, -1.0
    return 1.0, -1.0


def expected_score(delta: int, params: TheoryParams) -> float:
    """Mean of a single support row's score at active distance delta."""
    if not 0 <= delta <= params.alpha:
        raise ValueError("delta must lie in [0, alpha]")
    m, mm = _bit_exponents(params.kernel)
    pb, qb = pbar(params.p), qbar(params.p)
    factor = pb * math.exp(m) + qb * math.exp(mm)
    f = float(_active_exponent(params.kernel, params.alpha, delta))
    return math.exp(f + params.beta_irrelevant * math.log(factor))


def var_score(delta: int, params: TheoryParams) -> float:
    """Variance of a single support row's score at active distance delta."""
    if not 0 <= delta <= params.alpha:
        raise ValueError("delta must lie in [0, alpha]")
    m, mm = _bit_exponents(params.kernel)
    pb, qb = pbar(params.p), qbar(params.p)
    beta = params.beta_irrelevant
    c1 = pb * math.exp(m) + qb * math.exp(mm)
    c2 = pb * math.exp(2 * m) + qb * math.exp(2 * mm)
    f = float(_active_exponent(params.kernel, params.alpha, delta))
    if beta == 0 or qb == 0.0:  # no irrelevant bits, or they always match
        return 0.0
    # c2^beta - c1^(2 beta) in log space: c2 > c1^2 by Jensen when qb > 0
    log_gap = beta * math.log(c2) + math.log1p(-math.exp(beta * (2 * math.log(c1) - math.log(c2))))
    return math.exp(2 * f + log_gap)


def _sum_bases(kernel: Kernel, alpha: int) -> tuple[float, float]:
    """(signed sum of e^f, sum of e^2f) over the binomially-weighted deltas.

    Closed forms: dot -> ((e - 1/e)^alpha, (e^2 + e^-2)^alpha); cosine
    substitutes exponent 1/alpha; sq_euclidean -> ((1 - 1/e)^alpha,
    (1 + e^-2)^alpha).
    """
    kernel = _base_kernel(kernel)
    if kernel is Kernel.DOT:
        return (math.e - math.exp(-1)) ** alpha, (math.exp(2) + math.exp(-2)) ** alpha
    if kernel is Kernel.COSINE:
        a = math.exp(1.0 / alpha) - math.exp(-1.0 / alpha)
        b = math.exp(2.0 / alpha) + math.exp(-2.0 / alpha)
        return a**alpha, b**alpha
    return (1.0 - math.exp(-1)) ** alpha, (1.0 + math.exp(-2)) ** alpha


def support_sum_stats(params: TheoryParams) -> ScoreStats:
    """Mean and variance of the signed score sum over the whole support.

    mean = r * base1 * c1^beta and variance = r * base2 * (c2^beta -
    c1^(2 beta)), computed in log space so large beta degrades to inf rather
    than raising.
    """
    m, mm = _bit_exponents(params.kernel)
    pb, qb = pbar(params.p), qbar(params.p)
    beta = params.beta_irrelevant
    base1, base2 = _sum_bases(params.kernel, params.alpha)
    c1 = pb * math.exp(m) + qb * math.exp(mm)

    log_mean = math.log(params.r) + math.log(base1) + beta * math.log(c1)
    mean = math.exp(log_mean) if log_mean <= _EXP_OVERFLOW else math.inf

    if beta == 0 or qb == 0.0:
        return ScoreStats(mean=mean, variance=0.0)
    c2 = pb * math.exp(2 * m) + qb * math.exp(2 * mm)
    log_gap = beta * math.log(c2) + math.log1p(-math.exp(beta * (2 * math.log(c1) - math.log(c2))))
    log_var = math.log(params.r) + math.log(base2) + log_gap
    variance = math.exp(log_var) if log_var <= _EXP_OVERFLOW else math.inf
    return ScoreStats(mean=mean, variance=variance)


def exhaustive_stats(params: TheoryParams) -> ScoreStats:
    """Exact moments of the signed score sum by enumerating bit configurations.

    For each active distance delta, every (query bits, support bits) pair of
    irrelevant configurations is enumerated with its exact probability to get
    the per-row score moments; rows combine under the independence the closed
    forms assume.  This is the oracle that adjudicates the closed forms: any
    disagreement beyond float error means the closed form is wrong.
    """
    alpha, beta, r = params.alpha, params.beta_irrelevant, params.r
    if alpha > _MAX_ALPHA or beta > _MAX_BETA or r > _MAX_R:
        raise ValueError(
            f"enumeration bounds exceeded: need alpha <= {_MAX_ALPHA}, "
            f"beta <= {_MAX_BETA}, r <= {_MAX_R}"
        )
    m, mm = _bit_exponents(params.kernel)

    # Enumerate irrelevant-bit pairs once: match-count distribution over
    # 2^beta x 2^beta weighted configurations.
    e1_bits = 0.0
    e2_bits = 0.0
    for q_bits in range(2**beta):
        pq = 1.0
        for j in range(beta):
            pq *= params.p if (q_bits >> j) & 1 else 1.0 - params.p
        for s_bits in range(2**beta):
            ps = 1.0
            for j in range(beta):
                ps *= params.p if (s_bits >> j) & 1 else 1.0 - params.p
            matches = beta - bin(q_bits ^ s_bits).count("1")
            g = matches * m + (beta - matches) * mm
            e1_bits += pq * ps * math.exp(g)
            e2_bits += pq * ps * math.exp(2 * g)

    mean = 0.0
    variance = 0.0
    bit_var = e2_bits - e1_bits * e1_bits  # exactly 0 when beta == 0
    for delta in range(alpha + 1):
        count = r * math.comb(alpha, delta)
        f = float(_active_exponent(params.kernel, alpha, delta))
        sign = -1.0 if delta % 2 else 1.0
        mean += sign * count * math.exp(f) * e1_bits
        variance += count * math.exp(2 * f) * bit_var
    return ScoreStats(mean=mean, variance=variance)


def mc_signed_sums(
    params: TheoryParams, trials: int, seed: int, tau_inv: float = 1.0
) -> np.ndarray:
    """Signed score sums from sampled tasks, one value per trial.

    Each trial draws a full support (every variant r times, irrelevant bits
    iid) and one query whose irrelevant bits are shared across all support
    comparisons, exactly as the task generator does.  The underlying bit
    draws depend only on (params sizes, seed), not on the kernel, so runs
    with different kernels on the same seed see identical bit patterns.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    alpha, beta, r = params.alpha, params.beta_irrelevant, params.r
    rng = rng_for(seed)

    # delta profile: the query's active pattern sits at distance delta from
    # r * C(alpha, delta) support rows regardless of which pattern it is.
    deltas = np.repeat(np.arange(alpha + 1), [math.comb(alpha, d) for d in range(alpha + 1)])
    deltas = np.tile(deltas, r)
    signs = np.where(deltas % 2 == 0, 1.0, -1.0)
    f = _active_exponent(params.kernel, alpha, deltas)

    rows = deltas.shape[0]
    sup_bits = rng.random(size=(trials, rows, beta)) < params.p
    qry_bits = rng.random(size=(trials, 1, beta)) < params.p
    matches = np.sum(sup_bits == qry_bits, axis=2, dtype=np.float64)

    m, mm = _bit_exponents(params.kernel)
    exponents = f[None, :] + matches * m + (beta - matches) * mm
    scores = np.exp(tau_inv * exponents)
    return np.sum(signs[None, :] * scores, axis=1)


def mc_misclassification(
    params: TheoryParams, trials: int, seed: int, tau_inv: float = 1.0
) -> MCResult:
    """Monte-Carlo estimate of the signed-sum moments and failure rate.

    A trial misclassifies when its signed sum is <= 0 (ties count as
    failures).  With beta == 0 the sum is deterministic and positive, so the
    rate is exactly zero.
    """
    sums = mc_signed_sums(params, trials, seed, tau_inv)
    variance = float(np.var(sums, ddof=1)) if trials > 1 else 0.0
    return MCResult(
        mean=float(np.mean(sums)),
        variance=variance,
        misclass_rate=float(np.mean(sums <= 0.0)),
        trials=trials,
    )


def snr_growth(params: TheoryParams, betas) -> SnrGrowth:
    """sigma/mu across an irrelevant-feature range, with its log-linear slope.

    log(sigma/mu) is asymptotically linear in beta with slope
    0.5 * log(c2 / c1^2); the fitted slope is the mean successive difference
    over the top half of the range.
    """
    betas = tuple(int(b) for b in betas)
    if len(betas) < 2:
        raise ValueError("need at least two beta values")
    ratios = []
    for beta in betas:
        stats = support_sum_stats(
            TheoryParams(params.alpha, beta, params.p, params.r, params.kernel)
        )
        if stats.mean <= 0:
            raise ValueError("signed-sum mean must be positive on the range")
        ratios.append(math.sqrt(stats.variance) / stats.mean)

    m, mm = _bit_exponents(params.kernel)
    pb, qb = pbar(params.p), qbar(params.p)
    c1 = pb * math.exp(m) + qb * math.exp(mm)
    c2 = pb * math.exp(2 * m) + qb * math.exp(2 * mm)
    asymptotic = 0.5 * math.log(c2 / (c1 * c1))

    pts = [(b, math.log(x)) for b, x in zip(betas, ratios) if x > 0]
    if len(pts) < 2:
        fitted = 0.0
    else:
        tail = pts[len(pts) // 2 :] if len(pts) >= 4 else pts
        bs = np.array([b for b, _ in tail], dtype=np.float64)
        ls = np.array([v for _, v in tail], dtype=np.float64)
        fitted = float(np.polyfit(bs, ls, 1)[0])
    return SnrGrowth(
        betas=betas,
        ratios=tuple(ratios),
        fitted_slope=fitted,
        asymptotic_slope=asymptotic,
    )


def and_boundary(tau_inv: float, x) -> np.ndarray | float:
    """Closed-form equal-probability boundary of the four-corner AND task.

    For support (+1,+1) -> class 1 and the other three +-1 corners -> class
    0 under dot attention with sharpness tau_inv, the boundary is
    y = -log(tanh(tau_inv * x)) / (2 * tau_inv), defined for x > 0.
    """
    if tau_inv <= 0:
        raise ValueError("tau_inv must be positive")
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr <= 0):
        raise ValueError("boundary defined for x > 0 only")
    out = -np.log(np.tanh(tau_inv * arr)) / (2.0 * tau_inv)
    return float(out) if np.isscalar(x) else out
