"""Log-space combinatorics and information-theoretic primitives.

Zero is represented as ``-inf`` throughout; every function here is pure.
"""
import math
import os
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.special import gammaln, xlogy

from .errors import (
    CompositionSumMismatch,
    DomainError,
    NotNormalized,
    SupportMismatch,
    TooManyCompositions,
)

LOG_ZERO = -math.inf
NORM_TOL = 1e-12

_TABLE_SIZE = 10_000
_LOG_FACTORIAL = gammaln(np.arange(_TABLE_SIZE + 1, dtype=float) + 1.0)

MAX_COMPOSITIONS_ENV = "COLLECTIVE_WORK_MAX_COMPOSITIONS"


def default_max_compositions() -> int:
    return int(os.environ.get(MAX_COMPOSITIONS_ENV, 10_000_000))


def log_factorial(n):
    """ln(n!) for a nonnegative integer or integer array."""
    n = np.asarray(n)
    if n.ndim == 0:
        n = int(n)
        if n <= _TABLE_SIZE:
            return float(_LOG_FACTORIAL[n])
        return float(gammaln(n + 1.0))
    if n.size and n.max() <= _TABLE_SIZE:
        return _LOG_FACTORIAL[n]
    return gammaln(n + 1.0)


def log_binomial(N: int, k: int) -> float:
    """ln C(N, k); ``-inf`` when k is outside [0, N]."""
    if k < 0 or k > N:
        return LOG_ZERO
    return log_factorial(N) - log_factorial(k) - log_factorial(N - k)


def log_binomial_array(N: int, k: np.ndarray) -> np.ndarray:
    k = np.asarray(k, dtype=np.int64)
    out = np.full(k.shape, LOG_ZERO)
    ok = (k >= 0) & (k <= N)
    out[ok] = log_factorial(N) - log_factorial(k[ok]) - log_factorial(N - k[ok])
    return out


def log_multinomial(N: int, counts: Sequence[int]) -> float:
    """ln(N! / prod k_i!) for a composition of N."""
    counts = [int(c) for c in counts]
    if not counts:
        raise ValueError("counts must be non-empty")
    if any(c < 0 for c in counts):
        return LOG_ZERO
    if sum(counts) != N:
        raise CompositionSumMismatch(f"counts {counts} sum to {sum(counts)}, not {N}")
    return log_factorial(N) - sum(log_factorial(c) for c in counts)


def log_sum_exp(values: Iterable[float]) -> float:
    v = np.fromiter(values, dtype=float)
    if v.size == 0:
        return LOG_ZERO
    top = v.max()
    if top == LOG_ZERO:
        return LOG_ZERO
    if math.isinf(top):
        return top
    return float(top + math.log(math.fsum(np.exp(v - top))))


def log_sub_exp(a: float, b: float) -> float:
    """ln(e^a - e^b) for a >= b."""
    if b == LOG_ZERO:
        return a
    if b >= a:
        return LOG_ZERO
    return a + math.log1p(-math.exp(b - a))


def complement_sum(log_moved, log_left) -> float:
    """Probability sum(exp(log_moved)) whose complement is sum(exp(log_left)).

    Near 1 the complement is the more accurate side, so it is used there.
    """
    success = math.fsum(np.exp(log_moved))
    if success < 0.5:
        return success
    return min(1.0 - math.fsum(np.exp(log_left)), 1.0)


def as_distribution(probs, tol: float = NORM_TOL) -> np.ndarray:
    """Validate a probability vector and renormalize it exactly once."""
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("probabilities must be a non-empty 1-d vector")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise NotNormalized(f"negative or non-finite entries in {p}")
    total = math.fsum(p)
    if abs(total - 1.0) > tol:
        raise NotNormalized(f"probabilities sum to {total!r}")
    return p / total


def binary_relative_entropy(x: float, y: float) -> float:
    """D(x||y) between Bernoulli(x) and Bernoulli(y), in nats."""
    if not 0.0 <= x <= 1.0 or not 0.0 <= y <= 1.0:
        raise DomainError(f"arguments must lie in [0, 1], got ({x}, {y})")
    if x == y:
        return 0.0
    if y in (0.0, 1.0):
        raise DomainError(f"D({x}||{y}) is infinite")
    d = xlogy(x, x / y) + xlogy(1.0 - x, (1.0 - x) / (1.0 - y))
    return max(float(d), 0.0)


def shannon_entropy(probs) -> float:
    p = as_distribution(probs)
    return max(-math.fsum(xlogy(p, p)), 0.0)


def relative_entropy(p, q) -> float:
    """S(p||q) = sum p_i ln(p_i/q_i), in nats."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError("distributions must have equal length")
    if np.any((p > 0) & (q <= 0)):
        raise SupportMismatch("p has support where q vanishes")
    mask = p > 0
    terms = p[mask] * (np.log(p[mask]) - np.log(q[mask]))
    return max(math.fsum(terms), 0.0)


def count_compositions(N: int, d: int) -> int:
    return math.comb(N + d - 1, d - 1)


def compositions(N: int, d: int) -> Iterator[tuple]:
    """All compositions of N into d nonnegative parts, iteratively.

    Order is reverse-lexicographic starting from (N, 0, ..., 0).
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    if d == 1:
        yield (N,)
        return
    n = [N] + [0] * (d - 1)
    while True:
        yield tuple(n)
        # rightmost nonzero part among the first d-1; parts between it and the last are zero
        i = d - 2
        while i >= 0 and n[i] == 0:
            i -= 1
        if i < 0:
            return
        tail = n[d - 1]
        n[i] -= 1
        n[d - 1] = 0
        n[i + 1] = tail + 1


def composition_array(N: int, d: int, max_compositions: int | None = None) -> np.ndarray:
    """Every composition of N into d parts as an (M, d) integer array.

    Raises TooManyCompositions when M exceeds the guard.
    """
    limit = default_max_compositions() if max_compositions is None else max_compositions
    m = count_compositions(N, d)
    if m > limit:
        raise TooManyCompositions(f"{m} compositions of N={N} into d={d} exceed the limit {limit}")
    return np.array(list(compositions(N, d)), dtype=np.int64).reshape(m, d)


def log_multinomial_rows(N: int, counts: np.ndarray) -> np.ndarray:
    """Row-wise ln(N!/prod n_i!) for a composition array; -inf for rows with negatives."""
    counts = np.asarray(counts, dtype=np.int64)
    out = np.full(counts.shape[0], LOG_ZERO)
    ok = np.all(counts >= 0, axis=1)
    if ok.any():
        out[ok] = log_factorial(N) - log_factorial(counts[ok]).sum(axis=1)
    return out
