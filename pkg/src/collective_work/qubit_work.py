"""Collective work extraction from N identical qubits in thermal isolation.

A qubit has ground population ``1 - p``, excited population ``p`` and gap
``nu``.  Work targets are integers ``k`` (work ``k * nu``); sub-optimality
fractions ``gamma`` map to ``k = floor(N (2p - 1)(1 - gamma))``.
"""
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import xlogy

from .errors import NoSolution, RangeError
from .numerics import LOG_ZERO, binary_relative_entropy, complement_sum, log_binomial_array, log_sub_exp

# absorbs float noise in products such as 10 * (2/3) * 0.6
_FLOOR_EPS = 1e-9


class Bound(NamedTuple):
    """A lower bound on a success probability; ``vacuous`` when clamped to 0."""

    value: float
    vacuous: bool


def clamp_bound(x: float) -> Bound:
    if x <= 0.0:
        return Bound(0.0, True)
    return Bound(min(x, 1.0), False)


def floor_tol(x: float) -> int:
    return math.floor(x + _FLOOR_EPS)


def ceil_tol(x: float) -> int:
    return math.ceil(x - _FLOOR_EPS * max(1.0, abs(x)))


@dataclass(frozen=True)
class QubitEnsemble:
    p: float
    nu: float = 1.0
    N: int = 1

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise RangeError(f"p must lie in [0, 1], got {self.p}")
        if not self.nu > 0:
            raise RangeError(f"nu must be positive, got {self.nu}")
        if self.N < 1:
            raise RangeError(f"N must be >= 1, got {self.N}")

    @property
    def inverted(self) -> bool:
        return self.p > 0.5


@dataclass(frozen=True)
class WorkDistribution:
    support: np.ndarray
    probs: np.ndarray

    @property
    def mean(self) -> float:
        return float(np.dot(self.support, self.probs))

    @property
    def std(self) -> float:
        m = self.mean
        return float(math.sqrt(max(np.dot((self.support - m) ** 2, self.probs), 0.0)))

    @property
    def excitation_std(self) -> float:
        """nu times the standard deviation of the number of excited copies (half of ``std``)."""
        return self.std / 2.0


def qubit_ergotropy(p: float, nu: float) -> float:
    return (2.0 * p - 1.0) * nu


def k_from_gamma(N: int, p: float, gamma: float) -> int:
    return floor_tol(N * (2.0 * p - 1.0) * (1.0 - gamma))


def gamma_from_k(N: int, p: float, k: int) -> float:
    gamma = 1.0 - k / (N * (2.0 * p - 1.0))
    return 0.0 if abs(gamma) < 1e-12 else gamma


def _log_binomial_pmf(N: int, p: float) -> np.ndarray:
    j = np.arange(N + 1)
    return log_binomial_array(N, j) + xlogy(j, p) + xlogy(N - j, 1.0 - p)


def exact_success_qubits(N: int, p: float, k: int) -> float:
    """Optimal probability of raising the work register by ``k`` quanta.

    Within each total-energy shell j the best protocol moves
    min(C(N, j-k), C(N, j)) states of probability p^j (1-p)^(N-j).
    """
    if k < 0 or k > N:
        raise RangeError(f"k must lie in [0, {N}], got {k}")
    if k == 0:
        # identity protocol
        return 1.0
    j = np.arange(N + 1)
    log_all = log_binomial_array(N, j)
    log_moved = np.full(N + 1, LOG_ZERO)
    log_moved[k:] = np.minimum(log_binomial_array(N, j[k:] - k), log_all[k:])
    log_weight = xlogy(j, p) + xlogy(N - j, 1.0 - p)
    log_left = np.array([log_sub_exp(a, b) for a, b in zip(log_all, log_moved)])
    return complement_sum(log_moved + log_weight, log_left + log_weight)


def hoeffding_bound(N: int, p: float, k: int) -> Bound:
    """1 - exp(-N gamma^2 2 (p - 1/2)^2) with gamma recovered from k."""
    limit = N * (2.0 * p - 1.0)
    if limit <= 0 or k < 0 or k > limit + _FLOOR_EPS:
        raise RangeError(f"k={k} outside [0, N(2p-1)={limit}]")
    gamma = max(gamma_from_k(N, p, k), 0.0)
    return clamp_bound(-math.expm1(-N * gamma**2 * 2.0 * (p - 0.5) ** 2))


def relent_bound(N: int, p: float, k: int) -> Bound:
    """1 - exp(-N D(1/2 + k/2N || p)); requires 1/2 + k/2N < p."""
    x = 0.5 + k / (2.0 * N)
    if k < 0 or x >= p:
        raise RangeError(f"1/2 + k/2N = {x} must be below p = {p}")
    return clamp_bound(-math.expm1(-N * binary_relative_entropy(x, p)))


def _check_fraction(p: float, fraction: float, P0: float):
    if not 0.0 < P0 < 1.0:
        raise RangeError(f"P0 must lie in (0, 1), got {P0}")
    if not 0.0 <= fraction < 2.0 * p - 1.0:
        raise RangeError(f"fraction must lie in [0, 2p-1) = [0, {2 * p - 1}), got {fraction}")


def min_spins_bound(p: float, fraction: float, P0: float, method: str = "relative-entropy") -> int:
    """Smallest N for which the chosen analytic bound certifies success P0."""
    _check_fraction(p, fraction, P0)
    target = -math.log1p(-P0)
    if method == "relative-entropy":
        rate = binary_relative_entropy(0.5 + fraction / 2.0, p)
    elif method == "quadratic":
        gamma = 1.0 - fraction / (2.0 * p - 1.0)
        rate = gamma**2 * 2.0 * (p - 0.5) ** 2
    else:
        raise ValueError(f"unknown method {method!r}")
    return max(1, ceil_tol(target / rate))


def min_spins_exact(p: float, fraction: float, P0: float, n_max: int = 10**6) -> int:
    """Smallest N with exact success >= P0 at k = ceil(fraction * N).

    Rounding k up keeps the extracted work at or above fraction * N * nu;
    rounding down would let k = 0 succeed trivially at small N.  Scans
    linearly because k jitters with N, so success is not monotone in N.
    """
    _check_fraction(p, fraction, P0)
    for N in range(1, n_max + 1):
        k = ceil_tol(fraction * N)
        if k <= N and exact_success_qubits(N, p, k) >= P0:
            return N
    raise NoSolution(f"no N <= {n_max} reaches success {P0}")


def local_protocol_distribution(N: int, p: float, nu: float) -> WorkDistribution:
    """Work statistics of swapping each qubit into the register independently."""
    QubitEnsemble(p, nu, N)
    j = np.arange(N + 1)
    probs = np.exp(_log_binomial_pmf(N, p))
    return WorkDistribution(support=(2 * j - N) * float(nu), probs=probs / math.fsum(probs))
