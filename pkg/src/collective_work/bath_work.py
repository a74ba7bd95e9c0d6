"""Work extraction from N copies with access to a heat bath at inverse temperature beta.

The bath degeneracy g multiplies every capacity and divides every per-state
probability, so it is factored out: capacities are stored per unit g and
the last block of the greedy fill is taken fractionally.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import RangeError, SupportError
from .numerics import LOG_ZERO, complement_sum, composition_array, log_multinomial_rows, log_sub_exp, relative_entropy
from .qubit_work import Bound
from .qudit_work import BoundCoefficient, DiagonalState, exponential_bound, gibbs_state


@dataclass(frozen=True)
class BathSpec:
    beta: float

    def __post_init__(self):
        if not self.beta > 0:
            raise RangeError(f"beta must be positive, got {self.beta}")


@dataclass(frozen=True)
class BathBlock:
    composition: tuple
    log_capacity: float
    log_state_prob: float

    @property
    def log_total_prob(self) -> float:
        return self.log_capacity + self.log_state_prob


def _beta(beta) -> float:
    return BathSpec(float(beta.beta if isinstance(beta, BathSpec) else beta)).beta


def free_energy(rho: DiagonalState, beta: float) -> float:
    beta = _beta(beta)
    return rho.energy - rho.entropy / beta


def extractable_work_bath(rho: DiagonalState, beta: float) -> float:
    """F(rho) - F(gibbs), nonnegative."""
    beta = _beta(beta)
    th = gibbs_state(rho.energies, beta)
    return max(free_energy(rho, beta) - free_energy(th, beta), 0.0)


def log_partition(energies, beta: float) -> float:
    e = np.asarray(energies, dtype=float)
    e0 = e.min()
    return -beta * e0 + math.log(math.fsum(np.exp(-beta * (e - e0))))


def bath_bound_coefficient(rho: DiagonalState, beta: float) -> BoundCoefficient:
    """sqrt(2) beta W_th / (beta sum_i nu_i - sum_i ln p_i), ground level shifted to 0.

    ``alternate`` holds the same ratio without the sqrt(2) and ``delta_rate``
    the typical width per unit gamma (which equals it).
    """
    beta = _beta(beta)
    if np.any(rho.probs <= 0):
        raise SupportError("bath bound needs strictly positive populations")
    e = rho.energies - rho.energies.min()
    bw = beta * extractable_work_bath(rho, beta)
    den = beta * math.fsum(e) - math.fsum(np.log(rho.probs))
    ratio = bw / den
    return BoundCoefficient(
        math.sqrt(2.0) * ratio,
        "bath",
        degenerate=bw == 0.0,
        alternate=ratio,
        delta_rate=ratio,
    )


def bath_bound(rho: DiagonalState, beta: float, N: int, gamma: float) -> Bound:
    if not 0.0 <= gamma <= 1.0:
        raise RangeError(f"gamma must lie in [0, 1], got {gamma}")
    return exponential_bound(rho.d, N, gamma, bath_bound_coefficient(rho, beta).c)


def bath_block_arrays(rho: DiagonalState, beta: float, N: int, max_compositions=None):
    """(compositions, log capacity per g, log per-state probability times g), greedy order."""
    beta = _beta(beta)
    counts = composition_array(N, rho.d, max_compositions)
    energy = counts @ rho.energies
    with np.errstate(divide="ignore"):
        logp = np.log(rho.probs)
    log_prob = np.where(counts > 0, counts * logp, 0.0).sum(axis=1)
    log_cap = -beta * energy + log_multinomial_rows(N, counts)
    log_state = beta * energy + log_prob
    # descending per-state probability, ties to the lexicographically smaller composition
    keys = [counts[:, i] for i in range(rho.d - 1, -1, -1)]
    order = np.lexsort(keys + [-log_state])
    keep = order[np.isfinite(log_state[order])]
    return counts[keep], log_cap[keep], log_state[keep]


def bath_blocks(rho: DiagonalState, beta: float, N: int, max_compositions=None) -> list[BathBlock]:
    counts, log_cap, log_state = bath_block_arrays(rho, beta, N, max_compositions)
    return [BathBlock(tuple(int(x) for x in c), float(a), float(b)) for c, a, b in zip(counts, log_cap, log_state)]


def bath_exact_success(rho: DiagonalState, beta: float, N: int, w: float, max_compositions=None) -> float:
    """Optimal success of raising the register by ``w`` with bath assistance.

    The target holds e^{-beta w} Z^N states (per unit g); the most probable
    initial states fill it first.
    """
    beta = _beta(beta)
    if w < 0:
        raise RangeError(f"w must be nonnegative, got {w}")
    if w == 0:
        return 1.0
    _, log_cap, log_state = bath_block_arrays(rho, beta, N, max_compositions)
    remaining = -beta * w + N * log_partition(rho.energies, beta)
    moved, left = [], []
    for lc, ls in zip(log_cap, log_state):
        if remaining == LOG_ZERO:
            left.append(lc + ls)
        elif lc <= remaining:
            moved.append(lc + ls)
            remaining = log_sub_exp(remaining, lc)
        else:
            moved.append(remaining + ls)
            left.append(log_sub_exp(lc, remaining) + ls)
            remaining = LOG_ZERO
    return complement_sum(moved, left)


def thermal_relative_entropy(rho: DiagonalState, beta: float) -> float:
    return relative_entropy(rho.probs, gibbs_state(rho.energies, _beta(beta)).probs)
