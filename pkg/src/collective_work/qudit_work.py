"""Work extraction from N copies of a diagonal d-level state, no bath.

Covers ergotropy and passivity, entropy-matched thermal states (activation),
shift-vector protocols, the exact optimum over energy-conserving unitaries,
and the typical-subspace lower bound.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy.optimize import bisect

from .errors import (
    BracketFailure,
    IncommensurateSpectrum,
    OffLattice,
    RangeError,
    SupportError,
)
from .numerics import (
    LOG_ZERO,
    as_distribution,
    complement_sum,
    composition_array,
    log_multinomial_rows,
    log_sub_exp,
    log_sum_exp,
    relative_entropy,
    shannon_entropy,
)
from .qubit_work import Bound, clamp_bound, floor_tol

ENTROPY_TOL = 1e-10
LATTICE_TOL = 1e-9
MAX_QUANTA = 10**6


@dataclass(frozen=True, eq=False)
class DiagonalState:
    """Populations and level energies of a single copy, sorted by energy."""

    probs: np.ndarray
    energies: np.ndarray

    def __post_init__(self):
        p = as_distribution(self.probs)
        e = np.asarray(self.energies, dtype=float)
        if e.shape != p.shape:
            raise ValueError("probs and energies must have equal length")
        if p.size < 2:
            raise ValueError("a state needs at least two levels")
        if not np.all(np.isfinite(e)):
            raise ValueError("energies must be finite")
        order = np.argsort(e, kind="stable")
        p, e = p[order], e[order]
        p.setflags(write=False)
        e.setflags(write=False)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "energies", e)

    @property
    def d(self) -> int:
        return self.probs.size

    @property
    def energy(self) -> float:
        return math.fsum(self.probs * self.energies)

    @property
    def entropy(self) -> float:
        return shannon_entropy(self.probs)

    def with_probs(self, probs) -> "DiagonalState":
        return DiagonalState(np.asarray(probs, dtype=float), self.energies)

    def allclose(self, other: "DiagonalState", atol: float = 1e-12) -> bool:
        return (
            self.d == other.d
            and np.allclose(self.probs, other.probs, atol=atol, rtol=0)
            and np.allclose(self.energies, other.energies, atol=atol, rtol=0)
        )

    def __repr__(self):
        return f"DiagonalState(probs={self.probs.tolist()}, energies={self.energies.tolist()})"


def qubit_state(p: float, nu: float = 1.0) -> DiagonalState:
    return DiagonalState(np.array([1.0 - p, p]), np.array([0.0, nu]))


def gibbs_state(energies, beta: float) -> DiagonalState:
    e = np.asarray(energies, dtype=float)
    w = np.exp(-beta * (e - e.min()))
    return DiagonalState(w / math.fsum(w), e)


# --- passivity and activation -------------------------------------------


def passive_state(rho: DiagonalState) -> DiagonalState:
    return rho.with_probs(np.sort(rho.probs)[::-1])


def ergotropy(rho: DiagonalState) -> float:
    pas = passive_state(rho)
    return max(math.fsum((rho.probs - pas.probs) * rho.energies), 0.0)


class ThermalMatch(NamedTuple):
    beta: float
    state: DiagonalState
    limit: str | None  # "pure", "maximally-mixed" or None


def _gibbs_entropy(energies: np.ndarray, beta: float) -> float:
    x = -beta * (energies - energies.min())
    w = np.exp(x)
    z = math.fsum(w)
    return math.log(z) - math.fsum(w * x) / z


def entropy_matched_thermal(rho: DiagonalState) -> ThermalMatch:
    """Gibbs state on the same spectrum with the same entropy as ``rho`` (beta >= 0)."""
    e = rho.energies
    s = rho.entropy
    d = rho.d
    if abs(s - math.log(d)) <= ENTROPY_TOL:
        return ThermalMatch(0.0, rho.with_probs(np.full(d, 1.0 / d)), "maximally-mixed")
    ground = np.isclose(e, e[0], rtol=0, atol=LATTICE_TOL)
    s_inf = math.log(int(ground.sum()))
    if abs(s - s_inf) <= ENTROPY_TOL:
        return ThermalMatch(math.inf, rho.with_probs(ground / ground.sum()), "pure")
    if s > math.log(d) or s < s_inf:
        raise BracketFailure(f"no beta >= 0 reproduces entropy {s}")
    f = lambda b: _gibbs_entropy(e, b) - s
    hi = 1.0
    while f(hi) > 0:
        hi *= 2.0
        if hi > 1e12:
            raise BracketFailure("failed to bracket beta")
    beta = bisect(f, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=2000)
    return ThermalMatch(beta, gibbs_state(e, beta), None)


def global_ergotropy_rate(rho: DiagonalState) -> float:
    th = entropy_matched_thermal(rho).state
    return math.fsum((rho.probs - th.probs) * rho.energies)


def reference_state(rho: DiagonalState, mode: str) -> DiagonalState:
    if mode == "passive":
        return passive_state(rho)
    if mode == "thermal":
        return entropy_matched_thermal(rho).state
    raise ValueError(f"mode must be 'passive' or 'thermal', got {mode!r}")


# --- shift-vector protocols ------------------------------------------------


@dataclass(frozen=True)
class ShiftVector:
    k: tuple
    work: float
    gamma: float

    def __post_init__(self):
        if sum(self.k) != 0:
            raise ValueError(f"shift components must sum to zero, got {self.k}")


def shift_vector(rho: DiagonalState, N: int, gamma: float, mode: str = "passive") -> ShiftVector:
    """k_i = floor(N (1 - gamma)(p_i - ref_i)), repaired to sum to zero.

    The repair adds one unit to the components with the largest fractional
    remainders (ties to the lowest level index).
    """
    if not 0.0 <= gamma <= 1.0:
        raise RangeError(f"gamma must lie in [0, 1], got {gamma}")
    if N < 1:
        raise RangeError("N must be >= 1")
    ref = reference_state(rho, mode)
    raw = N * (1.0 - gamma) * (rho.probs - ref.probs)
    k = [floor_tol(x) for x in raw]
    deficit = -sum(k)
    remainders = [x - ki for x, ki in zip(raw, k)]
    for i in sorted(range(rho.d), key=lambda i: (-remainders[i], i))[:deficit]:
        k[i] += 1
    work = math.fsum(ki * e for ki, e in zip(k, rho.energies))
    return ShiftVector(tuple(k), work, gamma)


@dataclass(frozen=True, eq=False)
class _Compositions:
    counts: np.ndarray
    log_mult: np.ndarray
    log_prob: np.ndarray


def _composition_table(rho: DiagonalState, N: int, max_compositions=None) -> _Compositions:
    counts = composition_array(N, rho.d, max_compositions)
    with np.errstate(divide="ignore"):
        logp = np.log(rho.probs)
    # 0 * log 0 = 0
    terms = np.where(counts > 0, counts * logp, 0.0)
    return _Compositions(counts, log_multinomial_rows(N, counts), terms.sum(axis=1))


def protocol_success(rho: DiagonalState, N: int, shift: ShiftVector, max_compositions=None) -> float:
    """Success of the protocol sending composition n to n - k, sum of min counts."""
    k = np.asarray(shift.k, dtype=np.int64)
    if k.size != rho.d:
        raise ValueError("shift length does not match the state dimension")
    tab = _composition_table(rho, N, max_compositions)
    shifted = log_multinomial_rows(N, tab.counts - k)
    terms = np.minimum(tab.log_mult, shifted) + tab.log_prob
    return min(math.fsum(np.exp(terms[np.isfinite(terms)])), 1.0)


# --- exact optimum -------------------------------------------------------


def integer_spectrum(energies, base_quantum: float | None = None) -> tuple[float, np.ndarray]:
    """Express energies as integer multiples of a base quantum.

    The quantum is inferred as the gcd of rational approximations when not
    supplied.  Returns ``(quantum, integer_levels)``.
    """
    e = np.asarray(energies, dtype=float)
    if base_quantum is None:
        fracs = [Fraction(x).limit_denominator(10**9) for x in e]
        if any(abs(float(f) - x) > LATTICE_TOL * max(1.0, abs(x)) for f, x in zip(fracs, e)):
            raise IncommensurateSpectrum(f"energies {e.tolist()} are not rational at 1e-9")
        den = math.lcm(*(f.denominator for f in fracs))
        nums = [int(f * den) for f in fracs]
        g = math.gcd(*nums)
        if g == 0:
            return 1.0, np.zeros(e.size, dtype=np.int64)
        base_quantum = g / den
    if not base_quantum > 0:
        raise ValueError("base quantum must be positive")
    q = e / base_quantum
    ints = np.rint(q)
    if np.any(np.abs(q - ints) > LATTICE_TOL * np.maximum(1.0, np.abs(q))) or np.abs(ints).max() > MAX_QUANTA:
        raise IncommensurateSpectrum(f"energies {e.tolist()} are incommensurate with quantum {base_quantum}")
    return float(base_quantum), ints.astype(np.int64)


@dataclass(eq=False)
class IsolatedOptimizer:
    """Exact optimal success over energy-conserving protocols for fixed (rho, N).

    Blocks of compositions sharing a total energy are precomputed once, so
    many work values can be queried cheaply.
    """

    rho: DiagonalState
    N: int
    base_quantum: float | None = None
    max_compositions: int | None = None
    _shells: dict = field(init=False, repr=False)
    _shell_log_count: dict = field(init=False, repr=False)

    def __post_init__(self):
        self.base_quantum, levels = integer_spectrum(self.rho.energies, self.base_quantum)
        tab = _composition_table(self.rho, self.N, self.max_compositions)
        shell_energy = tab.counts @ levels
        shells: dict = {}
        for idx in range(tab.counts.shape[0]):
            shells.setdefault(int(shell_energy[idx]), []).append(idx)
        self._shells = {}
        self._shell_log_count = {}
        for E, rows in shells.items():
            rows = np.asarray(rows)
            # descending per-state probability, ties to the lexicographically smaller composition
            keys = [tuple(tab.counts[r]) for r in rows]
            order = sorted(range(rows.size), key=lambda i: (-tab.log_prob[rows[i]], keys[i]))
            rows = rows[order]
            self._shells[E] = (tab.log_prob[rows], tab.log_mult[rows])
            self._shell_log_count[E] = log_sum_exp(tab.log_mult[rows])

    def lattice(self) -> np.ndarray:
        """All achievable work values sum_i (n_i - m_i) nu_i, ascending, in energy units."""
        es = np.array(sorted(self._shells))
        diffs = np.unique(es[:, None] - es[None, :])
        return diffs * self.base_quantum

    def _quanta(self, w: float) -> int:
        q = w / self.base_quantum
        qi = round(q)
        if abs(q - qi) > LATTICE_TOL * max(1.0, abs(q)):
            raise OffLattice(f"w={w} is not a multiple of the quantum {self.base_quantum}")
        return int(qi)

    def success(self, w: float) -> float:
        wq = self._quanta(w)
        reachable = False
        moved, left = [], []
        for E, (log_p, log_c) in self._shells.items():
            cap = self._shell_log_count.get(E - wq)
            if cap is None:
                left.extend(log_p + log_c)
                continue
            reachable = True
            for lp, lc in zip(log_p, log_c):
                if cap == LOG_ZERO:
                    left.append(lp + lc)
                elif lc <= cap:
                    moved.append(lp + lc)
                    cap = log_sub_exp(cap, lc)
                else:
                    moved.append(lp + cap)
                    left.append(lp + log_sub_exp(lc, cap))
                    cap = LOG_ZERO
        if not reachable:
            raise OffLattice(f"w={w} is not an achievable work value for N={self.N}")
        if wq == 0:
            # every shell has capacity equal to its own population count
            return 1.0
        return complement_sum(moved, left)


def exact_isolated_success(rho: DiagonalState, N: int, w: float, base_quantum=None, max_compositions=None) -> float:
    return IsolatedOptimizer(rho, N, base_quantum, max_compositions).success(w)


# --- typical-subspace bound ---------------------------------------------


@dataclass(frozen=True)
class BoundCoefficient:
    c: float
    mode: str
    correction_order: str = "leading"
    degenerate: bool = False
    alternate: float | None = None  # bath mode: value without the sqrt(2)
    delta_rate: float | None = None  # bath mode: typical width per unit gamma


def bound_coefficient(rho: DiagonalState, mode: str = "passive", N: int | None = None) -> BoundCoefficient:
    """Exponent rate c of the bound 1 - d exp(-N gamma^2 c^2).

    With ``N`` given, numerator and denominator carry their 1/N corrections.
    """
    order = "leading" if N is None else "with-1/N"
    if np.any(rho.probs <= 0):
        raise SupportError("bound coefficient needs strictly positive populations")
    ref = reference_state(rho, mode)
    if ref.allclose(rho, atol=1e-14):
        return BoundCoefficient(0.0, mode, order, degenerate=True)
    p, r = rho.probs, ref.probs
    num = relative_entropy(r, p)
    h = np.sort(r / p)[::-1]
    term = np.log(h)
    if N is not None:
        num += math.fsum((p - r) / r) / (2.0 * N)
        term = term + (h - 1.0) / h / N
    d = rho.d
    top = term[: d // 2]
    bottom = term[(d + 1) // 2 :]
    den = math.fsum(top) - math.fsum(bottom)
    if not den > 0:
        return BoundCoefficient(0.0, mode, order, degenerate=True)
    return BoundCoefficient(math.sqrt(2.0) * num / den, mode, order)


def exponential_bound(d: int, N: int, gamma: float, c: float) -> Bound:
    return clamp_bound(1.0 - d * math.exp(-N * gamma**2 * c**2))


def isolated_bound(rho: DiagonalState, N: int, gamma: float, mode: str = "passive", corrected: bool = False) -> Bound:
    if not 0.0 <= gamma <= 1.0:
        raise RangeError(f"gamma must lie in [0, 1], got {gamma}")
    coef = bound_coefficient(rho, mode, N if corrected else None)
    return exponential_bound(rho.d, N, gamma, coef.c)
