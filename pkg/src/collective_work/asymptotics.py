"""gamma(N) schedules and minimal copy counts for bounds of the form 1 - d exp(-N gamma^2 c^2)."""
import math
from typing import NamedTuple

from .errors import RangeError
from .qubit_work import ceil_tol


class GammaSchedule(NamedTuple):
    gamma: float
    in_range: bool  # False when gamma leaves (0, 1): the asymptotic regime does not apply


def _schedule(gamma: float) -> GammaSchedule:
    return GammaSchedule(gamma, 0.0 < gamma < 1.0)


def gamma_logN_schedule(N: int, c: float) -> GammaSchedule:
    """gamma = sqrt(ln N / (c^2 N)); the bound then equals 1 - d/N."""
    if N < 2:
        raise RangeError(f"N must be >= 2, got {N}")
    if not c > 0:
        raise RangeError(f"c must be positive, got {c}")
    return _schedule(math.sqrt(math.log(N) / (c * c * N)))


def gamma_fixed_error(epsilon: float, d: int, c: float, N: int) -> GammaSchedule:
    """gamma = sqrt(ln(d/epsilon) / (c^2 N)), holding the failure bound at epsilon."""
    if not 0.0 < epsilon <= d:
        raise RangeError(f"epsilon must lie in (0, d], got {epsilon}")
    if N < 1 or not c > 0:
        raise RangeError("need N >= 1 and c > 0")
    return _schedule(math.sqrt(math.log(d / epsilon) / (c * c * N)))


def min_copies(epsilon: float, d: int, c: float, gamma: float) -> int:
    """Smallest N with ln(d/epsilon) / (gamma^2 c^2) <= N."""
    if not 0.0 < epsilon <= d:
        raise RangeError(f"epsilon must lie in (0, d], got {epsilon}")
    if not 0.0 < gamma < 1.0 or not c > 0:
        raise RangeError("need gamma in (0, 1) and c > 0")
    return max(1, ceil_tol(math.log(d / epsilon) / (gamma * gamma * c * c)))


def schedule_work_fraction(N: int, c: float) -> float:
    """w / (N W) = 1 - sqrt(ln N / N) / c along the logarithmic schedule."""
    return 1.0 - gamma_logN_schedule(N, c).gamma
