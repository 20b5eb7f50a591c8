"""Combining the data's own randomness with added noise."""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from .bounds_independent import gaussian_epsilon
from .errors import InvariantError, NoUncertaintyError

logger = logging.getLogger(__name__)


class NoiseFamily(Enum):
    GENERIC = "generic-unbiased"
    LAPLACE = "laplace"


class Regime(Enum):
    """Where a data size falls for a target epsilon.

    STANDARD_DP: the noise needed is at least the plain Laplace mechanism's.
    SYNERGY: some noise is needed, strictly less than the Laplace baseline.
    NOISELESS: the data alone reaches the target.
    """

    STANDARD_DP = "standard-dp"
    SYNERGY = "synergy"
    NOISELESS = "noiseless"


def eps_with_noise(
    sensitivity: float, n: int, total_variance: float, noise_variance: float
) -> float:
    """Epsilon of the sum after adding zero-mean noise of variance ``noise_variance``."""
    if noise_variance < 0:
        raise InvariantError("must be non-negative", field="noise_variance")
    if total_variance + noise_variance <= 0:
        raise NoUncertaintyError("no randomness at all: data and noise are both deterministic")
    return gaussian_epsilon(sensitivity, n, total_variance + noise_variance)


def required_noise_variance(
    sensitivity: float, n: int, total_variance: float, target_epsilon: float
) -> float:
    """Smallest noise variance reaching ``target_epsilon``; 0 when the data suffices."""
    if not target_epsilon > 0:
        raise InvariantError("must be positive", field="target_epsilon")
    if n < 2:
        raise InvariantError("n must be at least 2 so that ln(n) > 0", field="n")
    if total_variance > 0:
        if gaussian_epsilon(sensitivity, n, total_variance) <= target_epsilon:
            return 0.0
    budget = sensitivity**2 * math.log(n)
    return max((budget - target_epsilon**2 * total_variance) / target_epsilon**2, 0.0)


def eps_with_laplace(eps_data: float, eps_lap: float, n: int) -> float:
    """Epsilon when Lap(Delta / eps_lap) noise is added to data with epsilon ``eps_data``."""
    if not (eps_data > 0 and eps_lap > 0):
        raise InvariantError("both epsilons must be positive")
    if n < 2:
        raise InvariantError("n must be at least 2 so that ln(n) > 0", field="n")
    log_n = math.log(n)
    return math.sqrt(
        eps_data**2 * eps_lap**2 * log_n / (2.0 * eps_data**2 + eps_lap**2 * log_n)
    )


def laplace_baseline_variance(sensitivity: float, epsilon: float) -> float:
    """Variance 2 Delta^2 / epsilon^2 of the plain Laplace mechanism."""
    if not epsilon > 0:
        raise InvariantError("must be positive", field="epsilon")
    return 2.0 * sensitivity**2 / epsilon**2


@dataclass(frozen=True)
class NoisePlan:
    noise_variance: float
    noise_family: NoiseFamily
    resulting_epsilon: float
    baseline_laplace_variance: float
    regime: Regime
    laplace_scale: float | None = None

    def __post_init__(self) -> None:
        if self.noise_variance < 0:
            raise InvariantError("must be non-negative", field="noise_variance")
        if not self.resulting_epsilon > 0:
            raise InvariantError("must be positive", field="resulting_epsilon")
        if self.noise_family is NoiseFamily.LAPLACE:
            if self.laplace_scale is None or not math.isclose(
                2.0 * self.laplace_scale**2, self.noise_variance, rel_tol=1e-12, abs_tol=0.0
            ):
                raise InvariantError(
                    "laplace noise variance must equal 2 b^2", field="laplace_scale"
                )


def classify_regime(noise_variance: float, baseline: float) -> Regime:
    if noise_variance == 0:
        return Regime.NOISELESS
    if noise_variance < baseline:
        return Regime.SYNERGY
    return Regime.STANDARD_DP


def plan_noise(
    sensitivity: float,
    n: int,
    total_variance: float,
    target_epsilon: float,
    family: NoiseFamily = NoiseFamily.GENERIC,
) -> NoisePlan:
    """Noise to add so the sum reaches ``target_epsilon``.

    Only epsilon moves; delta stays that of the underlying bound.
    """
    variance = required_noise_variance(sensitivity, n, total_variance, target_epsilon)
    baseline = laplace_baseline_variance(sensitivity, target_epsilon)
    scale = math.sqrt(variance / 2.0) if family is NoiseFamily.LAPLACE else None
    if family is NoiseFamily.LAPLACE:
        variance = 2.0 * scale**2
    plan = NoisePlan(
        noise_variance=variance,
        noise_family=family,
        resulting_epsilon=eps_with_noise(sensitivity, n, total_variance, variance),
        baseline_laplace_variance=baseline,
        regime=classify_regime(variance, baseline),
        laplace_scale=scale,
    )
    logger.info(
        "noise plan: variance=%.6g baseline=%.6g regime=%s",
        plan.noise_variance,
        baseline,
        plan.regime.value,
    )
    return plan


@dataclass(frozen=True)
class RegimeBoundaries:
    """Data sizes where the needed noise drops below the baseline, then to zero."""

    synergy_from: float | None
    noiseless_from: float | None


def _first_crossing(
    g: Callable[[float], float], grid: np.ndarray
) -> float | None:
    values = np.array([g(float(x)) for x in grid])
    positive = values > 0
    changes = np.flatnonzero(positive[:-1] & ~positive[1:])
    if changes.size == 0:
        return None
    k = int(changes[0])
    return float(brentq(g, grid[k], grid[k + 1], xtol=1e-9, rtol=1e-12))


def regime_boundaries(
    sensitivity: float,
    target_epsilon: float,
    variance_of_n: Callable[[float], float],
    n_min: float,
    n_max: float,
    grid_points: int = 512,
) -> RegimeBoundaries:
    """Locate both regime crossovers over [n_min, n_max] for a variance profile.

    n is treated as continuous; each boundary is the first point where the
    corresponding gap turns from positive to non-positive.
    """
    if not 2 <= n_min < n_max:
        raise InvariantError("need 2 <= n_min < n_max", field="n_range")
    baseline = laplace_baseline_variance(sensitivity, target_epsilon)
    eps2 = target_epsilon**2

    def noise_gap(n: float) -> float:
        needed = (sensitivity**2 * math.log(n) - eps2 * variance_of_n(n)) / eps2
        return needed - baseline

    def data_gap(n: float) -> float:
        return sensitivity**2 * math.log(n) - eps2 * variance_of_n(n)

    grid = np.geomspace(n_min, n_max, grid_points)
    bounds = RegimeBoundaries(_first_crossing(noise_gap, grid), _first_crossing(data_gap, grid))
    logger.info(
        "regime boundaries: synergy from n=%s, noiseless from n=%s",
        bounds.synergy_from,
        bounds.noiseless_from,
    )
    return bounds
