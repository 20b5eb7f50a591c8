"""Stein-method route: (epsilon, delta) for locally dependent records."""

import logging
import math
from dataclasses import dataclass

from .bounds_independent import (
    gaussian_epsilon,
    gaussian_hypothesis_diagnostics,
    gaussian_tail_delta,
)
from .config import STEIN_K_SOURCED, STEIN_K_STATED, AccountingConfig, default_config
from .errors import InvariantError, NoUncertaintyError
from .model import BoundSource, DataVectorSpec, Diagnostic, PrivacyBound, make_bound

logger = logging.getLogger(__name__)

KOLMOGOROV_FACTOR = (2.0 / math.pi) ** 0.25


@dataclass(frozen=True)
class DependentAggregate:
    """Sufficient statistics for the Stein bound.

    ``total_variance`` is Var of the whole sum (not a per-record mean); a lower
    bound is acceptable and yields a larger, still valid epsilon.
    """

    n: int
    total_variance: float
    sum_abs_third: float
    sum_fourth: float
    dependency_bound: int
    sensitivity: float

    def __post_init__(self) -> None:
        if self.n < 2:
            raise InvariantError("n must be at least 2", field="n")
        if self.total_variance <= 0:
            raise NoUncertaintyError("no adversarial uncertainty: use standard DP")
        if self.dependency_bound < 1:
            raise InvariantError("must be at least 1", field="dependency_bound")
        if self.sum_abs_third < 0 or self.sum_fourth < 0:
            raise InvariantError("moment sums must be non-negative")
        if self.sensitivity <= 0:
            raise InvariantError("must be positive", field="sensitivity")

    @classmethod
    def from_spec(cls, spec: DataVectorSpec) -> "DependentAggregate":
        totals = spec.totals
        totals.require("abs_third", "fourth")
        return cls(
            n=totals.n,
            total_variance=spec.total_variance,
            sum_abs_third=totals.abs_third,
            sum_fourth=totals.fourth,
            dependency_bound=spec.dependency_bound,
            sensitivity=spec.sensitivity,
        )


def stein_wasserstein_bound(
    agg: DependentAggregate, stein_constant: float = STEIN_K_SOURCED
) -> float:
    """Wasserstein distance bound between the normalized sum and N(0, 1)."""
    sigma = math.sqrt(agg.total_variance)
    d = agg.dependency_bound
    return d**2 / sigma**3 * agg.sum_abs_third + d**1.5 * math.sqrt(
        stein_constant
    ) / (sigma**2 * math.sqrt(math.pi)) * math.sqrt(agg.sum_fourth)


def kolmogorov_from_wasserstein(dw: float) -> float:
    """d_K <= (2/pi)^(1/4) sqrt(d_W) against a standard normal."""
    if dw < 0:
        raise InvariantError("Wasserstein distance must be non-negative")
    return KOLMOGOROV_FACTOR * math.sqrt(dw)


def stein_factor(epsilon: float) -> float:
    """c(epsilon) = 2 (1 + e^epsilon) (2/pi)^(1/4)."""
    return 2.0 * (1.0 + math.exp(epsilon)) * KOLMOGOROV_FACTOR


def stein_constant_diagnostic(stein_constant: float) -> Diagnostic:
    other = STEIN_K_STATED if stein_constant == STEIN_K_SOURCED else STEIN_K_SOURCED
    return Diagnostic(
        "stein-constant",
        f"inner Stein constant K = {stein_constant:g}; the dependent-data statement "
        f"uses sqrt({STEIN_K_STATED}), the sourced Wasserstein bound sqrt({STEIN_K_SOURCED}) "
        f"(select {other} with --stein-k)",
    )


def dependent_parameters(
    agg: DependentAggregate,
    source: BoundSource,
    config: AccountingConfig | None = None,
) -> PrivacyBound:
    """Shared body of the plain and compromised dependent bounds."""
    config = config or default_config
    epsilon = gaussian_epsilon(agg.sensitivity, agg.n, agg.total_variance)
    dw = stein_wasserstein_bound(agg, config.stein_constant)
    tail = gaussian_tail_delta(agg.n)
    delta = stein_factor(epsilon) * math.sqrt(dw) + tail
    logger.debug("stein d_W=%.6g epsilon=%.6g delta=%.6g", dw, epsilon, delta)
    diagnostics = [stein_constant_diagnostic(config.stein_constant)]
    hypothesis = gaussian_hypothesis_diagnostics(
        agg.total_variance, tail, agg.sensitivity, epsilon
    )
    return make_bound(
        epsilon, delta, source, diagnostics + hypothesis, preconditions_ok=not hypothesis
    )


def dependent_bound(
    agg: DependentAggregate, config: AccountingConfig | None = None
) -> PrivacyBound:
    """(epsilon, delta)-NP of a locally dependent sum with neighbourhoods of size <= D.

    epsilon = sqrt(Delta^2 ln n / sigma^2) with sigma^2 = Var(sum), and
    delta = c(epsilon) sqrt(d_W bound) + 4 / (5 sqrt n).
    """
    return dependent_parameters(agg, BoundSource.DEPENDENT, config)
