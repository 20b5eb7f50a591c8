"""Berry-Esseen route: (epsilon, delta) for independent records under the sum."""

import logging
import math
from dataclasses import dataclass

from .config import AccountingConfig, default_config
from .errors import InvariantError, NoUncertaintyError
from .model import BoundSource, DataVectorSpec, Diagnostic, PrivacyBound, make_bound

logger = logging.getLogger(__name__)


def gaussian_tail_delta(n: int) -> float:
    """The Gaussian-mechanism delta fixed at 4 / (5 sqrt(n))."""
    return 4.0 / (5.0 * math.sqrt(n))


def gaussian_epsilon(sensitivity: float, n: int, variance: float) -> float:
    """sqrt(Delta^2 ln(n) / variance), where variance is that of the whole sum."""
    if n < 2:
        raise InvariantError("n must be at least 2 so that ln(n) > 0", field="n")
    if variance <= 0:
        raise NoUncertaintyError("no adversarial uncertainty: use standard DP")
    return math.sqrt(sensitivity**2 * math.log(n) / variance)


def gaussian_mechanism_check(
    sigma: float, delta_param: float, sensitivity: float, epsilon: float
) -> bool:
    """True iff sigma * epsilon / Delta > sqrt(2 ln(1.25 / delta))."""
    return sigma * epsilon / sensitivity > math.sqrt(max(2.0 * math.log(1.25 / delta_param), 0.0))


def gaussian_hypothesis_diagnostics(
    sum_variance: float, delta_param: float, sensitivity: float, epsilon: float
) -> list[Diagnostic]:
    """Report when the (epsilon, delta_2) pairing misses the Gaussian-mechanism hypothesis."""
    sigma = math.sqrt(sum_variance)
    if gaussian_mechanism_check(sigma, delta_param, sensitivity, epsilon):
        return []
    return [
        Diagnostic(
            "gaussian-hypothesis",
            f"sigma*epsilon/Delta = {sigma * epsilon / sensitivity:.6g} does not exceed "
            f"sqrt(2 ln(1.25/delta_2)) = {math.sqrt(2.0 * math.log(1.25 / delta_param)):.6g}; "
            "the Gaussian-mechanism step is applied as stated",
        )
    ]


def berry_esseen_distance(
    sum_abs_third: float, sum_variance: float, constant: float = 0.56
) -> float:
    """Uniform CDF distance bound C * sum rho_i / (sum sigma_i^2)^(3/2)."""
    if sum_variance <= 0:
        raise NoUncertaintyError("no adversarial uncertainty: use standard DP")
    return constant * sum_abs_third / sum_variance**1.5


@dataclass(frozen=True)
class IndependentAggregate:
    """Sufficient statistics of independent records for the Berry-Esseen bound."""

    n: int
    mean_variance: float
    sum_abs_third: float
    sensitivity: float

    def __post_init__(self) -> None:
        if self.n < 2:
            raise InvariantError("n must be at least 2", field="n")
        if self.mean_variance <= 0:
            raise NoUncertaintyError("no adversarial uncertainty: use standard DP")
        if self.sum_abs_third < 0:
            raise InvariantError("must be non-negative", field="sum_abs_third")
        if self.sensitivity <= 0:
            raise InvariantError("must be positive", field="sensitivity")

    @property
    def sum_variance(self) -> float:
        return self.n * self.mean_variance

    @classmethod
    def from_spec(cls, spec: DataVectorSpec) -> "IndependentAggregate":
        if spec.dependency_bound != 1:
            raise InvariantError(
                "independent bound needs dependency_bound = 1", field="dependency_bound"
            )
        totals = spec.totals
        totals.require("abs_third")
        if totals.variance <= 0:
            raise NoUncertaintyError("no adversarial uncertainty: use standard DP")
        return cls(totals.n, totals.variance / totals.n, totals.abs_third, spec.sensitivity)


def independent_parameters(
    agg: IndependentAggregate,
    tail_n: int,
    source: BoundSource,
    config: AccountingConfig | None = None,
) -> PrivacyBound:
    """Shared body of the plain and compromised independent bounds."""
    config = config or default_config
    epsilon = gaussian_epsilon(agg.sensitivity, agg.n, agg.sum_variance)
    distance = berry_esseen_distance(
        agg.sum_abs_third, agg.sum_variance, config.berry_esseen_factor / 2.0
    )
    tail = gaussian_tail_delta(tail_n)
    delta = 2.0 * distance * (1.0 + math.exp(epsilon)) + tail
    logger.debug(
        "berry-esseen distance=%.6g epsilon=%.6g delta=%.6g", distance, epsilon, delta
    )
    diagnostics = gaussian_hypothesis_diagnostics(
        agg.sum_variance, tail, agg.sensitivity, epsilon
    )
    return make_bound(epsilon, delta, source, diagnostics, preconditions_ok=not diagnostics)


def independent_bound(
    agg: IndependentAggregate, config: AccountingConfig | None = None
) -> PrivacyBound:
    """(epsilon, delta)-NP of the sum of independent records.

    epsilon = sqrt(Delta^2 ln n / (n sigma^2)) and
    delta = 2C * sum rho_i / (n sigma^2)^(3/2) * (1 + e^epsilon) + 4 / (5 sqrt n),
    with 2C = ``config.berry_esseen_factor``.
    """
    return independent_parameters(agg, agg.n, BoundSource.INDEPENDENT, config)
