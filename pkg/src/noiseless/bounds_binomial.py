"""Bounds for i.i.d. Bernoulli data under the sum mechanism."""

import logging
import math
from dataclasses import dataclass

from .errors import InvariantError, PreconditionError
from .model import BoundSource, DataVectorSpec, Diagnostic, Family, PrivacyBound, make_bound

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BinomialCase:
    """n i.i.d. Bernoulli(p) records; their sum is Bin(n, p)."""

    n: int
    p: float

    def __post_init__(self) -> None:
        if self.n < 2:
            raise InvariantError("n must be at least 2", field="n")
        if not 0 < self.p < 1:
            raise InvariantError("p must lie in (0, 1)", field="p")

    @property
    def minority(self) -> float:
        """min(p, 1 - p); every formula is written for the smaller tail."""
        return min(self.p, 1.0 - self.p)

    @classmethod
    def from_spec(cls, spec: DataVectorSpec) -> "BinomialCase":
        probabilities = {r.p for r in spec.records if r.family is Family.BERNOULLI}
        if len(probabilities) != 1 or any(
            r.family is not Family.BERNOULLI for r in spec.records
        ):
            raise InvariantError(
                "binomial model needs every record to be bernoulli with one shared p",
                field="records",
            )
        if spec.dependency_bound != 1:
            raise InvariantError("binomial model needs independent records", field="dependency_bound")
        return cls(spec.n, probabilities.pop())


def chernoff_tail(n: int, p: float, lam: float) -> float:
    """Upper bound 2 exp(-2 lambda^2 / n) on P(|Bin(n, p) - np| >= lambda).

    The bound does not depend on p.
    """
    return 2.0 * math.exp(-2.0 * lam**2 / n)


def _window_epsilon(ratio: float, q: float) -> float:
    return ratio * (1.0 / (1.0 - q) + 1.0 / (q - ratio))


def lemma1_ratio_eps(n: int, p: float, lam: float) -> float:
    """Bound on |ln P(X=u)/P(X=u+-1)| for X ~ Bin(n, p), u in [np-lambda, np+lambda]."""
    if lam <= 0:
        raise InvariantError("lambda must be positive", field="lambda")
    if not (n * p - lam > 0 and n * p + lam < n):
        raise InvariantError(
            f"window [np - lambda, np + lambda] = [{n * p - lam:.6g}, {n * p + lam:.6g}] "
            f"must lie strictly inside (0, {n})",
            field="lambda",
        )
    return _window_epsilon(lam / n, min(p, 1.0 - p))


def minimal_admissible_delta(case: BinomialCase) -> float:
    """Smallest delta for which the epsilon-given-delta route applies."""
    n, p, q = case.n, case.p, case.minority
    boundary_mass = (1.0 - p) ** n + p**n
    return max(boundary_mass, chernoff_tail(n, p, n * q))


def binomial_eps_given_delta(case: BinomialCase, delta: float) -> PrivacyBound:
    """Epsilon for a fixed delta, via the Chernoff window and the pmf-ratio lemma."""
    n, p, q = case.n, case.p, case.minority
    if not 0 < delta < 2:
        raise InvariantError("delta must lie in (0, 2)", field="delta")
    ratio = math.sqrt(math.log(2.0 / delta) / (2.0 * n))
    boundary_mass = (1.0 - p) ** n + p**n
    if delta < boundary_mass or ratio >= q:
        minimal = minimal_admissible_delta(case)
        raise PreconditionError(
            f"tail dominates: delta too small for this (n={n}, p={p}); "
            f"delta must exceed {minimal:.12g}",
            minimal_delta=minimal,
        )
    epsilon = _window_epsilon(ratio, q)
    logger.debug("binomial window lambda/n=%.6g, epsilon=%.6g", ratio, epsilon)
    window = Diagnostic(
        "lemma-window",
        f"lambda/n = {ratio:.6g} < min(p, 1-p) = {q:.6g} (required for the ratio lemma)",
    )
    return make_bound(epsilon, delta, BoundSource.BINOMIAL, [window])


def binomial_delta_given_eps(case: BinomialCase, epsilon: float) -> PrivacyBound:
    """Delta for a fixed epsilon: Chernoff mass outside the window where the ratio holds."""
    if not epsilon > 0:
        raise InvariantError("epsilon must be positive", field="epsilon")
    n, q = case.n, case.minority
    growth = math.exp(epsilon)
    shrink = (growth - 1.0) / (growth + q / (1.0 - q))
    delta = 2.0 * math.exp(-2.0 * n * q**2 * shrink**2)
    return make_bound(epsilon, delta, BoundSource.BINOMIAL)
