"""Adversaries who know the exact values of a gamma-fraction of the records."""

import itertools
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .bounds_dependent import DependentAggregate, dependent_parameters
from .bounds_independent import IndependentAggregate, independent_parameters
from .config import AccountingConfig, default_config
from .errors import InsufficientMomentsError, InvariantError, NoUncertaintyError
from .model import (
    BoundSource,
    DataVectorSpec,
    Diagnostic,
    PrivacyBound,
    compromised_count,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CompromisePlan:
    """The compromised index set and the moments of what stays uncertain."""

    gamma: float
    selected: tuple[int, ...]
    remaining_n: int
    remaining_variance: float
    remaining_sum_abs_third: float | None
    remaining_sum_fourth: float | None

    def __post_init__(self) -> None:
        if self.remaining_n < 2:
            raise InvariantError("fewer than 2 uncompromised records", field="gamma")
        if self.remaining_variance <= 0:
            raise NoUncertaintyError(
                "no adversarial uncertainty: the uncompromised records are "
                "deterministic, so the model collapses to standard DP"
            )


def _plan(
    spec: DataVectorSpec, gamma: float, removed: Sequence[int], selected: Iterable[int]
) -> CompromisePlan:
    remaining = [r.count - k for r, k in zip(spec.records, removed)]
    totals = spec.partial_totals(remaining)
    return CompromisePlan(
        gamma=gamma,
        selected=tuple(sorted(selected)),
        remaining_n=totals.n,
        remaining_variance=totals.variance,
        remaining_sum_abs_third=totals.abs_third,
        remaining_sum_fourth=totals.fourth,
    )


def _indices_for(spec: DataVectorSpec, removed: Sequence[int]) -> list[int]:
    """Lowest indices of every group; records within a group are exchangeable."""
    return [
        index
        for start, k in zip(spec.offsets, removed)
        for index in range(start, start + k)
    ]


def _check_gamma(spec: DataVectorSpec, gamma: float) -> int:
    if not 0 <= gamma < 1:
        raise InvariantError("must lie in [0, 1)", field="gamma")
    size = compromised_count(gamma, spec.n)
    if size > spec.n - 2:
        raise InvariantError("fewer than 2 uncompromised records", field="gamma")
    return size


def compromise_plan(
    spec: DataVectorSpec, gamma: float, indices: Iterable[int]
) -> CompromisePlan:
    """Plan for an explicitly known compromised set."""
    size = _check_gamma(spec, gamma)
    indices = sorted(set(indices))
    if len(indices) > size:
        raise InvariantError(
            f"{len(indices)} indices exceed ceil(gamma*n) = {size}", field="compromised"
        )
    removed = [0] * len(spec.records)
    for index in indices:
        removed[spec.group_of(index)] += 1
    return _plan(spec, gamma, removed, indices)


def worst_case_compromise(spec: DataVectorSpec, gamma: float) -> CompromisePlan:
    """Compromise the ceil(gamma*n) records of greatest variance.

    Ties go to the larger third absolute moment, then to input order.
    """
    size = _check_gamma(spec, gamma)
    order = sorted(
        range(len(spec.records)),
        key=lambda g: (
            -spec.group_moments[g].variance,
            -(spec.group_moments[g].abs_third_central or 0.0),
            g,
        ),
    )
    removed = [0] * len(spec.records)
    left = size
    for g in order:
        if not left:
            break
        removed[g] = min(spec.records[g].count, left)
        left -= removed[g]
    return _plan(spec, gamma, removed, _indices_for(spec, removed))


def _tail_asymmetry(plan: CompromisePlan) -> list[Diagnostic]:
    if not plan.selected:
        return []
    return [
        Diagnostic(
            "tail-asymmetry",
            "the independent compromised bound keeps 4/(5 sqrt(n)) over all n records "
            "while the dependent one uses 4/(5 sqrt((1-gamma) n)); each is applied as stated",
        )
    ]


def independent_bound_compromised(
    spec: DataVectorSpec,
    plan: CompromisePlan,
    config: AccountingConfig | None = None,
) -> PrivacyBound:
    """Berry-Esseen bound over the uncompromised records only."""
    if spec.dependency_bound != 1:
        raise InvariantError(
            "independent bound needs dependency_bound = 1", field="dependency_bound"
        )
    if plan.remaining_sum_abs_third is None:
        raise InsufficientMomentsError("insufficient moments: abs_third required")
    agg = IndependentAggregate(
        plan.remaining_n,
        plan.remaining_variance / plan.remaining_n,
        plan.remaining_sum_abs_third,
        spec.sensitivity,
    )
    bound = independent_parameters(
        agg, spec.n, BoundSource.INDEPENDENT_COMPROMISED, config
    )
    return bound.with_diagnostics(*_tail_asymmetry(plan))


def dependent_bound_compromised(
    spec: DataVectorSpec,
    plan: CompromisePlan,
    remaining_total_variance: float,
    config: AccountingConfig | None = None,
) -> PrivacyBound:
    """Stein bound over the uncompromised records.

    ``remaining_total_variance`` is Var of the uncompromised sum; covariances
    are unknown to the tool, so it is always supplied by the caller.
    """
    missing = [
        name
        for name, value in (
            ("abs_third", plan.remaining_sum_abs_third),
            ("fourth", plan.remaining_sum_fourth),
        )
        if value is None
    ]
    if missing:
        raise InsufficientMomentsError(f"insufficient moments: {', '.join(missing)} required")
    agg = DependentAggregate(
        n=plan.remaining_n,
        total_variance=remaining_total_variance,
        sum_abs_third=plan.remaining_sum_abs_third,
        sum_fourth=plan.remaining_sum_fourth,
        dependency_bound=spec.dependency_bound,
        sensitivity=spec.sensitivity,
    )
    bound = dependent_parameters(agg, BoundSource.DEPENDENT_COMPROMISED, config)
    return bound.with_diagnostics(*_tail_asymmetry(plan))


def _removal_vectors(capacities: Sequence[int], size: int):
    for removed in itertools.product(*(range(c + 1) for c in capacities)):
        if sum(removed) == size:
            yield removed


def delta_adversarial_compromise(
    spec: DataVectorSpec,
    gamma: float,
    config: AccountingConfig | None = None,
) -> CompromisePlan:
    """The compromised set maximizing the independent compromised delta.

    Supplementary to the greatest-variance rule. Only per-group counts matter,
    so the search runs over count vectors: exhaustively up to
    ``config.exhaustive_search_limit`` records, greedily above. Ties keep the
    earliest candidate.
    """
    config = config or default_config
    size = _check_gamma(spec, gamma)
    capacities = [r.count for r in spec.records]

    def delta_of(removed: Sequence[int]) -> float:
        plan = _plan(spec, gamma, removed, ())
        return independent_bound_compromised(spec, plan, config).delta

    if spec.n <= config.exhaustive_search_limit:
        best, best_delta = None, -1.0
        for removed in _removal_vectors(capacities, size):
            try:
                delta = delta_of(removed)
            except NoUncertaintyError:
                continue
            if delta > best_delta:
                best, best_delta = removed, delta
        if best is None:
            raise NoUncertaintyError("every compromised set leaves no uncertainty")
        logger.info("exhaustive compromise search: delta=%.6g", best_delta)
    else:
        best = [0] * len(capacities)
        for _ in range(size):
            open_groups = [g for g, c in enumerate(capacities) if best[g] < c]
            scored = []
            for g in open_groups:
                trial = list(best)
                trial[g] += 1
                try:
                    scored.append((delta_of(trial), -g))
                except NoUncertaintyError:
                    continue
            if not scored:
                raise NoUncertaintyError("every compromised set leaves no uncertainty")
            best[-max(scored)[1]] += 1
        logger.info("greedy compromise search over %d groups", len(capacities))
    return _plan(spec, gamma, best, _indices_for(spec, best))
