"""The privacy planning flowchart: which guarantee applies and what noise, if any, to add."""

import logging
from dataclasses import dataclass, replace
from enum import Enum

from .adversary import (
    CompromisePlan,
    compromise_plan,
    delta_adversarial_compromise,
    dependent_bound_compromised,
    independent_bound_compromised,
    worst_case_compromise,
)
from .bounds_independent import gaussian_tail_delta
from .config import AccountingConfig, default_config
from .errors import DeltaNotImprovableError, InvariantError, NoUncertaintyError
from .model import (
    AdversaryModel,
    BoundSource,
    DataVectorSpec,
    Diagnostic,
    PrivacyBound,
    make_bound,
)
from .synergy import NoiseFamily, NoisePlan, laplace_baseline_variance, plan_noise

logger = logging.getLogger(__name__)

EMPIRICAL_FIT = Diagnostic(
    "empirical-fit",
    "at least one record law is an empirical fit to data; the bound is an estimate, not a guarantee",
)


class ChosenPath(Enum):
    STANDARD_DP = "standard-dp"
    NOISELESS_INDEPENDENT = "noiseless-independent"
    NOISELESS_DEPENDENT = "noiseless-dependent"
    NOISE_AUGMENTED = "noiseless+noise"


@dataclass(frozen=True)
class TheoremResult:
    """A bound for the adversary's view together with the compromised set it assumed."""

    bound: PrivacyBound
    plan: CompromisePlan
    remaining_total_variance: float
    supplementary: PrivacyBound | None = None


def resolve_compromise(spec: DataVectorSpec, adversary: AdversaryModel) -> CompromisePlan:
    if adversary.compromised is not None:
        return compromise_plan(spec, adversary.gamma, adversary.compromised)
    return worst_case_compromise(spec, adversary.gamma)


def theorem_bound(
    spec: DataVectorSpec,
    adversary: AdversaryModel,
    remaining_total_variance: float | None = None,
    config: AccountingConfig | None = None,
    search_delta_adversary: bool = False,
    force_dependent: bool = False,
) -> TheoremResult:
    """The guarantee the flowchart picks for (spec, adversary), without noise.

    Independent data gets the Berry-Esseen bound, dependent data the Stein
    bound, both over the records the adversary does not know.
    ``force_dependent`` applies the Stein bound to independent data too.
    """
    config = config or default_config
    adversary.check_against(spec)
    plan = resolve_compromise(spec, adversary)
    supplementary = None
    independent = spec.dependency_bound == 1 and not force_dependent
    if independent:
        bound = independent_bound_compromised(spec, plan, config)
        remaining = plan.remaining_variance
        if search_delta_adversary and plan.selected:
            adversarial = delta_adversarial_compromise(spec, adversary.gamma, config)
            supplementary = independent_bound_compromised(spec, adversarial, config)
    else:
        if remaining_total_variance is None:
            if plan.selected:
                raise InvariantError(
                    "required when gamma > 0 and dependency_bound > 1",
                    field="remaining_total_variance",
                )
            remaining_total_variance = spec.total_variance
        bound = dependent_bound_compromised(spec, plan, remaining_total_variance, config)
        remaining = remaining_total_variance
    if not plan.selected:
        # With nothing compromised the compromised bounds are the plain ones.
        plain = BoundSource.INDEPENDENT if independent else BoundSource.DEPENDENT
        bound = replace(bound, source=plain)
    if spec.has_empirical:
        bound = bound.with_diagnostics(EMPIRICAL_FIT)
    return TheoremResult(bound, plan, remaining, supplementary)


@dataclass(frozen=True)
class PlanReport:
    chosen_path: ChosenPath
    bounds: PrivacyBound
    noise_plan: NoisePlan | None = None
    diagnostics: tuple[Diagnostic, ...] = ()
    baseline_laplace_variance: float | None = None
    compromised: tuple[int, ...] = ()
    supplementary: PrivacyBound | None = None

    def __post_init__(self) -> None:
        if (self.noise_plan is not None) != (self.chosen_path is ChosenPath.NOISE_AUGMENTED):
            raise InvariantError("a noise plan goes with the noiseless+noise path only")


def _standard_dp(
    sensitivity: float, target_epsilon: float | None, diagnostics: tuple[Diagnostic, ...] = ()
) -> PlanReport:
    if target_epsilon is None:
        raise InvariantError(
            "a target epsilon is required to size the Laplace mechanism", field="target.epsilon"
        )
    baseline = laplace_baseline_variance(sensitivity, target_epsilon)
    bound = PrivacyBound(target_epsilon, 0.0, BoundSource.LAPLACE)
    return PlanReport(
        ChosenPath.STANDARD_DP,
        bound,
        diagnostics=diagnostics,
        baseline_laplace_variance=baseline,
    )


def _noise_only(
    spec: DataVectorSpec,
    target_epsilon: float | None,
    noise_family: NoiseFamily,
    note: Diagnostic,
) -> PlanReport:
    """Deterministic data: the added noise carries all of the randomness."""
    if target_epsilon is None:
        raise InvariantError(
            "a target epsilon is required to size the noise for deterministic data",
            field="target.epsilon",
        )
    noise = plan_noise(spec.sensitivity, spec.n, 0.0, target_epsilon, noise_family)
    bound = make_bound(
        noise.resulting_epsilon,
        gaussian_tail_delta(spec.n),
        BoundSource.NOISE_AUGMENTED,
        (note,),
    )
    logger.info("no uncertainty in the data: noise variance %.6g", noise.noise_variance)
    return PlanReport(
        ChosenPath.NOISE_AUGMENTED,
        bound,
        noise_plan=noise,
        diagnostics=bound.diagnostics,
        baseline_laplace_variance=noise.baseline_laplace_variance,
    )


def plan(
    spec: DataVectorSpec | None,
    adversary: AdversaryModel,
    target_epsilon: float | None = None,
    target_delta: float | None = None,
    sensitivity: float | None = None,
    remaining_total_variance: float | None = None,
    noise_family: NoiseFamily = NoiseFamily.GENERIC,
    config: AccountingConfig | None = None,
) -> PlanReport:
    """Walk the flowchart.

    No assumptions about the data: plain Laplace. Otherwise take the
    theorem bound for the adversary, then add noise if the target epsilon is
    not met. Noise never improves delta, so a target delta below the theorem
    delta is an error.
    """
    config = config or default_config
    if target_epsilon is not None and not target_epsilon > 0:
        raise InvariantError("must be positive", field="target.epsilon")
    if spec is None:
        if sensitivity is None:
            raise InvariantError("required without records", field="sensitivity")
        logger.info("no distributional assumptions: standard differential privacy")
        return _standard_dp(sensitivity, target_epsilon)

    try:
        result = theorem_bound(
            spec, adversary, remaining_total_variance, config, search_delta_adversary=True
        )
    except NoUncertaintyError as exc:
        note = Diagnostic("no-uncertainty", str(exc))
        return _noise_only(spec, target_epsilon, noise_family, note)

    bound = result.bound
    path = (
        ChosenPath.NOISELESS_INDEPENDENT
        if spec.dependency_bound == 1
        else ChosenPath.NOISELESS_DEPENDENT
    )
    if target_delta is not None and target_delta < bound.delta:
        raise DeltaNotImprovableError(
            f"delta not improvable by noise in this tool: target {target_delta:.12g} "
            f"is below the theorem delta {bound.delta:.12g}"
        )

    extra: list[Diagnostic] = []
    if result.supplementary is not None:
        extra.append(
            Diagnostic(
                "delta-adversarial",
                f"supplementary: the compromised set maximizing delta gives "
                f"delta = {result.supplementary.delta:.12g}",
            )
        )
    noise = None
    if target_epsilon is not None and bound.epsilon > target_epsilon:
        noise = plan_noise(
            spec.sensitivity,
            result.plan.remaining_n,
            result.remaining_total_variance,
            target_epsilon,
            noise_family,
        )
        path = ChosenPath.NOISE_AUGMENTED
        bound = replace(bound, epsilon=noise.resulting_epsilon, source=BoundSource.NOISE_AUGMENTED)
        extra.append(
            Diagnostic("delta-unchanged", "added noise lowers epsilon only; delta is the theorem's")
        )
    logger.info("plan path: %s", path.value)
    return PlanReport(
        chosen_path=path,
        bounds=bound,
        noise_plan=noise,
        diagnostics=bound.diagnostics + tuple(extra),
        compromised=result.plan.selected,
        supplementary=result.supplementary,
    )
