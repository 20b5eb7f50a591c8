"""Tests for the privacy planning flowchart."""

import math

import pytest

from noiseless.errors import DeltaNotImprovableError, InvariantError
from noiseless.model import AdversaryModel, BoundSource, DataVectorSpec, DistributionSpec
from noiseless.planner import ChosenPath, PlanReport, plan, theorem_bound
from noiseless.synergy import NoiseFamily, Regime

from .fixtures import example_profile


class TestTheoremBound:
    """Test bound selection without noise."""

    def test_independent(self, profile_spec):
        """D = 1 picks the Berry-Esseen bound."""
        result = theorem_bound(profile_spec, AdversaryModel())
        assert result.bound.source is BoundSource.INDEPENDENT
        assert result.bound.epsilon == pytest.approx(0.45523, abs=1e-5)
        assert result.plan.selected == ()

    def test_dependent(self, block_spec):
        """D > 1 picks the Stein bound."""
        result = theorem_bound(block_spec, AdversaryModel(dependency_bound=2))
        assert result.bound.source is BoundSource.DEPENDENT
        assert result.remaining_total_variance == pytest.approx(9.6)

    def test_forced_dependent(self, fair_bits):
        """The Stein bound can be applied to independent data."""
        result = theorem_bound(fair_bits, AdversaryModel(), force_dependent=True)
        assert result.bound.source is BoundSource.DEPENDENT
        assert result.bound.epsilon == pytest.approx(math.sqrt(math.log(400) / 100))

    def test_compromised(self, profile_spec):
        """gamma > 0 uses the compromised bound."""
        result = theorem_bound(profile_spec, AdversaryModel(gamma=0.5))
        assert result.bound.source is BoundSource.INDEPENDENT_COMPROMISED
        assert result.plan.remaining_n == 5000

    def test_dependent_compromised_needs_variance(self, block_spec):
        """The remaining variance of dependent data must be supplied."""
        with pytest.raises(InvariantError, match="remaining_total_variance"):
            theorem_bound(block_spec, AdversaryModel(dependency_bound=2, gamma=0.25))

    def test_dependent_compromised(self, block_spec):
        """With the remaining variance the Stein bound covers the unknown records."""
        result = theorem_bound(block_spec, AdversaryModel(dependency_bound=2, gamma=0.25), 7.0)
        assert result.bound.source is BoundSource.DEPENDENT_COMPROMISED
        assert result.plan.remaining_n == 18

    def test_supplementary_search(self):
        """The delta-maximizing set is reported on request."""
        spec = DataVectorSpec(
            records=(
                DistributionSpec.bernoulli(0.5, count=8),
                DistributionSpec.bernoulli(0.1, count=8),
            )
        )
        result = theorem_bound(spec, AdversaryModel(gamma=0.25), search_delta_adversary=True)
        assert result.supplementary is not None
        assert result.supplementary.delta >= result.bound.delta

    def test_empirical_flagged(self):
        """Empirical fits carry a diagnostic."""
        spec = DataVectorSpec(records=(DistributionSpec.from_values([0, 1, 1, 2], count=500),))
        result = theorem_bound(spec, AdversaryModel())
        assert any(d.code == "empirical-fit" for d in result.bound.diagnostics)


class TestPlan:
    """Test the flowchart outcomes."""

    def test_no_assumptions(self):
        """No records: the Laplace mechanism."""
        report = plan(None, AdversaryModel(), target_epsilon=1.0, sensitivity=1.0)
        assert report.chosen_path is ChosenPath.STANDARD_DP
        assert report.baseline_laplace_variance == pytest.approx(2.0)
        assert report.bounds.delta == 0.0
        assert report.noise_plan is None

    def test_no_assumptions_needs_target(self):
        """The Laplace scale needs a target epsilon."""
        with pytest.raises(InvariantError, match="target.epsilon"):
            plan(None, AdversaryModel(), sensitivity=1.0)

    def test_noiseless_enough(self, profile_spec):
        """The profile at 10^4 records meets (0.5, 0.05) without noise."""
        report = plan(profile_spec, AdversaryModel(), target_epsilon=0.5, target_delta=0.05)
        assert report.chosen_path is ChosenPath.NOISELESS_INDEPENDENT
        assert report.noise_plan is None
        assert report.bounds.epsilon < 0.5

    def test_noise_needed(self):
        """At 10^3 records noise closes the gap to epsilon = 0.5."""
        report = plan(example_profile(1000), AdversaryModel(), target_epsilon=0.5)
        assert report.chosen_path is ChosenPath.NOISE_AUGMENTED
        noise = report.noise_plan
        assert noise.noise_variance == pytest.approx((900 * math.log(1000) - 1000) / 0.25)
        assert noise.noise_variance == pytest.approx(20_868, abs=1)
        assert noise.regime is Regime.STANDARD_DP
        assert report.bounds.epsilon == pytest.approx(0.5)
        assert report.bounds.source is BoundSource.NOISE_AUGMENTED
        assert any(d.code == "delta-unchanged" for d in report.diagnostics)

    def test_laplace_noise(self):
        """A Laplace plan reports its scale."""
        report = plan(
            example_profile(1000),
            AdversaryModel(),
            target_epsilon=0.5,
            noise_family=NoiseFamily.LAPLACE,
        )
        assert report.noise_plan.laplace_scale == pytest.approx(
            math.sqrt(report.noise_plan.noise_variance / 2)
        )

    def test_delta_not_improvable(self):
        """A target delta below the theorem's cannot be reached by noise."""
        with pytest.raises(DeltaNotImprovableError, match="not improvable"):
            plan(example_profile(1000), AdversaryModel(), target_epsilon=0.5, target_delta=0.05)

    def test_dependent_path(self, block_spec):
        """Dependent data without a target stays noiseless."""
        report = plan(block_spec, AdversaryModel(dependency_bound=2))
        assert report.chosen_path is ChosenPath.NOISELESS_DEPENDENT

    def test_deterministic_data(self):
        """Fully known data goes to the noise branch with all of the variance from noise."""
        spec = DataVectorSpec(records=(DistributionSpec.discrete([(1.0, 1.0)], count=10),))
        report = plan(spec, AdversaryModel(), target_epsilon=1.0)
        assert report.chosen_path is ChosenPath.NOISE_AUGMENTED
        assert report.noise_plan.noise_variance == pytest.approx(math.log(10))
        assert report.bounds.epsilon == pytest.approx(1.0)
        assert report.bounds.source is BoundSource.NOISE_AUGMENTED
        assert any(d.code == "no-uncertainty" for d in report.diagnostics)

    def test_deterministic_data_needs_target(self):
        """Without a target epsilon the noise cannot be sized."""
        spec = DataVectorSpec(records=(DistributionSpec.discrete([(1.0, 1.0)], count=10),))
        with pytest.raises(InvariantError, match="target epsilon"):
            plan(spec, AdversaryModel())

    def test_noise_plan_only_with_noise_path(self):
        """A report cannot carry a noise plan on a noiseless path."""
        report = plan(example_profile(1000), AdversaryModel(), target_epsilon=0.5)
        with pytest.raises(InvariantError):
            PlanReport(ChosenPath.NOISELESS_INDEPENDENT, report.bounds, report.noise_plan)
