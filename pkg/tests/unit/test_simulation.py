"""
Simulation Unit Tests
Dense Survival Forest Subgroup Profiler
"""

import numpy as np
import pytest

from src.simulation.generator import (
    balanced_assignment,
    generate_dataset,
    sample_survival_time,
    weibull_inverse_cdf,
)
from src.simulation.scenarios import (
    MULTIPLIER_SUM,
    NEGATIVE,
    NEUTRAL,
    POSITIVE,
    SCENARIO_NAMES,
    KappaTerm,
    RegionCondition,
    ScenarioSpec,
    builtin_scenario,
    true_region,
)
from src.utils.errors import ConfigurationError
from src.utils.integrity import keyed_rng


class TestWeibull:
    """Test cases for Weibull inversion"""

    def test_inverse_cdf_at_scale(self):
        """Test u = e^-1 with lp = 0 returns the scale"""
        assert float(weibull_inverse_cdf(np.exp(-1.0), 0.0, 2.0, 300.0)) == pytest.approx(300.0)

    def test_higher_hazard_shortens_time(self):
        """Test a positive linear predictor gives earlier events"""
        assert weibull_inverse_cdf(0.5, 1.0, 2.0, 300.0) < weibull_inverse_cdf(0.5, 0.0, 2.0, 300.0)

    def test_samples_positive(self):
        """Test sampled times are finite and positive"""
        times = sample_survival_time(np.zeros(1000), 2.0, 300.0, keyed_rng(3))

        assert np.all(times > 0)
        assert np.all(np.isfinite(times))
        # Weibull(2, 300) median is 300 * sqrt(ln 2)
        assert np.median(times) == pytest.approx(300.0 * np.sqrt(np.log(2.0)), rel=0.1)


class TestScenarios:
    """Test cases for scenario definitions"""

    def test_all_names_build(self):
        """Test every built-in scenario is constructible"""
        for name in SCENARIO_NAMES:
            spec = builtin_scenario(name, n=50)
            assert spec.p == 10
            assert len(spec.schema) == 10

    def test_heterogeneity_flags(self):
        """Test only the interaction scenarios are heterogeneous"""
        assert builtin_scenario("scenario1").is_heterogeneous
        assert builtin_scenario("scenario3").is_heterogeneous
        assert not builtin_scenario("null").is_heterogeneous
        assert not builtin_scenario("global").is_heterogeneous

    def test_unknown_scenario(self):
        """Test unknown names"""
        with pytest.raises(ConfigurationError):
            builtin_scenario("scenario9")

    def test_region_labels(self):
        """Test quadrant labels of the two-sided scenario"""
        covariates = np.zeros((3, 10))
        covariates[0, 5:7] = 1.0
        covariates[1, 5:7] = -1.0
        covariates[2, 5:7] = (1.0, -1.0)
        labels = true_region(builtin_scenario("scenario3"), covariates)

        assert list(labels) == [POSITIVE, NEGATIVE, NEUTRAL]

    def test_shifted_quadrant(self):
        """Test the region threshold of scenario 2"""
        covariates = np.zeros((2, 10))
        covariates[0, 5:7] = -0.5
        covariates[1, 5:7] = -1.5
        labels = true_region(builtin_scenario("scenario2"), covariates)

        assert list(labels) == [POSITIVE, NEUTRAL]

    def test_sum_multiplier(self):
        """Test the sum-of-covariates kappa form"""
        term = KappaTerm((RegionCondition(0, ">", 0.0),), 1, 0.5, MULTIPLIER_SUM)
        covariates = np.array([[1.0, 2.0], [1.0, 2.0], [-1.0, 2.0]])

        assert list(term.contribution(covariates, np.array([1, 0, 1]))) == [1.5, 0.0, 0.0]

    def test_invalid_spec(self):
        """Test gamma length and region covariate checks"""
        with pytest.raises(ConfigurationError):
            ScenarioSpec(gamma=(0.0,) * 3)
        with pytest.raises(ConfigurationError):
            ScenarioSpec(kappa=(KappaTerm((RegionCondition(12, ">", 0.0),), 1, -0.5),))


class TestGenerator:
    """Test cases for dataset generation"""

    def test_balanced_assignment(self):
        """Test arm sizes differ by at most one"""
        for n in (10, 11):
            treatment = balanced_assignment(n, keyed_rng(n))
            assert abs(int(treatment.sum()) - (n - int(treatment.sum()))) <= 1

    def test_deterministic(self):
        """Test the same seed gives identical data"""
        spec = builtin_scenario("scenario1", n=200)
        first = generate_dataset(spec, 42)
        second = generate_dataset(spec, 42)

        assert np.array_equal(first.dataset.time, second.dataset.time)
        assert np.array_equal(first.dataset.covariates, second.dataset.covariates)
        assert not np.array_equal(first.dataset.time, generate_dataset(spec, 43).dataset.time)

    def test_observed_time_is_minimum(self):
        """Test time = min(event, censor) and the event indicator"""
        generated = generate_dataset(builtin_scenario("null", n=300), 1)
        data = generated.dataset

        assert np.allclose(data.time, np.minimum(generated.event_time, generated.censor_time))
        assert np.array_equal(data.event, generated.event_time <= generated.censor_time)
        assert 0 < data.event_count < data.n

    def test_covariate_design(self):
        """Test binary and normal covariate columns"""
        data = generate_dataset(builtin_scenario("null", n=400), 2).dataset

        assert set(np.unique(data.covariates[:, :5])) <= {0.0, 1.0}
        assert abs(float(data.covariates[:, 5:].mean())) < 0.2
        assert list(data.categorical_mask) == [True] * 5 + [False] * 5

    def test_region_truth(self):
        """Test region labels agree with the scenario"""
        generated = generate_dataset(builtin_scenario("scenario1", n=200), 3)
        inside = (generated.dataset.covariates[:, 5] > 0) & (generated.dataset.covariates[:, 6] > 0)

        assert np.array_equal(generated.region == POSITIVE, inside)

    def test_size_override(self):
        """Test n overrides the scenario size"""
        assert generate_dataset(builtin_scenario("null", n=500), 4, n=60).dataset.n == 60
