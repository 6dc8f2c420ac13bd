"""
Evaluation Unit Tests
Dense Survival Forest Subgroup Profiler
"""

from types import SimpleNamespace

import numpy as np
import pytest

from src.evaluation.baseline import encode_covariates, kmeans_baseline
from src.evaluation.gradient import (
    GradientGrid,
    averaged_gradient,
    grid_axis,
    gradient_for_profile,
    true_region_gradient,
)
from src.evaluation.recovery import covariate_recovery
from src.profiling.heterogeneity import HeterogeneityTest
from src.profiling.profile_tree import fit_profile_tree
from src.simulation.generator import generate_dataset
from src.simulation.scenarios import builtin_scenario


def fake_profile(variables, heterogeneous=True):
    schema = builtin_scenario("null").schema
    return SimpleNamespace(heterogeneous=heterogeneous,
                           tree=SimpleNamespace(split_variables=sorted(variables), schema=schema))


class TestGradient:
    """Test cases for gradient grids"""

    def test_axis(self):
        """Test 301 points from -1.5 to 1.5"""
        axis = grid_axis()

        assert axis.size == 301
        assert axis[0] == pytest.approx(-1.5)
        assert axis[-1] == pytest.approx(1.5)
        assert axis[150] == pytest.approx(0.0)

    def test_true_region_scenario1(self):
        """Test +1 in the benefit quadrant, 0 elsewhere"""
        grid = true_region_gradient(builtin_scenario("scenario1"))

        assert grid.shape == (301, 301)
        assert grid.values[200, 200] == 1.0
        assert grid.values[0, 0] == 0.0
        assert grid.values[200, 0] == 0.0

    def test_true_region_two_sided(self):
        """Test -1 in the harm quadrant"""
        grid = true_region_gradient(builtin_scenario("scenario3"))

        assert grid.values[0, 0] == -1.0
        assert grid.values[300, 300] == 1.0

    def test_profile_gradient(self):
        """Test a tree split on X6 paints columns uniformly"""
        generated = generate_dataset(builtin_scenario("scenario1", n=400), 5)
        data = generated.dataset
        tree = fit_profile_tree(data.covariates, (data.covariates[:, 5] > 0).astype(int), 20, schema=data.schema)
        grid = gradient_for_profile(SimpleNamespace(tree=tree), generated)

        assert grid.shape == (301, 301)
        assert np.all(np.abs(grid.values) <= 1.0)
        assert np.all(grid.values == grid.values[0:1, :])
        assert grid.values[0, 0] != grid.values[0, 300]

    def test_average(self):
        """Test pixel-wise mean"""
        axis = np.array([0.0, 1.0])
        grids = [GradientGrid(np.ones((2, 2)), axis), GradientGrid(-np.ones((2, 2)), axis),
                 GradientGrid(np.ones((2, 2)), axis)]

        assert np.allclose(averaged_gradient(grids).values, 1.0 / 3.0)

    def test_average_shape_mismatch(self):
        """Test grids of different shape"""
        with pytest.raises(ValueError):
            averaged_gradient([GradientGrid(np.ones((2, 2)), np.arange(2.0)),
                               GradientGrid(np.ones((3, 3)), np.arange(3.0))])


class TestRecovery:
    """Test cases for covariate recovery rates"""

    def test_rates(self):
        """Test hit rates and the covariate-count distribution"""
        profiles = [fake_profile([5, 6]), fake_profile([5]), fake_profile([0, 6, 9]), fake_profile([2])]
        report = covariate_recovery(profiles, method="proposed")

        assert report.target_names == ("X6", "X7")
        assert report.rate_first == 0.5
        assert report.rate_second == 0.5
        assert report.rate_both == 0.25
        assert report.covariate_count_distribution == {1: 0.5, 2: 0.25, 3: 0.25}

    def test_declared_only(self):
        """Test homogeneous verdicts are excluded on request"""
        profiles = [fake_profile([5, 6]), fake_profile([], heterogeneous=False)]
        report = covariate_recovery(profiles, declared_only=True)

        assert report.replicates == 1
        assert report.rate_both == 1.0

    def test_no_profiles(self):
        """Test empty input"""
        with pytest.raises(ValueError):
            covariate_recovery([fake_profile([], heterogeneous=False)], declared_only=True)

    def test_rows(self):
        """Test CSV rows of a report"""
        rows = covariate_recovery([fake_profile([5, 6])], method="kmeans").rows()

        assert rows[0] == {"method": "kmeans", "measure": "rate_X6", "value": 1.0}
        assert rows[2]["measure"] == "rate_X6&X7"
        assert rows[3]["measure"] == "share_2_covariates"


class TestBaseline:
    """Test cases for the k-means baseline"""

    def test_encoding(self, small_dataset):
        """Test indicator columns and standardization"""
        encoded = encode_covariates(small_dataset)

        assert encoded.shape == (small_dataset.n, 3)
        assert np.allclose(encoded.mean(axis=0), 0.0)
        assert np.allclose(encoded.std(axis=0), 1.0)

    def test_baseline_profile(self, small_dataset):
        """Test the baseline returns a profile for a k in range"""
        result = kmeans_baseline(small_dataset, k_range=(2, 3), min_leaf_size=20, seed=1)

        assert result.k in (2, 3)
        assert result.num_leaves == len(result.leaf_effects)
        assert result.leaf_ids.shape == (small_dataset.n,)
        assert result.heterogeneous == (result.num_leaves > 1)

    def test_baseline_threshold(self, small_dataset):
        """Test p* = 0 never declares heterogeneity"""
        result = kmeans_baseline(small_dataset, k_range=(2, 3), min_leaf_size=20, seed=1, p_star=0.0)

        assert not result.heterogeneous
        assert result.metric == 0.0

    def test_baseline_underflowed_p_leaf(self, small_dataset, mocker):
        """Test a p_leaf of exactly 0 declares heterogeneity"""
        mocker.patch("src.evaluation.baseline.heterogeneity_test",
                     return_value=HeterogeneityTest(p_leaf=0.0, statistic=2000.0, df=1, leaf_count=2))
        result = kmeans_baseline(small_dataset, k_range=(2, 3), min_leaf_size=20, seed=1, p_star=0.01)

        assert result.heterogeneous
        assert result.p_leaf == 0.0

    def test_baseline_p_leaf_at_threshold(self, small_dataset, mocker):
        """Test a p_leaf equal to p* is not heterogeneous"""
        mocker.patch("src.evaluation.baseline.heterogeneity_test",
                     return_value=HeterogeneityTest(p_leaf=0.01, statistic=6.6, df=1, leaf_count=2))
        result = kmeans_baseline(small_dataset, k_range=(2, 3), min_leaf_size=20, seed=1, p_star=0.01)

        assert not result.heterogeneous
        assert result.metric == 0.0
