"""
Profiling Unit Tests
Dense Survival Forest Subgroup Profiler
"""

import json

import numpy as np
import pytest

from src.profiling.heterogeneity import (
    DF_LEAVES_MINUS_ONE,
    DF_TWICE_LEAVES_MINUS_ONE,
    HeterogeneityTest,
    heterogeneity_test,
    leaf_design,
    leaf_effects,
)
from src.profiling.profile_tree import assign_leaves, fit_profile_tree
from src.profiling.render import leaf_effects_rows, profile_to_document, render_profile_text
from src.profiling.selection import (
    KCandidate,
    choose_candidate,
    heterogeneity_scan,
    min_p_leaf,
    passes_threshold,
    select_best_profile,
    selection_metric,
)
from src.survival.dataset import CATEGORICAL, CovariateSpec
from src.utils.errors import ConfigurationError, DatasetValidationError


def group_proximity(groups):
    """1 within a group, 0 across"""
    return (groups[:, None] == groups[None, :]).astype(float)


class TestProfileTree:
    """Test cases for the Gini profile tree"""

    def setup_method(self):
        """Setup test fixtures"""
        rng = np.random.default_rng(1)
        self.x = rng.normal(size=(200, 3))
        self.labels = (self.x[:, 1] > 0.2).astype(int)

    def test_recovers_threshold(self):
        """Test a single split on the defining covariate"""
        tree = fit_profile_tree(self.x, self.labels, 10)

        assert tree.leaf_count == 2
        assert tree.split_variables == [1]
        assert np.array_equal(tree.predict(self.x), self.labels)

    def test_pure_labels_single_leaf(self):
        """Test one class gives a one-leaf tree"""
        tree = fit_profile_tree(self.x, np.zeros(200, dtype=int), 10)
        assert tree.leaf_count == 1

    def test_min_leaf_size(self):
        """Test every leaf holds at least min_leaf_size rows"""
        labels = np.random.default_rng(2).integers(0, 3, 200)
        tree = fit_profile_tree(self.x, labels, 30)
        counts = np.bincount(assign_leaves(tree, self.x))

        assert counts.min() >= 30

    def test_min_leaf_size_too_large(self):
        """Test no split when children would be too small"""
        assert fit_profile_tree(self.x, self.labels, 150).leaf_count == 1

    def test_categorical_split(self):
        """Test splits on level subsets"""
        levels = np.repeat([0.0, 1.0, 2.0], 20)
        labels = (levels == 1).astype(int)
        schema = (CovariateSpec("arm_site", CATEGORICAL, ("a", "b", "c")),)
        tree = fit_profile_tree(levels[:, None], labels, 5, schema=schema)

        assert tree.leaf_count == 2
        assert tree.root.left_levels == frozenset({0, 2})
        assert np.array_equal(tree.predict(levels[:, None]), labels)

    def test_assign_leaves_width_checked(self):
        """Test wrong covariate count"""
        tree = fit_profile_tree(self.x, self.labels, 10)
        with pytest.raises(DatasetValidationError):
            assign_leaves(tree, self.x[:, :2])

    def test_assign_leaves_missing_value(self):
        """Test NaN covariate"""
        tree = fit_profile_tree(self.x, self.labels, 10)
        x = self.x.copy()
        x[3, 0] = np.nan
        with pytest.raises(DatasetValidationError) as info:
            assign_leaves(tree, x)
        assert info.value.row == 3


class TestHeterogeneity:
    """Test cases for the leaf interaction test and leaf effects"""

    def test_leaf_design_columns(self):
        """Test [W, dummies, W x dummies]"""
        null, full, count = leaf_design(np.array([0, 1, 0, 1]), np.array([0, 0, 2, 2]))

        assert count == 2
        assert null.shape == (4, 1)
        assert full.tolist() == [[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 1]]

    def test_single_leaf(self, small_dataset):
        """Test one leaf gives p_leaf 1"""
        test = heterogeneity_test(small_dataset, np.zeros(small_dataset.n, dtype=int))

        assert test.p_leaf == 1.0
        assert test.leaf_count == 1

    def test_detects_interaction(self, dataset_factory):
        """Test a true treatment x subgroup effect gives a small p_leaf"""
        data = dataset_factory(n=600, seed=3, effect=-1.5)
        leaves = (data.covariates[:, 1] > 0).astype(int)
        test = heterogeneity_test(data, leaves)

        assert test.p_leaf < 0.01
        assert test.df == 1

    def test_df_modes(self, dataset_factory):
        """Test degrees of freedom of both rules"""
        data = dataset_factory(n=300, seed=4)
        leaves = np.digitize(data.covariates[:, 2], [-0.5, 0.5])

        assert heterogeneity_test(data, leaves, DF_LEAVES_MINUS_ONE).df == 2
        assert heterogeneity_test(data, leaves, DF_TWICE_LEAVES_MINUS_ONE).df == 4

    def test_unknown_df_mode(self, small_dataset):
        """Test an unknown df rule"""
        with pytest.raises(ConfigurationError):
            heterogeneity_test(small_dataset, np.zeros(small_dataset.n), "three")

    def test_single_arm_leaf_flagged(self, small_dataset):
        """Test a leaf with one arm has no hazard ratio"""
        leaves = np.zeros(small_dataset.n, dtype=int)
        leaves[(small_dataset.treatment == 1) & (np.arange(small_dataset.n) < 20)] = 1
        effects = leaf_effects(small_dataset, leaves).by_leaf()

        assert effects[1].hazard_ratio is None
        assert "single arm" in effects[1].flags
        assert effects[1].logrank_p == 1.0
        assert effects[0].hazard_ratio is not None

    def test_leaf_effect_counts(self, small_dataset):
        """Test arm and event counts add up"""
        leaves = (small_dataset.covariates[:, 1] > 0).astype(int)
        effects = leaf_effects(small_dataset, leaves)

        assert sum(e.size for e in effects) == small_dataset.n
        assert sum(e.events_control + e.events_treated for e in effects) == small_dataset.event_count


class TestSelection:
    """Test cases for cluster-count selection"""

    def setup_method(self):
        """Setup test fixtures"""
        from tests.conftest import make_dataset

        self.data = make_dataset(n=400, seed=8, effect=-1.5)
        self.groups = (self.data.covariates[:, 1] > 0).astype(int)
        self.proximity = group_proximity(self.groups)

    def test_metric(self):
        """Test p_leaf below p* passes, otherwise 0"""
        assert selection_metric(0.001, 0.01) == 0.001
        assert selection_metric(0.01, 0.01) == 0.0

    def test_threshold_is_strict(self):
        """Test p_leaf equal to p* fails and an underflowed p_leaf passes"""
        assert passes_threshold(0.0, 0.01)
        assert passes_threshold(0.0099, 0.01)
        assert not passes_threshold(0.01, 0.01)

    def test_choose_candidate_boundaries(self):
        """Test zero p_leaf wins and p_leaf at p* is never chosen"""
        at_threshold = KCandidate(2, None, None, None, HeterogeneityTest(p_leaf=0.01, leaf_count=2))
        underflowed = KCandidate(3, None, None, None, HeterogeneityTest(p_leaf=0.0, statistic=2000.0, leaf_count=3))
        weaker = KCandidate(4, None, None, None, HeterogeneityTest(p_leaf=0.004, leaf_count=3))

        assert choose_candidate([at_threshold, underflowed, weaker], 0.01) is underflowed
        assert choose_candidate([at_threshold], 0.01) is None

    def test_choose_candidate_ties_to_smaller_k(self):
        """Test equal p_leaf keeps the first k"""
        first = KCandidate(2, None, None, None, HeterogeneityTest(p_leaf=0.0, leaf_count=2))
        second = KCandidate(3, None, None, None, HeterogeneityTest(p_leaf=0.0, leaf_count=3))

        assert choose_candidate([first, second], 0.01) is first

    def test_underflowed_p_leaf_declares(self, mocker):
        """Test a p_leaf of exactly 0 keeps the multi-leaf profile"""
        candidate = heterogeneity_scan(self.data, self.proximity, (2, 2), 40, 1)[0]
        candidate.test = HeterogeneityTest(p_leaf=0.0, statistic=2000.0, df=candidate.num_leaves - 1,
                                           leaf_count=candidate.num_leaves)
        mocker.patch("src.profiling.selection.heterogeneity_scan", return_value=[candidate])
        result = select_best_profile(self.data, self.proximity, (2, 2), p_star=0.01, min_leaf_size=40, seed=1)

        assert result.heterogeneous
        assert result.k == 2
        assert result.p_leaf == 0.0
        assert result.num_leaves == candidate.num_leaves > 1

    def test_p_leaf_at_threshold_is_homogeneous(self, mocker):
        """Test a p_leaf equal to p* keeps the one-leaf profile"""
        candidate = heterogeneity_scan(self.data, self.proximity, (2, 2), 40, 1)[0]
        candidate.test = HeterogeneityTest(p_leaf=0.01, leaf_count=candidate.num_leaves)
        mocker.patch("src.profiling.selection.heterogeneity_scan", return_value=[candidate])
        result = select_best_profile(self.data, self.proximity, (2, 2), p_star=0.01, min_leaf_size=40, seed=1)

        assert not result.heterogeneous
        assert result.num_leaves == 1

    def test_declares_true_subgroups(self):
        """Test the profile splits on the covariate behind the clusters"""
        result = select_best_profile(self.data, self.proximity, (2, 2), p_star=0.05, min_leaf_size=40, seed=1)

        assert result.heterogeneous
        assert result.k == 2
        assert result.tree.split_variables == [1]
        assert result.metric == result.p_leaf

    def test_zero_threshold_never_declares(self):
        """Test p* = 0 keeps the one-leaf profile"""
        result = select_best_profile(self.data, self.proximity, (2, 3), p_star=0.0, min_leaf_size=40, seed=1)

        assert not result.heterogeneous
        assert result.num_leaves == 1
        assert result.metric == 0.0
        assert result.min_p_leaf < 1.0

    def test_scan_covers_range(self):
        """Test one candidate per k, increasing"""
        candidates = heterogeneity_scan(self.data, self.proximity, (2, 4), 40, 1)

        assert [c.k for c in candidates] == [2, 3, 4]
        assert min_p_leaf(candidates) == min(c.p_leaf for c in candidates)

    def test_bad_k_range(self):
        """Test k_min below 2"""
        with pytest.raises(ConfigurationError):
            select_best_profile(self.data, self.proximity, (1, 3), p_star=0.05)

    def test_rendering(self):
        """Test text and document forms of a profile"""
        result = select_best_profile(self.data, self.proximity, (2, 2), p_star=0.05, min_leaf_size=40, seed=1)
        text = render_profile_text(result)
        document = profile_to_document(result)

        assert text.startswith("verdict: heterogeneous")
        assert "X2 <=" in text
        assert document["tree"]["variable_name"] == "X2"
        assert len(document["leaves"]) == 2
        json.dumps(document)
        assert len(leaf_effects_rows(result.leaf_effects)) == 2
