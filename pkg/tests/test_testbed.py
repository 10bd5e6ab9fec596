"""
Tests for the BSC generator and instance merging
"""

import unittest

import numpy as np
import pytest

from core.utils.exceptions import InvalidInstanceError, MergeError
from modules.lip import build_lip, count_dims
from modules.testbed import (
    BscSpec,
    MergeSpec,
    balanced_pattern,
    distance_matrix,
    generate_bsc,
    level_ladder,
    merge_bsc,
    table1_row,
)


class TestGenerateBsc(unittest.TestCase):
    """Single-size instance generation"""

    def setUp(self):
        self.instance = generate_bsc(BscSpec(8, 4, seed=11, name="I1"))

    def test_table_row(self):
        """8x4 with the default slack set gives five scenarios"""
        self.assertEqual(table1_row(self.instance), (5, 4, 4, "8-8", "8-8"))

    def test_same_seed_same_instance(self):
        again = generate_bsc(BscSpec(8, 4, seed=11, name="I1"))
        self.assertEqual(again.instance_hash(), self.instance.instance_hash())

    def test_other_seed_other_flows(self):
        other = generate_bsc(BscSpec(8, 4, seed=12, name="I1"))
        self.assertNotEqual(other.instance_hash(), self.instance.instance_hash())

    def test_uniform_weights(self):
        np.testing.assert_allclose(self.instance.weights, np.full(5, 0.2))

    def test_every_node_has_an_eligible_door(self):
        for w, scen in enumerate(self.instance.scenarios):
            for m in range(scen.n_origins):
                self.assertTrue(self.instance.eligible_strip_doors(m, w))
            for n in range(scen.n_destinations):
                self.assertTrue(self.instance.eligible_stack_doors(n, w))

    def test_flows_within_range(self):
        for scen in self.instance.scenarios:
            self.assertTrue(np.all(scen.flow.data >= 10))
            self.assertTrue(np.all(scen.flow.data <= 50))
            self.assertEqual(scen.flow.nnz, 16)

    def test_door_bound_is_one_above_door_count(self):
        self.assertEqual(self.instance.max_strip_doors, 5)
        self.assertEqual(self.instance.max_stack_doors, 5)

    def test_capacity_ladder_increasing(self):
        for spec in self.instance.strip_doors:
            self.assertEqual(spec.n_levels, 5)
            self.assertTrue(np.all(np.diff(spec.capacities[1:]) > 0))
            self.assertEqual(spec.capacities[0], spec.capacities[1])

    def test_dimension_counts(self):
        """Rows, binaries, continuous variables and nonzeros of the full model"""
        self.assertEqual(count_dims(build_lip(self.instance)).as_row(), (3410, 450, 8000, 20360))


class TestSpecValidation(unittest.TestCase):
    """Parameter checks of the generator"""

    def test_no_nodes(self):
        with self.assertRaises(InvalidInstanceError):
            BscSpec(0, 4)

    def test_density_range(self):
        with self.assertRaises(InvalidInstanceError):
            BscSpec(4, 2, density=1.5)

    def test_flow_range_order(self):
        with self.assertRaises(InvalidInstanceError):
            BscSpec(4, 2, flow_range=(50, 10))

    def test_empty_slack_set(self):
        with self.assertRaises(InvalidInstanceError):
            BscSpec(4, 2, slack_set=())


class TestMerge(unittest.TestCase):
    """Merging instances of different sizes"""

    def setUp(self):
        self.small = generate_bsc(BscSpec(8, 4, seed=1, name="a"))
        self.large = generate_bsc(BscSpec(10, 5, seed=2, name="b"))
        self.merged = merge_bsc(MergeSpec(name="I3"), [self.small, self.large])

    def test_table_row(self):
        self.assertEqual(table1_row(self.merged), (10, 5, 5, "8-10", "8-10"))

    def test_weights_renormalised(self):
        self.assertAlmostEqual(float(self.merged.weights.sum()), 1.0)
        np.testing.assert_allclose(self.merged.weights, np.full(10, 0.1))

    def test_missing_door_fully_disrupted(self):
        """Scenarios of the 4-door member cannot use door 5"""
        for w in range(5):
            self.assertEqual(self.merged.scenarios[w].strip_disruption[4], 1.0)
            for m in range(8):
                self.assertNotIn(5, self.merged.eligible_strip_doors(m, w))

    def test_door_bound(self):
        self.assertEqual(self.merged.max_strip_doors, 6)

    def test_dimension_counts(self):
        self.assertEqual(count_dims(build_lip(self.merged)).as_row(), (9662, 1070, 26000, 63930))

    def test_level_mismatch(self):
        other = generate_bsc(BscSpec(4, 2, seed=3, n_levels=3))
        with self.assertRaises(MergeError):
            merge_bsc(MergeSpec(), [self.small, other])

    def test_nothing_to_merge(self):
        with self.assertRaises(MergeError):
            merge_bsc(MergeSpec(), [])


@pytest.mark.parametrize("rows,cols,nnz", [(8, 8, 16), (5, 7, 12), (4, 4, 16), (6, 6, 0)])
def test_balanced_pattern_counts(rows, cols, nnz):
    r, c = balanced_pattern(np.random.default_rng(0), rows, cols, nnz)
    assert r.size == nnz
    assert len(set(zip(r.tolist(), c.tolist()))) == nnz
    row_counts = np.bincount(r, minlength=rows)
    assert row_counts.max() - row_counts.min() <= 1


def test_distance_matrix_clipped():
    distance = distance_matrix(4, 4)
    assert distance[0, 0] == 8.0
    assert distance[0, 3] == 11.0
    assert distance.max() <= 8.0 + 3


def test_level_ladder():
    np.testing.assert_allclose(level_ladder(100.0, 5), [80.0, 100.0, 120.0, 140.0, 160.0])
