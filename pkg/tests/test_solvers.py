"""
Tests for branch and bound, the scenario solvers and the exact oracles
"""

import itertools
import unittest
from unittest import mock

import numpy as np
import pytest

import factories
from core.model import FirstStageDesign, check_feasibility, evaluate_solution, scenario_cost
from core.utils.exceptions import SearchSpaceTooLargeError
from modules.lip import BINARY, MILPBuilder, build_lip, design_from_vector
from modules.lip.milp import GE, LE, GenericMILP
from modules.solvers import (
    LinearRelaxation,
    OmegaSubmodel,
    SolveStatus,
    brute_force_oracle,
    search_space_size,
    semi_assignment_bound,
    solve_bb,
    solve_bq_bb,
    solve_omega,
    solve_omega_exact,
    solve_omega_lsh,
)
from modules.testbed import BscSpec, generate_bsc


def _knapsack():
    """min -5a - 4b - 3c  s.t.  2a + 3b + c <= 5"""
    builder = MILPBuilder("knapsack")
    cols = [builder.add_var(name, BINARY, value) for name, value in (("a", -5), ("b", -4), ("c", -3))]
    builder.add_row("weight", list(zip(cols, (2.0, 3.0, 1.0))), LE, 5.0)
    return builder.build()


def _enumerate_omega(sub):
    """Cheapest feasible assignment by listing every combination"""
    best = None
    for x in itertools.product(*sub.strip_domains):
        for y in itertools.product(*sub.stack_domains):
            if sub.is_feasible(x, y):
                value = sub.value(x, y)
                best = value if best is None else min(best, value)
    return best


class TestBranchAndBound(unittest.TestCase):
    """LP-based branch and bound"""

    def test_knapsack_optimum(self):
        result = solve_bb(_knapsack())
        self.assertEqual(result.status, SolveStatus.OPTIMAL)
        self.assertAlmostEqual(result.value, -9.0)
        self.assertAlmostEqual(result.bound, -9.0)
        np.testing.assert_allclose(result.solution, [1.0, 1.0, 0.0], atol=1e-6)

    def test_bound_trace_monotone(self):
        trace = solve_bb(_knapsack()).bound_trace
        self.assertTrue(all(b >= a - 1e-9 for a, b in zip(trace, trace[1:])))

    def test_infeasible_model(self):
        builder = MILPBuilder("infeasible")
        a = builder.add_var("a", BINARY, 1.0)
        b = builder.add_var("b", BINARY, 1.0)
        builder.add_row("too_much", [(a, 1.0), (b, 1.0)], GE, 3.0)
        result = solve_bb(builder.build())
        self.assertEqual(result.status, SolveStatus.INFEASIBLE)
        self.assertIsNone(result.value)

    def test_warm_start_is_kept_when_feasible(self):
        result = solve_bb(_knapsack(), initial_solution=[1.0, 1.0, 0.0])
        self.assertAlmostEqual(result.value, -9.0)

    def test_unverified_node_point_is_never_the_incumbent(self):
        with mock.patch.object(GenericMILP, "is_feasible", return_value=False):
            result = solve_bb(_knapsack())
        self.assertIsNone(result.solution)
        self.assertIsNone(result.value)

    def test_relaxation_value(self):
        """The LP optimum fills the knapsack fractionally"""
        milp = _knapsack()
        status, value, _ = LinearRelaxation(milp).solve(milp.lower, milp.upper)
        self.assertEqual(status, "optimal")
        self.assertLessEqual(value, -9.0)

    def test_single_pair_model(self):
        """Both level-1 doors and the direct route: 100 + 100 + 80"""
        instance = factories.single_pair_instance()
        milp = build_lip(instance)
        result = solve_bb(milp)
        self.assertEqual(result.status, SolveStatus.OPTIMAL)
        self.assertAlmostEqual(result.value, 280.0)
        self.assertEqual(design_from_vector(milp, result.solution), FirstStageDesign({1: 1}, {1: 1}))


class TestOmegaSolvers(unittest.TestCase):
    """Scenario problems with the first stage fixed"""

    def setUp(self):
        self.instance = factories.tiny_instance()
        self.design = FirstStageDesign({1: 1, 2: 1}, {1: 1, 2: 2})

    def test_exact_matches_enumeration(self):
        for w in range(self.instance.n_scenarios):
            sub = OmegaSubmodel.from_design(self.instance, w, self.design)
            result = solve_omega_exact(sub)
            self.assertEqual(result.status, SolveStatus.OPTIMAL)
            self.assertAlmostEqual(result.value, _enumerate_omega(sub))
            self.assertTrue(sub.is_feasible(*result.solution))

    def test_value_matches_scenario_cost(self):
        """The returned value prices the returned assignment"""
        sub = OmegaSubmodel.from_design(self.instance, 1, self.design)
        result = solve_omega_exact(sub)
        self.assertAlmostEqual(result.value, scenario_cost(self.instance, 1, result.assignment))

    def test_lsh_is_feasible_and_not_better_than_exact(self):
        for w in range(self.instance.n_scenarios):
            sub = OmegaSubmodel.from_design(self.instance, w, self.design)
            heuristic = solve_omega_lsh(sub, seed=3)
            self.assertTrue(sub.is_feasible(*heuristic.solution))
            self.assertGreaterEqual(heuristic.value, solve_omega_exact(sub).value - 1e-9)

    def test_lsh_is_reproducible(self):
        sub = OmegaSubmodel.from_design(self.instance, 0, self.design)
        first, second = solve_omega_lsh(sub, seed=5), solve_omega_lsh(sub, seed=5)
        self.assertEqual(first.solution, second.solution)

    def test_nothing_installed_outsources_everything(self):
        sub = OmegaSubmodel.from_design(self.instance, 0, FirstStageDesign())
        result = solve_omega(sub)
        penalty = self.instance.outsourcing_penalty
        flow = float(self.instance.scenarios[0].flow.sum())
        self.assertAlmostEqual(result.value, 2 * penalty + penalty * flow)
        self.assertEqual(result.assignment.out, 2)

    def test_semi_assignment_bound_is_valid(self):
        for w in range(self.instance.n_scenarios):
            sub = OmegaSubmodel.from_design(self.instance, w, self.design)
            self.assertLessEqual(semi_assignment_bound(sub), solve_omega_exact(sub).value + 1e-9)

    def test_node_limit_keeps_incumbent(self):
        sub = OmegaSubmodel.from_design(self.instance, 1, self.design)
        result = solve_omega_exact(sub, node_limit=1)
        self.assertEqual(result.status, SolveStatus.FEASIBLE)
        self.assertLessEqual(result.bound, result.value)
        self.assertTrue(sub.is_feasible(*result.solution))

    def test_dispatch_threshold(self):
        sub = OmegaSubmodel.from_design(self.instance, 0, self.design)
        self.assertEqual(solve_omega(sub, threshold=100).status, SolveStatus.OPTIMAL)
        self.assertEqual(solve_omega(sub, threshold=0).status, SolveStatus.FEASIBLE)


class TestOracles(unittest.TestCase):
    """Whole-instance exact searches"""

    def setUp(self):
        self.instance = factories.tiny_instance()

    def test_oracle_solution_is_feasible(self):
        result = brute_force_oracle(self.instance)
        self.assertEqual(result.status, SolveStatus.OPTIMAL)
        self.assertEqual(check_feasibility(self.instance, result.design, result.assignments), [])
        self.assertAlmostEqual(
            evaluate_solution(self.instance, result.design, result.assignments).total, result.value)

    def test_search_space_cap(self):
        self.assertGreater(search_space_size(self.instance), 1)
        with self.assertRaises(SearchSpaceTooLargeError):
            brute_force_oracle(self.instance, max_leaves=1)

    def test_bq_search_agrees(self):
        oracle = brute_force_oracle(self.instance)
        search = solve_bq_bb(self.instance)
        self.assertEqual(search.status, SolveStatus.OPTIMAL)
        self.assertAlmostEqual(search.value, oracle.value, places=6)

    def test_linear_model_agrees(self):
        oracle = brute_force_oracle(self.instance)
        result = solve_bb(build_lip(self.instance))
        self.assertEqual(result.status, SolveStatus.OPTIMAL)
        self.assertAlmostEqual(result.value, oracle.value, places=5)

    def test_pair_optimum(self):
        self.assertAlmostEqual(brute_force_oracle(factories.single_pair_instance()).value, 280.0)


@pytest.mark.parametrize("seed", factories.TINY_SEEDS)
def test_exact_methods_agree_on_generated_instances(seed):
    instance = factories.seeded_tiny(seed)
    oracle = brute_force_oracle(instance)
    assert solve_bq_bb(instance).value == pytest.approx(oracle.value, rel=1e-6)
    assert solve_bb(build_lip(instance)).value == pytest.approx(oracle.value, rel=1e-6)


def test_lsh_quality_on_generated_submodels():
    """Local search stays within 5% of the exact value on at least 90% of 50 cases"""
    within = 0
    for case in range(50):
        instance = generate_bsc(BscSpec(3, 2, seed=case, slack_set=(5,), density=0.5, n_levels=2))
        rng = np.random.default_rng(case)
        design = FirstStageDesign(
            {i: int(rng.integers(1, 3)) for i in range(1, instance.n_strip + 1)},
            {j: int(rng.integers(1, 3)) for j in range(1, instance.n_stack + 1)},
        )
        sub = OmegaSubmodel.from_design(instance, 0, design)
        exact = solve_omega_exact(sub)
        heuristic = solve_omega_lsh(sub, seed=case)
        assert sub.is_feasible(*heuristic.solution)
        assert heuristic.value >= exact.value - 1e-9
        if heuristic.value <= 1.05 * exact.value:
            within += 1
    assert within >= 45
