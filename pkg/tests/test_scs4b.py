"""
Tests for the scenario-cluster matheuristic
"""

import unittest

import pytest

import factories
from core.model import FirstStageDesign, build_instance, check_feasibility, evaluate_solution
from core.utils.exceptions import ParameterError
from modules.scs4b import (
    STATUS_EMPTY_POOL,
    STATUS_NO_INCUMBENT,
    STATUS_OK,
    Evaluation,
    Scs4bParams,
    escalate_design,
    gap,
    goodness_ratio,
    lazy_evaluate,
    run,
    step0_singleton_pool,
    step4_accept_or_escalate,
)
from modules.scs4b.algorithm import ACCEPT, ESCALATE, REJECT
from modules.solvers import brute_force_oracle
from modules.testbed import BscSpec, generate_bsc


class TestReportFormulas(unittest.TestCase):
    """Gap and goodness ratio"""

    def test_gap_percent(self):
        self.assertEqual(round(gap(7488.4, 7385.6), 2), 1.37)

    def test_goodness_ratio(self):
        self.assertAlmostEqual(goodness_ratio(7488.4, 7468.4), 1.0028, delta=2e-4)

    def test_missing_values(self):
        self.assertIsNone(gap(None, 10.0))
        self.assertIsNone(gap(10.0, None))
        self.assertIsNone(gap(0.0, 0.0))
        self.assertIsNone(goodness_ratio(10.0, 0.0))


class TestParams(unittest.TestCase):
    """Parameter validation and config defaults"""

    def test_config_defaults(self):
        params = Scs4bParams.from_config()
        self.assertGreaterEqual(params.kappa, 1)
        self.assertIn(params.escalation, ("textual", "literal"))

    def test_none_override_keeps_default(self):
        self.assertEqual(Scs4bParams.from_config(kappa=None).kappa, Scs4bParams.from_config().kappa)

    def test_invalid_values(self):
        for overrides in ({"kappa": 0}, {"rho": 1.5}, {"delta": 0}, {"escalation": "doubling"},
                          {"bound_option": "3"}, {"time_limit": -1.0}, {"step0_option": 3}):
            with self.assertRaises(ParameterError):
                Scs4bParams.from_config(**overrides)

    def test_unknown_key(self):
        with self.assertRaises(ParameterError):
            Scs4bParams.from_config(colour="blue")

    def test_bound_option_flags(self):
        params = Scs4bParams.from_config(bound_option=2)
        self.assertEqual(params.bound_option, "2")
        self.assertFalse(params.wants_option1)
        self.assertTrue(params.wants_option2)


class TestEscalation(unittest.TestCase):
    """Capacity level growth"""

    def setUp(self):
        self.instance = generate_bsc(BscSpec(2, 2, seed=0, slack_set=(5,), n_levels=5, name="esc"))

    def test_textual_step(self):
        params = Scs4bParams.from_config(escalation="textual", delta=1)
        escalated = escalate_design(FirstStageDesign({1: 2}, {2: 4}), self.instance, params)
        self.assertEqual(escalated, FirstStageDesign({1: 3}, {2: 5}))

    def test_literal_step_jumps_to_top(self):
        params = Scs4bParams.from_config(escalation="literal", delta=1)
        escalated = escalate_design(FirstStageDesign({1: 2}, {}), self.instance, params)
        self.assertEqual(escalated, FirstStageDesign({1: 5}, {}))

    def test_basic_and_top_levels_stay(self):
        params = Scs4bParams.from_config()
        self.assertIsNone(escalate_design(FirstStageDesign({1: 5, 2: 0}, {1: 5}), self.instance, params))

    def test_only_growable_doors_move(self):
        params = Scs4bParams.from_config(escalation="textual", delta=2)
        escalated = escalate_design(FirstStageDesign({1: 0, 2: 4}, {1: 5}), self.instance, params)
        self.assertEqual(escalated, FirstStageDesign({1: 0, 2: 5}, {1: 5}))


class TestStepFour(unittest.TestCase):
    """Accept, escalate or reject a trial"""

    def setUp(self):
        self.instance = factories.tiny_instance()
        self.params = Scs4bParams.from_config(rho=0.0)

    def _trial(self, z, out, design=None):
        return Evaluation(design or FirstStageDesign({1: 1}, {1: 1}), z, out, [])

    def test_first_feasible_trial_is_accepted(self):
        decision, design = step4_accept_or_escalate(self._trial(100.0, 0), self.params, None, self.instance)
        self.assertEqual((decision, design), (ACCEPT, None))

    def test_worse_trial_escalates(self):
        decision, design = step4_accept_or_escalate(self._trial(100.0, 0), self.params, 90.0, self.instance)
        self.assertEqual(decision, ESCALATE)
        self.assertEqual(design, FirstStageDesign({1: 2}, {1: 2}))

    def test_outsourcing_at_top_level_is_rejected(self):
        trial = self._trial(50.0, 1, FirstStageDesign({1: 2}, {1: 2}))
        decision, _ = step4_accept_or_escalate(trial, self.params, None, self.instance)
        self.assertEqual(decision, REJECT)

    def test_rho_allows_outsourcing(self):
        """rho * |W| = 1 tolerates one outsourcing flag"""
        params = Scs4bParams.from_config(rho=0.5)
        decision, _ = step4_accept_or_escalate(self._trial(50.0, 1), params, None, self.instance)
        self.assertEqual(decision, ACCEPT)


class TestLazyEvaluation(unittest.TestCase):
    """Scenario-by-scenario pricing of a fixed design"""

    def setUp(self):
        self.instance = factories.roomy_instance()
        self.params = Scs4bParams.from_config(jobs=1)

    def test_priced_like_a_full_solution(self):
        evaluation = lazy_evaluate(FirstStageDesign({1: 1}, {1: 1}), self.instance, self.params)
        self.assertEqual(evaluation.out, 0)
        self.assertAlmostEqual(
            evaluation.z, evaluate_solution(self.instance, evaluation.design, evaluation.assignments).total)
        self.assertEqual(check_feasibility(self.instance, evaluation.design, evaluation.assignments), [])

    def test_cache_returns_same_evaluation(self):
        cache = {}
        design = FirstStageDesign({1: 1, 2: 1}, {1: 1})
        first = lazy_evaluate(design, self.instance, self.params, cache)
        self.assertIs(lazy_evaluate(design, self.instance, self.params, cache), first)

    def test_unused_doors_are_trimmed(self):
        evaluation = lazy_evaluate(FirstStageDesign({1: 1, 2: 1}, {1: 1, 2: 1}), self.instance, self.params)
        used_strip = {i for a in evaluation.assignments for i in a.strip_doors_used()}
        self.assertEqual(set(evaluation.design.strip_level), used_strip)


class TestRun(unittest.TestCase):
    """Whole algorithm on small instances"""

    def test_roomy_instance(self):
        instance = factories.roomy_instance()
        report = run(instance, Scs4bParams.from_config(kappa=2, seed=0, jobs=1))
        self.assertEqual(report.status, STATUS_OK)
        self.assertEqual(report.out, 0)
        self.assertEqual(report.removed_scenarios, [])
        self.assertEqual(check_feasibility(report.instance, report.design, report.assignments), [])

        optimum = brute_force_oracle(report.instance).value
        self.assertLessEqual(report.best_bound, optimum + 1e-6)
        self.assertGreaterEqual(report.upper_bound, optimum - 1e-6)

    def test_step0_keeps_roomy_scenarios(self):
        pool = step0_singleton_pool(factories.roomy_instance(), Scs4bParams.from_config(jobs=1))
        self.assertEqual(pool.kept, [0, 1, 2])
        self.assertEqual(sorted(pool.designs), [0, 1, 2])
        self.assertEqual(pool.removed_weight, 0.0)

    def test_reference_value_gives_ratio(self):
        report = run(factories.roomy_instance(), Scs4bParams.from_config(jobs=1, bound_option="none"),
                     reference_value=1000.0)
        self.assertIsNone(report.best_bound)
        self.assertAlmostEqual(report.goodness_ratio, report.upper_bound / 1000.0)

    def test_every_scenario_outsources(self):
        """Doors smaller than any node load leave nothing for the pool"""
        doors = [factories.door([5, 8], [100, 150])]
        instance = build_instance(
            strip_doors=doors, stack_doors=list(doors), distance=[[8.0]],
            scenarios=[factories.scenario(1.0, [[10]], n_strip=1, n_stack=1)], name="small-doors")
        report = run(instance, Scs4bParams.from_config(jobs=1))
        self.assertEqual(report.status, STATUS_EMPTY_POOL)
        self.assertIsNone(report.upper_bound)
        self.assertEqual(report.removed_weight, 1.0)

    def test_removed_scenario_refines_the_instance(self):
        """Bounds and incumbent refer to the instance without the outsourcing scenario"""
        instance = factories.partly_outsourcing_instance()
        report = run(instance, Scs4bParams.from_config(kappa=1, seed=0, jobs=1))
        self.assertEqual(report.status, STATUS_OK)
        self.assertEqual(report.removed_scenarios, ["huge"])
        self.assertAlmostEqual(report.removed_weight, 0.4)
        self.assertEqual(report.instance.n_scenarios, 1)
        self.assertAlmostEqual(report.instance.scenarios[0].weight, 1.0)
        self.assertEqual(report.instance_hash, instance.with_scenarios([0]).instance_hash())

        refined_optimum = brute_force_oracle(report.instance).value
        self.assertLessEqual(report.best_bound, refined_optimum + 1e-6)
        self.assertGreaterEqual(report.upper_bound, refined_optimum - 1e-6)
        self.assertLess(report.upper_bound, brute_force_oracle(instance).value)


@pytest.mark.parametrize("kappa", [1, 2, "all"])
@pytest.mark.parametrize("seed", factories.TINY_SEEDS)
def test_tiny_suite_sandwich(seed, kappa):
    instance = factories.seeded_tiny(seed)
    kappa = instance.n_scenarios if kappa == "all" else kappa
    report = run(instance, Scs4bParams.from_config(kappa=kappa, seed=seed, jobs=1))
    assert report.status in (STATUS_OK, STATUS_NO_INCUMBENT, STATUS_EMPTY_POOL)
    if report.upper_bound is None:
        return
    refined = report.instance
    optimum = brute_force_oracle(refined).value if report.removed_scenarios else factories.tiny_optimum(seed)
    assert report.upper_bound >= optimum - 1e-6
    if report.best_bound is not None:
        assert report.best_bound <= optimum + 1e-6
    assert check_feasibility(refined, report.design, report.assignments) == []
    assert report.out == 0


@pytest.mark.slow
def test_generated_instance_run():
    instance = generate_bsc(BscSpec(8, 4, seed=11, name="I1"))
    params = Scs4bParams.from_config(kappa=2, seed=0, jobs=1, time_limit=5.0, bound_option="none")
    report = run(instance, params)
    refined = report.instance
    assert report.status in (STATUS_OK, STATUS_NO_INCUMBENT, STATUS_EMPTY_POOL)
    if report.design is not None:
        assert check_feasibility(refined, report.design, report.assignments) == []
        assert report.trials
