"""
Tests for the linearized model and its LP/MPS export
"""

import unittest

import numpy as np
import pytest

import factories
from core.model import FirstStageDesign, ScenarioAssignment, check_feasibility, evaluate_solution
from core.utils.exceptions import ModelExportError
from modules.lip import (
    BINARY,
    MILPBuilder,
    assemble,
    assignments_from_vector,
    build_lip,
    count_dims,
    design_from_vector,
    lift_solution,
    outsourcing_flags,
    parse_symbol,
    read_lp,
    symbol_name,
    write_lp,
    write_mps,
)
from modules.lip.milp import LE


def _binary_count(instance):
    """Level columns plus flags and assignment columns over the eligible domains"""
    levels = sum(d.n_levels for d in instance.strip_doors + instance.stack_doors)
    per_scenario = 0
    for w, scen in enumerate(instance.scenarios):
        per_scenario += 2
        per_scenario += sum(len(instance.eligible_strip_doors(m, w)) + 1 for m in range(scen.n_origins))
        per_scenario += sum(len(instance.eligible_stack_doors(n, w)) + 1 for n in range(scen.n_destinations))
    return levels + per_scenario


class TestBuildLip(unittest.TestCase):
    """Structure of the full model"""

    def setUp(self):
        self.instance = factories.tiny_instance()
        self.milp = build_lip(self.instance)

    def test_binary_count_formula(self):
        self.assertEqual(count_dims(self.milp).n_binary, _binary_count(self.instance))

    def test_continuous_count(self):
        """One product column per (m, i, n, j), outsourcing doors included"""
        self.assertEqual(count_dims(self.milp).n_continuous, 2 * (2 * 3) ** 2)

    def test_symbols_round_trip_names(self):
        for symbol, col in self.milp.symbols.items():
            self.assertEqual(self.milp.names[col], symbol_name(symbol))
            self.assertEqual(parse_symbol(symbol_name(symbol)), symbol)

    def test_foreign_name(self):
        self.assertIsNone(parse_symbol("slack_3"))

    def test_no_level_zero_columns(self):
        self.assertNotIn(("a", 1, 0), self.milp.symbols)
        self.assertIn(("a", 1, 1), self.milp.symbols)

    def test_lifted_solution_is_feasible_and_priced(self):
        """The model objective of a lifted point equals the direct evaluation"""
        design = FirstStageDesign({1: 2}, {1: 2})
        assignments = [ScenarioAssignment.from_maps([1, 1], [1, 1])] * 2
        vector = self.milp.vector_from_symbols(lift_solution(self.instance, design, assignments))
        self.assertTrue(self.milp.is_feasible(vector))
        self.assertAlmostEqual(self.milp.evaluate(vector),
                               evaluate_solution(self.instance, design, assignments).total)

    def test_lifted_outsourcing_point(self):
        design = FirstStageDesign({1: 2}, {})
        assignments = [ScenarioAssignment.from_maps([1, 0], [0, 0])] * 2
        vector = self.milp.vector_from_symbols(lift_solution(self.instance, design, assignments))
        self.assertTrue(self.milp.is_feasible(vector))
        self.assertAlmostEqual(self.milp.evaluate(vector),
                               evaluate_solution(self.instance, design, assignments).total)
        self.assertEqual(outsourcing_flags(self.milp, vector), {0: 2, 1: 2})

    def test_capacity_row_catches_overload(self):
        """Level 1 holds 30; the second scenario sends 40 through strip door 1"""
        design = FirstStageDesign({1: 1}, {1: 2})
        assignments = [ScenarioAssignment.from_maps([1, 1], [1, 1])] * 2
        vector = self.milp.vector_from_symbols(lift_solution(self.instance, design, assignments))
        self.assertIn("cap_strip_w1_1", self.milp.violated_rows(vector))

    def test_reading_back_design_and_assignments(self):
        design = FirstStageDesign({1: 2, 2: 1}, {2: 2})
        assignments = [ScenarioAssignment.from_maps([1, 2], [2, 2]), ScenarioAssignment.from_maps([1, 1], [2, 2])]
        lifted = lift_solution(self.instance, design, assignments)
        vector = self.milp.vector_from_symbols(lifted)
        self.assertEqual(self.milp.symbols_of(vector), {s: v for s, v in lifted.items() if v})
        self.assertEqual(design_from_vector(self.milp, vector), design)
        self.assertEqual(assignments_from_vector(self.milp, self.instance, vector, [0, 1]), assignments)


class TestAssemble(unittest.TestCase):
    """Submodel variants built from the same routine"""

    def setUp(self):
        self.instance = factories.tiny_instance()

    def test_door_subset(self):
        milp = assemble(self.instance, [0], [1.0], strip_doors=[1], stack_doors=[2])
        self.assertIn(("a", 1, 1), milp.symbols)
        self.assertNotIn(("a", 2, 1), milp.symbols)
        self.assertIn(("b", 2, 1), milp.symbols)

    def test_strip_side_only(self):
        milp = assemble(self.instance, [0, 1], [0.5, 0.5], sides=("strip",), operational_share=0.5)
        kinds = {symbol[0] for symbol in milp.symbols}
        self.assertNotIn("y", kinds)
        self.assertNotIn("b", kinds)
        self.assertIn("x", kinds)

    def test_operational_share_halves_products(self):
        full = assemble(self.instance, [0], [1.0])
        half = assemble(self.instance, [0], [1.0], operational_share=0.5)
        v = ("v", 0, 0, 1, 0, 1)
        self.assertAlmostEqual(half.objective[half.symbols[v]], 0.5 * full.objective[full.symbols[v]])


class TestExport(unittest.TestCase):
    """LP and MPS text"""

    def setUp(self):
        self.milp = build_lip(factories.tiny_instance())

    def test_lp_sections_and_length(self):
        with self._temp() as directory:
            path = write_lp(self.milp, directory / "tiny.lp")
            text = path.read_text()
        for section in ("Minimize", "Subject To", "Bounds", "Binaries", "End"):
            self.assertIn(section, text)
        self.assertGreater(len(text.splitlines()), self.milp.n_rows)

    def test_read_back_keeps_dimensions(self):
        with self._temp() as directory:
            parsed = read_lp(write_lp(self.milp, directory / "tiny.lp"))
        self.assertEqual(count_dims(parsed), count_dims(self.milp))
        self.assertEqual(set(parsed.names), set(self.milp.names))
        objective = dict(zip(parsed.names, parsed.objective))
        for name, value in zip(self.milp.names, self.milp.objective):
            self.assertAlmostEqual(objective[name], value)

    def test_mps_markers(self):
        with self._temp() as directory:
            text = write_mps(self.milp, directory / "tiny.mps").read_text()
        self.assertTrue(text.startswith("NAME"))
        self.assertIn("'INTORG'", text)
        self.assertTrue(text.rstrip().endswith("ENDATA"))

    def test_unwritable_target(self):
        with self._temp() as directory:
            blocker = directory / "file"
            blocker.write_text("")
            with self.assertRaises(ModelExportError):
                write_lp(self.milp, blocker / "model.lp")

    @staticmethod
    def _temp():
        import tempfile
        from contextlib import contextmanager
        from pathlib import Path

        @contextmanager
        def directory():
            with tempfile.TemporaryDirectory() as name:
                yield Path(name)

        return directory()


def test_empty_rows_dropped():
    builder = MILPBuilder("empty")
    a = builder.add_var("a", BINARY, 1.0)
    assert not builder.add_row("nothing", [(a, 0.0)], LE, 1.0)
    assert builder.add_row("one", [(a, 1.0)], LE, 1.0)
    milp = builder.build()
    assert milp.n_rows == 1
    assert milp.is_feasible(np.array([1.0]))
    assert not milp.is_feasible(np.array([0.5]))


@pytest.mark.parametrize("name", ["a_i1_k2", "b0_w3", "v_w0_m1_i0_n2_j3", "y_w2_n0_j1"])
def test_parse_symbol_inverts_names(name):
    assert symbol_name(parse_symbol(name)) == name


def _random_point(instance, rng):
    """Random design with levels 1..|K| or nothing, nodes on installed eligible doors or outsourced"""
    def levels(doors):
        picks = {d: int(rng.integers(0, doors[d - 1].n_levels + 1)) for d in range(1, len(doors) + 1)}
        return {d: k for d, k in picks.items() if k}

    design = FirstStageDesign(levels(instance.strip_doors), levels(instance.stack_doors))
    strip_open, stack_open = set(design.strip_level), set(design.stack_level)
    assignments = []
    for w, scen in enumerate(instance.scenarios):
        x = [int(rng.choice(sorted(instance.eligible_strip_doors(m, w) & strip_open) + [0]))
             for m in range(scen.n_origins)]
        y = [int(rng.choice(sorted(instance.eligible_stack_doors(n, w) & stack_open) + [0]))
             for n in range(scen.n_destinations)]
        assignments.append(ScenarioAssignment.from_maps(x, y))
    return design, assignments


@pytest.mark.parametrize("seed", factories.TINY_SEEDS)
def test_lifted_random_points_match_direct_evaluation(seed):
    """Every feasible random point lifts to a feasible model point with the same objective"""
    instance = factories.seeded_tiny(seed)
    milp = build_lip(instance)
    rng = np.random.default_rng(seed)
    checked = 0
    for _ in range(50):
        design, assignments = _random_point(instance, rng)
        if check_feasibility(instance, design, assignments):
            continue
        vector = milp.vector_from_symbols(lift_solution(instance, design, assignments))
        assert milp.is_feasible(vector)
        assert milp.evaluate(vector) == pytest.approx(evaluate_solution(instance, design, assignments).total,
                                                      rel=1e-9)
        checked += 1
    assert checked > 0
