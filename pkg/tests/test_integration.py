"""
Integration tests for cddp-toolkit
Configuration, logging and the generate / bound / solve pipeline working together
"""

import json
import logging
import sys
import unittest
from pathlib import Path

import yaml

from core.model import check_feasibility, load_design, load_instance, save_design, save_instance
from core.utils.config import (
    ConfigManager,
    get_algorithm_config,
    get_config_manager,
    get_solver_config,
    reset_config_manager,
)
from core.utils.logging import SolverLogger, get_logger
from modules.decomposition import generate_clusters, solve_cluster_bounds
from modules.scs4b import STATUS_OK, Scs4bParams, run
from modules.solvers import brute_force_oracle
from modules.testbed import BscSpec, generate_bsc

# Add the src directory to Python path to import modules
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))


class TestConfigIntegration(unittest.TestCase):
    """Packaged defaults, user files and runtime overrides"""

    def tearDown(self):
        reset_config_manager()

    def test_packaged_defaults(self):
        config = ConfigManager()
        self.assertEqual(config.algorithm_config.kappa, 2)
        self.assertEqual(config.operational_config.report_format, "csv")
        self.assertEqual(list(config.testbed_config.slack_set), [5, 10, 15, 20, 30])

    def test_yaml_file_overrides_defaults(self):
        with self._temp_file("cddp.yaml") as path:
            path.write_text(yaml.safe_dump({"algorithm": {"kappa": 4}, "solver": {"unknown_key": 1}}))
            reset_config_manager(str(path))
            self.assertEqual(get_algorithm_config().kappa, 4)
            self.assertEqual(get_algorithm_config().rho, 0.0)
            self.assertFalse(hasattr(get_solver_config(), "unknown_key"))

    def test_json_file(self):
        with self._temp_file("cddp.json") as path:
            path.write_text(json.dumps({"solver": {"time_limit": 5.0}}))
            reset_config_manager(str(path))
            self.assertEqual(get_solver_config().time_limit, 5.0)

    def test_settings_round_trip_through_file(self):
        manager = get_config_manager()
        manager.set_setting("algorithm", "rho", 0.25)
        with self._temp_file("saved.yaml") as path:
            manager.save_config(str(path))
            self.assertEqual(ConfigManager(str(path)).get_setting("algorithm", "rho"), 0.25)

    def test_params_follow_config(self):
        get_config_manager().set_setting("algorithm", "escalation", "literal")
        self.assertEqual(Scs4bParams.from_config().escalation, "literal")

    @staticmethod
    def _temp_file(name):
        import tempfile
        from contextlib import contextmanager

        @contextmanager
        def temp():
            with tempfile.TemporaryDirectory() as directory:
                yield Path(directory) / name

        return temp()


class TestLoggingIntegration(unittest.TestCase):
    """Solver logger setup and audit helpers"""

    def test_level_from_config(self):
        logger = SolverLogger("cddp-test")
        self.assertEqual(logger.logger.level, logging.WARNING)
        logger.set_level("debug")
        self.assertEqual(logger.logger.level, logging.DEBUG)

    def test_audit_messages(self):
        logger = SolverLogger("cddp-audit")
        logger.set_level("INFO")
        with self.assertLogs("cddp-audit", level="INFO") as captured:
            logger.audit_solve("bb", "optimal", 12.5, 12.5, 0.01)
            logger.audit_trial("0", "accepted", 100.0, 0)
        self.assertIn("SOLVE: bb status=optimal value=12.5", captured.output[0])
        self.assertIn("TRIAL: cluster=0 decision=accepted", captured.output[1])

    def test_global_logger_is_shared(self):
        self.assertIs(get_logger(), get_logger())


class TestPipeline(unittest.TestCase):
    """Generate, store, bound and solve one small instance"""

    def test_generate_bound_solve(self):
        import tempfile

        instance = generate_bsc(BscSpec(2, 2, seed=3, slack_set=(5, 20, 30), density=0.5, n_levels=2, name="p"))
        with tempfile.TemporaryDirectory() as directory:
            path = save_instance(instance, Path(directory) / "p.json")
            loaded = load_instance(path)
            self.assertEqual(loaded.instance_hash(), instance.instance_hash())

            bound = solve_cluster_bounds(loaded, generate_clusters(loaded, kappa=1), option=1, jobs=1)
            report = run(loaded, Scs4bParams.from_config(kappa=1, jobs=1))
            if report.status != STATUS_OK:
                return
            design_path = save_design(report.design, Path(directory) / "design.json")
            self.assertEqual(load_design(design_path), report.design)

        self.assertEqual(check_feasibility(report.instance, report.design, report.assignments), [])
        optimum = brute_force_oracle(report.instance).value
        self.assertGreaterEqual(report.upper_bound, optimum - 1e-6)
        if not report.removed_scenarios:
            self.assertLessEqual(bound.value, optimum + 1e-6)


if __name__ == "__main__":
    unittest.main(verbosity=2)
