"""
Import smoke suite for cddp-toolkit
Every module under src/ must import cleanly; run directly for a summary
"""

import importlib
import pkgutil
import sys
import unittest
from pathlib import Path

# Add the src directory to Python path to import modules
SRC_PATH = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(SRC_PATH))

PACKAGES = ("core", "modules", "cli", "ui")


def discover_modules():
    """Dotted names of every module in the toolkit packages"""
    found = []
    for package in PACKAGES:
        found.append(package)
        for info in pkgutil.walk_packages([str(SRC_PATH / package)], prefix=f"{package}."):
            found.append(info.name)
    return sorted(found)


class TestPublicSurface(unittest.TestCase):
    """Names the command line and the tests rely on"""

    def test_model_exports(self):
        from core.model import Instance, evaluate_solution, load_instance

        self.assertTrue(callable(evaluate_solution))
        self.assertTrue(callable(load_instance))
        self.assertIsNotNone(Instance)

    def test_solver_exports(self):
        from modules.solvers import brute_force_oracle, solve_bb, solve_omega

        for func in (brute_force_oracle, solve_bb, solve_omega):
            self.assertTrue(callable(func))

    def test_command_registry(self):
        from cli.commands import default_registry

        names = {command.name for command in default_registry().list_commands()}
        self.assertEqual(names, {"generate", "merge", "dims", "export-lip", "bounds",
                                 "scs4b", "oracle", "solve-omega"})


class AllModuleImportTests(unittest.TestCase):
    """One import test per discovered module"""


def _make_test(module_name):
    def test_module(self):
        importlib.import_module(module_name)

    return test_module


for _name in discover_modules():
    setattr(AllModuleImportTests, f"test_import_{_name.replace('.', '_')}", _make_test(_name))


def run_all_tests():
    """Run the smoke suite and return the result"""
    loader = unittest.TestLoader()
    suite = unittest.TestSuite()
    suite.addTests(loader.loadTestsFromTestCase(TestPublicSurface))
    suite.addTests(loader.loadTestsFromTestCase(AllModuleImportTests))
    return unittest.TextTestRunner(verbosity=2).run(suite)


if __name__ == "__main__":
    print("Running import smoke suite for cddp-toolkit...")
    print("=" * 70)

    result = run_all_tests()

    print("\n" + "=" * 70)
    print(f"Tests run: {result.testsRun}")
    print(f"Failures: {len(result.failures)}")
    print(f"Errors: {len(result.errors)}")

    if result.wasSuccessful():
        print("\nAll tests passed! [PASS]")
    else:
        print("\nSome tests failed or had errors. [FAIL]")

    sys.exit(0 if result.wasSuccessful() else 1)
