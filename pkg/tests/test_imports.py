"""
Test script for validating all imports and __init__ files
Ensures all modules can be imported without errors
"""
import importlib
from pathlib import Path
from tester_base import SuiteTester, project_root


class ImportTester(SuiteTester):
    title = "Import Validation"

    def import_all(self, modules):
        for module in modules:
            self.check(f"Testing {module}", lambda module=module: importlib.import_module(module))

    def case_1_core_modules(self):
        self.section("TEST 1: Core Modules")
        self.import_all([
            "src.core.domain_skeleton",
            "src.core.lagrangian_skeleton",
            "src.core.coupling_skeleton",
            "src.core.arcs",
            "src.core.measures",
            "src.core.costs",
            "src.core.scenario",
            "src.core.best_response",
            "src.core.equilibrium",
            "src.core.mild_solution",
        ])

    def case_2_component_modules(self):
        self.section("TEST 2: Domains, Lagrangians and Couplings")
        for package in ("domains", "lagrangians", "couplings"):
            directory = project_root / "src" / package
            for path in sorted(directory.glob("*.py")):
                if not path.name.startswith("__"):
                    self.import_all([f"src.{package}.{path.stem}"])

    def case_3_service_modules(self):
        self.section("TEST 3: Service, Data and CLI Modules")
        self.import_all([
            "src.services.registry_service",
            "src.services.scenario_service",
            "src.services.run_service",
            "src.services.compare_service",
            "src.data.artifact_repository",
            "src.data.run_repository",
            "src.cli.main",
        ])

    def case_4_support_modules(self):
        self.section("TEST 4: Config, Exceptions, Models and Utils")
        self.import_all([
            "src.config",
            "src.config.constants",
            "src.config.solver_config",
            "src.config.run_config",
            "src.exceptions",
            "src.exceptions.base",
            "src.exceptions.geometry_errors",
            "src.exceptions.solver_errors",
            "src.exceptions.data_errors",
            "src.models",
            "src.models.scenario",
            "src.models.reports",
            "src.utils",
            "src.utils.solver_logger",
            "src.utils.parallel",
        ])

    def case_5_init_exports(self):
        self.section("TEST 5: __init__ Exports Validation")
        packages = ["src", "src.core", "src.domains", "src.lagrangians", "src.couplings", "src.services",
                    "src.data", "src.models", "src.exceptions", "src.cli"]
        for name in packages:
            def exports(name=name):
                package = importlib.import_module(name)
                assert hasattr(package, '__all__'), "no __all__ defined"
                missing = [e for e in package.__all__ if not hasattr(package, e)]
                assert not missing, f"missing exports {missing}"
            self.check(f"Testing {name}.__all__", exports)

    def case_6_exception_hierarchy(self):
        self.section("TEST 6: Exception Hierarchy")

        def rooted():
            import src.exceptions as exc
            for name in exc.__all__:
                assert issubclass(getattr(exc, name), exc.ConstrainedMFGError), name
        self.check("Every exported error derives from ConstrainedMFGError", rooted)


def main():
    tester = ImportTester()
    return 0 if tester.run_all() else 1


def test_import_suite():
    assert main() == 0


if __name__ == "__main__":
    raise SystemExit(main())
