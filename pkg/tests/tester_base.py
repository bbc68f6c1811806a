"""
Shared scaffolding for the script-style suites.

Each suite subclasses SuiteTester, groups cases under "=" headers and runs them
through check(), which prints [OK]/[FAIL] and counts results.
"""
import json
import os
import sys
import traceback
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

SCENARIO_DIR = project_root / "scenarios"


def slow_enabled():
    return os.environ.get("MFG_RUN_SLOW") == "1"


class SuiteTester:
    title = "Suite"

    def __init__(self):
        self.passed = 0
        self.failed = 0
        self.skipped = 0
        self.errors = []

    def section(self, title):
        print("\n" + "=" * 60)
        print(title)
        print("=" * 60)

    def check(self, description, func):
        """Run one case; func raises AssertionError (or anything else) on failure."""
        print(f"  {description}...", end=" ")
        try:
            func()
            print("[OK]")
            self.passed += 1
            return True
        except Exception as e:
            print("[FAIL]")
            print(f"    Error: {type(e).__name__}: {e}")
            if not isinstance(e, AssertionError):
                traceback.print_exc()
            self.failed += 1
            self.errors.append(f"{description}: {e}")
            return False

    def skip(self, description, reason):
        print(f"  {description}... [SKIP] {reason}")
        self.skipped += 1

    def cases(self):
        return [getattr(self, name) for name in sorted(dir(self))
                if name.startswith("case_") and callable(getattr(self, name))]

    def run_all(self):
        print("\n" + "=" * 60)
        print(self.title.upper())
        print("=" * 60)
        for case in self.cases():
            case()
        return self.print_summary()

    def print_summary(self):
        print("\n" + "=" * 60)
        print("SUMMARY")
        print("=" * 60)
        print(f"  Passed:  {self.passed}")
        print(f"  Failed:  {self.failed}")
        if self.skipped:
            print(f"  Skipped: {self.skipped}")
        if self.errors:
            print("\nFailures:")
            for error in self.errors:
                print(f"  - {error}")
        return self.failed == 0


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a!r} != {b!r} (tol {tol:g})"


def scenario_data(name, **overrides):
    """Scenario JSON from scenarios/ as a dict, top-level keys replaced by overrides."""
    data = json.loads((SCENARIO_DIR / f"{name}.json").read_text())
    data.update(overrides)
    return data


def build_scenario(data, seed=None):
    from src.services.scenario_service import ScenarioService
    return ScenarioService.build(ScenarioService.parse(data), seed=seed)
