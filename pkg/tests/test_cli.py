"""
Command-line tests: exit codes, artifacts, validation messages, comparison and the run index.
"""
import io
import json
import os
import shutil
import tempfile
from contextlib import redirect_stdout, redirect_stderr
from pathlib import Path
from tester_base import SuiteTester, SCENARIO_DIR, scenario_data
from src.cli import main as cli_main
from src.config.constants import (ARTIFACT_EQUILIBRIUM, ARTIFACT_FLOW, ARTIFACT_INITIAL_MEASURE, ARTIFACT_CERTIFICATE,
                                  ARTIFACT_TRACE, ARTIFACT_TIMINGS, ARTIFACT_VALUE_GRID, ARTIFACT_SCENARIO,
                                  ARTIFACT_UNIQUENESS, UNIQUENESS_SKIPPED_PRECONDITION)
from src.data import ArtifactRepository, RunRepository
from src.services.registry_service import RegistryService
from src.services.scenario_service import ScenarioService
from src.domains import DiscDomain
from src.lagrangians import QuadraticLagrangian
from src.couplings import ZeroCoupling
from src.exceptions import ScenarioValidationError


def invoke(argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = cli_main(argv)
    return code, out.getvalue(), err.getvalue()


class CliTester(SuiteTester):
    title = "Command line"

    def __init__(self):
        super().__init__()
        self.workspace = tempfile.TemporaryDirectory()
        self.root = Path(self.workspace.name)
        self.db_path = str(self.root / "runs.db")
        os.environ["MFG_RUNS_DB"] = self.db_path
        os.environ.setdefault("MFG_NUM_THREADS", "2")
        self.trivial = str(SCENARIO_DIR / "trivial.json")

    def write_scenario(self, name, data):
        path = self.root / f"{name}.json"
        path.write_text(json.dumps(data))
        return str(path)

    def case_1_run(self):
        self.section("TEST 1: run")
        out_dir = self.root / "trivial_a"

        def converged():
            code, stdout, _ = invoke(["run", "--scenario", self.trivial, "--out", str(out_dir), "--uniqueness-check"])
            assert code == 0, stdout
            summary = json.loads(stdout)
            assert summary["converged"] is True
            assert summary["exploitability"] <= 1e-12
            assert summary["uniqueness"] == UNIQUENESS_SKIPPED_PRECONDITION
        self.check("Trivial scenario exits 0", converged)

        def artifacts():
            for name in (ARTIFACT_EQUILIBRIUM, ARTIFACT_FLOW, ARTIFACT_INITIAL_MEASURE, ARTIFACT_CERTIFICATE,
                         ARTIFACT_TRACE, ARTIFACT_TIMINGS, ARTIFACT_VALUE_GRID, ARTIFACT_SCENARIO,
                         ARTIFACT_UNIQUENESS):
                assert (out_dir / name).is_file(), name
        self.check("Every artifact is written", artifacts)

        def round_trip():
            repository = ArtifactRepository(out_dir)
            certificate = repository.load_certificate()
            assert all(certificate.pass_fail_fields().values())
            assert certificate.dp_residual == 0.0
            eta = repository.load_equilibrium()
            assert eta.size == 3
            assert len(repository.load_flow()) == eta.grid.size
            assert len(repository.load_trace()) == certificate.iterations
            assert repository.load_value_grid(eta.grid).flagged == 0
            assert repository.load_uniqueness().status == UNIQUENESS_SKIPPED_PRECONDITION
        self.check("Artifacts load back with the same pass/fail fields", round_trip)

        def determinism():
            second = self.root / "trivial_b"
            code, _, _ = invoke(["run", "--scenario", self.trivial, "--out", str(second), "--no-record"])
            assert code == 0
            for name in (ARTIFACT_TRACE, ARTIFACT_FLOW, ARTIFACT_VALUE_GRID, ARTIFACT_EQUILIBRIUM):
                assert (out_dir / name).read_bytes() == (second / name).read_bytes(), name
        self.check("Equal seeds give byte-identical artifacts", determinism)

        def compare():
            code, stdout, _ = invoke(["compare", str(out_dir), str(self.root / "trivial_b")])
            assert code == 0
            report = json.loads(stdout)
            assert report["u_sup_diff"] == 0.0
            assert all(d == 0.0 for d in report["d1_per_time"])
            assert report["passed"] is None
        self.check("Comparing identical runs gives zero differences", compare)

        def history():
            runs = RunRepository(self.db_path).list_runs(scenario="trivial")
            assert len(runs) == 1
            assert runs[0]["converged"] is True
            assert runs[0]["exit_code"] == 0
            code, stdout, _ = invoke(["history", "--scenario", "trivial"])
            assert code == 0 and "trivial" in stdout
        self.check("Recorded runs appear in the history", history)

        def run_index():
            repository = RunRepository(self.db_path)
            assert repository.get_run_count() == 1
            assert repository.get_run_count(scenario="lq") == 0
            run_id = repository.list_runs(scenario="trivial")[0]["id"]
            record = repository.get_run_by_id(run_id)
            assert record["scenario"] == "trivial" and record["output_dir"] == str(out_dir), record
            assert repository.delete_run(run_id)
            assert repository.get_run_by_id(run_id) is None
            assert repository.get_run_count(scenario="trivial") == 0
            assert not repository.delete_run(run_id)
        self.check("Runs can be fetched by id, counted and deleted", run_index)

    def case_2_validation(self):
        self.section("TEST 2: validation errors")

        def infeasible_atom():
            data = scenario_data("trivial")
            data["initial_measure"][1]["point"] = [1.5, 0.0]
            path = self.write_scenario("outside", data)
            code, _, stderr = invoke(["run", "--scenario", path, "--out", str(self.root / "outside"), "--no-record"])
            assert code == 1
            assert "initial_measure[1].point" in stderr, stderr
            assert not (self.root / "outside" / ARTIFACT_EQUILIBRIUM).exists()
        self.check("Atom outside the domain exits 1 and names the atom", infeasible_atom)

        def field_paths():
            data = scenario_data("trivial")
            data["initial_measure"][0]["weight"] = -1.0
            data["time_steps"] = 0
            try:
                ScenarioService.parse(data)
            except ScenarioValidationError as e:
                paths = [path for path, _ in e.issues]
                assert "initial_measure[0].weight" in paths, paths
                assert "time_steps" in paths, paths
                return
            raise AssertionError("invalid scenario accepted")
        self.check("Schema errors carry field paths", field_paths)

        def unknown_component():
            data = scenario_data("trivial", running_coupling={"name": "no_such_coupling"})
            path = self.write_scenario("unknown", data)
            code, _, stderr = invoke(["run", "--scenario", path, "--out", str(self.root / "unknown"), "--no-record"])
            assert code == 1
            assert "running_coupling.name" in stderr
        self.check("Unknown component names exit 1", unknown_component)

        def missing_file():
            code, _, stderr = invoke(["run", "--scenario", str(self.root / "absent.json"),
                                      "--out", str(self.root / "absent"), "--no-record"])
            assert code == 1 and "not found" in stderr
        self.check("Missing scenario file exits 1", missing_file)

        def assumption():
            path = self.write_scenario("speed", scenario_data("trivial", lagrangian={"name": "speed"}))
            code, _, stderr = invoke(["run", "--scenario", path, "--out", str(self.root / "speed"), "--no-record"])
            assert code == 1
            assert "AssumptionViolationError" in stderr
        self.check("Non-coercive Lagrangian exits 1", assumption)

        def tampered_artifacts():
            source, target = self.root / "trivial_a", self.root / "tampered"
            shutil.copytree(source, target)
            data = json.loads((target / ARTIFACT_EQUILIBRIUM).read_text())
            data["initial_marginal"]["weights"][0] *= 2.0
            (target / ARTIFACT_EQUILIBRIUM).write_text(json.dumps(data))
            code, _, stderr = invoke(["compare", str(source), str(target)])
            assert code == 1
            assert "InvalidMeasureError" in stderr, stderr
        self.check("Corrupted artifacts exit 1 with the error name", tampered_artifacts)

    def case_3_components(self):
        self.section("TEST 3: components")

        def listing():
            code, stdout, _ = invoke(["components"])
            assert code == 0
            for name in ("disc", "levelset", "quadratic", "convolution", "target"):
                assert name in stdout, name
        self.check("Registered components are listed", listing)

        def registered():
            class UnitDisc(DiscDomain):
                """Disc registered under a custom kind."""
                kind = "unit_disc"

            class Kinetic(QuadraticLagrangian):
                """Quadratic Lagrangian registered under a custom name."""
                name = "kinetic"

            class Silent(ZeroCoupling):
                """Zero coupling registered under a custom name."""
                name = "silent"

            RegistryService.register_domain("unit_disc", UnitDisc)
            RegistryService.register_lagrangian("kinetic", Kinetic)
            RegistryService.register_coupling("silent", Silent)
            try:
                data = scenario_data("trivial", lagrangian={"name": "kinetic", "params": {"scale": 1.0}},
                                     running_coupling={"name": "silent"}, terminal_coupling={"name": "silent"})
                data["domain"]["kind"] = "unit_disc"
                scenario = ScenarioService.build(ScenarioService.parse(data))
                assert isinstance(scenario.domain, UnitDisc)
                assert isinstance(scenario.lagrangian, Kinetic)
                assert isinstance(scenario.running, Silent) and isinstance(scenario.terminal, Silent)
                path = self.write_scenario("registered", data)
                code, stdout, _ = invoke(["run", "--scenario", path, "--out", str(self.root / "registered"),
                                          "--no-record"])
                assert code == 0, stdout
                assert json.loads(stdout)["exploitability"] <= 1e-12
                code, stdout, _ = invoke(["components"])
                for name in ("unit_disc", "kinetic", "silent"):
                    assert name in stdout, name
            finally:
                for kind, name in (("domain", "unit_disc"), ("lagrangian", "kinetic"), ("coupling", "silent")):
                    RegistryService._registered[kind].pop(name, None)
        self.check("Registered components resolve from scenario files", registered)

    def run_all(self):
        try:
            return super().run_all()
        finally:
            self.workspace.cleanup()


def main():
    tester = CliTester()
    return 0 if tester.run_all() else 1


def test_cli_suite():
    assert main() == 0


if __name__ == "__main__":
    raise SystemExit(main())
