"""
Equilibrium tests: fictitious play on small scenarios and certificate recomputation.
"""
import numpy as np
from tester_base import SuiteTester, close, scenario_data, build_scenario
from src.core.arcs import TimeGrid
from src.core.best_response import best_response
from src.core.equilibrium import FictitiousPlaySolver, holder_check, rebase, solve, verify
from src.core.measures import ArcMeasure, flow
from src.exceptions import AssumptionViolationError, GridMismatchError


class EquilibriumTester(SuiteTester):
    title = "Equilibrium"

    def case_1_trivial(self):
        self.section("TEST 1: Trivial scenario")
        scenario = build_scenario(scenario_data("trivial"))

        def exact():
            eta, certificate = solve(scenario)
            assert certificate.exploitability <= 1e-12
            assert certificate.converged
            assert certificate.checks_passed
            assert certificate.iterations == 1
            assert np.array_equal(eta.nodes, ArcMeasure.constant(scenario.initial_measure, scenario.grid).nodes)
        self.check("Constant arcs solve the uncoupled game at iteration 0", exact)

        def certificate_fields():
            _, certificate = solve(scenario)
            fields = certificate.pass_fail_fields()
            assert all(fields.values()), fields
            assert certificate.energy.max_energy == 0.0
            assert certificate.holder.worst_slack >= 0.0
        self.check("Every certificate check passes", certificate_fields)

        def bad_marginal():
            eta = ArcMeasure.constant(scenario.initial_measure, scenario.grid)
            skewed = ArcMeasure(eta.grid, eta.nodes, [0.4, 0.4, 0.2], eta.initial_marginal, check=False)
            certificate = verify(skewed, scenario)
            assert not certificate.marginal.passed
            close(certificate.marginal.max_deviation, 0.1, 1e-12)
        self.check("A wrong start split fails the marginal check", bad_marginal)

        def grid_mismatch():
            other = ArcMeasure.constant(scenario.initial_measure, TimeGrid(1.0, 4))
            try:
                rebase(other, scenario)
            except GridMismatchError:
                return
            raise AssertionError("measure on another grid accepted")
        self.check("Certificates require the scenario grid", grid_mismatch)

    def case_2_single_atom(self):
        self.section("TEST 2: Single-atom pull")
        data = scenario_data("lq", initial_measure=[{"point": [-1.0, 0.5], "weight": 1.0}])
        scenario = build_scenario(data)

        def matches_best_response():
            eta, certificate = solve(scenario)
            assert certificate.converged, certificate.exploitability
            m0 = scenario.initial_measure
            direct = best_response(m0.points[0], [m0] * scenario.grid.size, scenario.lagrangian,
                                   scenario.running, scenario.terminal, scenario.domain, scenario.grid)
            best = int(np.argmax(eta.weights))
            assert np.max(np.linalg.norm(eta.nodes[best] - direct.arc.nodes, axis=1)) <= 1e-4
        self.check("Equilibrium arc is the best response to a measure-free cost", matches_best_response)

        def random_start():
            config = scenario.solver.model_copy(update={'initialization': 'random'})
            solver = FictitiousPlaySolver(scenario, config)
            eta = solver.initial_measure()
            assert eta.marginal_deviation() <= 1e-15
            assert all(arc.is_feasible(scenario.domain) for arc in eta.arcs)
        self.check("Random initialization respects m0 and the domain", random_start)

    def case_3_solver_rules(self):
        self.section("TEST 3: Solver rules")
        scenario = build_scenario(scenario_data("trivial"))

        def damping():
            harmonic = FictitiousPlaySolver(scenario)
            assert [harmonic.alpha(k) for k in range(3)] == [1.0, 0.5, 1.0 / 3.0]
            fixed = FictitiousPlaySolver(scenario, scenario.solver.model_copy(
                update={'damping': 'fixed', 'fixed_alpha': 0.25}))
            assert fixed.alpha(7) == 0.25
        self.check("Harmonic and fixed damping", damping)

        def assumption():
            data = scenario_data("trivial", lagrangian={"name": "speed"})
            try:
                FictitiousPlaySolver(build_scenario(data)).run()
            except AssumptionViolationError as e:
                assert 'L2' in str(e)
                return
            raise AssertionError("non-coercive Lagrangian accepted")
        self.check("Non-coercive Lagrangian raises AssumptionViolationError", assumption)

        def holder():
            eta = ArcMeasure.constant(scenario.initial_measure, scenario.grid)
            check = holder_check(eta, 1.0)
            assert check.passed
            assert check.exact_pairs == 0
            assert check.pairs_checked == scenario.grid.size * (scenario.grid.size - 1) // 2
        self.check("Hoelder check counts every pair of grid times", holder)

        def holder_tight():
            data = scenario_data("lq", initial_measure=[{"point": [-1.0, 0.5], "weight": 1.0}])
            lq = build_scenario(data)
            eta, certificate = solve(lq)
            assert not holder_check(eta, 1e-3).passed
            assert certificate.holder.passed
            assert len(flow(eta)) == lq.grid.size
        self.check("A moving equilibrium fails an undersized Hoelder constant", holder_tight)


def main():
    tester = EquilibriumTester()
    return 0 if tester.run_all() else 1


def test_equilibrium_suite():
    assert main() == 0


if __name__ == "__main__":
    raise SystemExit(main())
