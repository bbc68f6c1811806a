"""
Value-function tests: exact terminal layer, the quadratic-pull oracle, dynamic-programming
residuals and the uniqueness gate.
"""
import numpy as np
from tester_base import SuiteTester, close, scenario_data, build_scenario
from src.config.constants import UNIQUENESS_SKIPPED_PRECONDITION
from src.core.arcs import TimeGrid
from src.core.measures import SpatialMeasure
from src.core.mild_solution import (ValueGrid, value_function, dynamic_programming_residual, constant_arc_bound,
                                    monotone_precondition, uniqueness_crosscheck, compare_flows)
from src.domains import DiscDomain
from src.lagrangians import QuadraticLagrangian
from src.couplings import ZeroCoupling, TargetCoupling, ConvolutionCoupling
from src.exceptions import ShapeMismatchError
from src.models.scenario import ValueGridSpec


class ValueFunctionTester(SuiteTester):
    title = "Value function"

    def __init__(self):
        super().__init__()
        self.disc = DiscDomain(radius=1.0, tube_radius=0.5)
        self.grid = TimeGrid(1.0, 8)
        self.m = SpatialMeasure.dirac([0.0, 0.0])
        self.snapshots = [self.m] * self.grid.size

    def case_1_trivial(self):
        self.section("TEST 1: Uncoupled problem")
        u = value_function(self.snapshots, QuadraticLagrangian(1.0), ZeroCoupling(), ZeroCoupling(), self.disc,
                           self.grid, ValueGridSpec(resolution=5, multistart_count=1))

        def zero():
            assert np.all(u.values == 0.0)
            assert u.flagged == 0
        self.check("u vanishes everywhere", zero)

        def residual():
            assert dynamic_programming_residual(u, self.snapshots, QuadraticLagrangian(1.0), ZeroCoupling(),
                                                ZeroCoupling()) == 0.0
        self.check("Dynamic-programming residual is zero", residual)

        def corrupted():
            values = u.values.copy()
            values[0] += 1.0
            broken = ValueGrid(u.grid, u.points, values, u.converged)
            r = dynamic_programming_residual(broken, self.snapshots, QuadraticLagrangian(1.0), ZeroCoupling(),
                                             ZeroCoupling())
            assert r >= 1.0 - 1e-12, r
        self.check("Raising u at t = 0 shows up in the residual", corrupted)

        def frame():
            back = ValueGrid.from_frame(u.to_frame(), self.grid)
            assert np.array_equal(back.values, u.values)
            assert np.allclose(back.points, u.points)
            assert u.sup_difference(back) == 0.0
        self.check("Table layout carries every cell", frame)

        def mismatch():
            other = ValueGrid(self.grid, u.points[:-1], u.values[:, :-1], u.converged[:, :-1])
            try:
                u.sup_difference(other)
            except ShapeMismatchError:
                return
            raise AssertionError("differently shaped grids compared")
        self.check("Grids over different points cannot be compared", mismatch)

    def case_2_quadratic_pull(self):
        self.section("TEST 2: Quadratic pull oracle")
        domain = DiscDomain(radius=2.0, tube_radius=1.0)
        grid = TimeGrid(1.0, 16)
        z = np.array([0.3, -0.2])
        lagrangian = QuadraticLagrangian(0.5)
        terminal = TargetCoupling(target=z, weight=1.0)
        snapshots = [SpatialMeasure.dirac(z)] * grid.size
        points = np.array([[0.0, 0.0], [-0.8, 0.6], [1.0, 1.0], [0.3, -0.2], [-1.2, -0.9]])
        u = value_function(snapshots, lagrangian, ZeroCoupling(), terminal, domain, grid,
                           ValueGridSpec(multistart_count=2), points=points)

        def oracle():
            for k, t in enumerate(grid.times):
                expected = np.sum((points - z) ** 2, axis=1) / (1.0 + 2.0 * (1.0 - t))
                assert np.max(np.abs(u.values[k] - expected)) <= 1e-8, (k, u.values[k] - expected)
        self.check("u(t, x) = |x - z|^2 / (1 + 2(T - t)) at every node", oracle)

        def terminal_exact():
            assert np.array_equal(u.values[-1], terminal.values(points, None))
        self.check("Terminal layer is G exactly", terminal_exact)

        def bounded():
            bound = constant_arc_bound(u, snapshots, lagrangian, ZeroCoupling(), terminal)
            assert np.all(u.values <= bound + 1e-12)
        self.check("u never exceeds the cost of staying put", bounded)

    def case_3_uniqueness_gate(self):
        self.section("TEST 3: Uniqueness gate")

        def zero_coupling():
            scenario = build_scenario(scenario_data("trivial"))
            assert monotone_precondition(scenario) is not None
            report = uniqueness_crosscheck(scenario, [0, 1])
            assert report.status == UNIQUENESS_SKIPPED_PRECONDITION
            assert report.passed is None
        self.check("Measure-free couplings skip the cross-check", zero_coupling)

        def anti_monotone():
            scenario = build_scenario(scenario_data("non_monotone"))
            reason = monotone_precondition(scenario)
            assert reason is not None and 'pairwise_distance' in reason
        self.check("Anti-monotone coupling is named in the skip reason", anti_monotone)

        def monotone():
            scenario = build_scenario(scenario_data("crowd_aversion"))
            assert monotone_precondition(scenario) is None
        self.check("Convolution crowd aversion passes the gate", monotone)

        def seeds():
            scenario = build_scenario(scenario_data("trivial"))
            try:
                uniqueness_crosscheck(scenario, [0])
            except ValueError:
                return
            raise AssertionError("single seed accepted")
        self.check("At least two seeds are required", seeds)

        def flows_equal():
            coupling = ConvolutionCoupling(self.disc, bandwidth=0.5, quadrature_resolution=16)
            distances, gaps = compare_flows(coupling, self.snapshots, self.snapshots)
            assert distances == [0.0] * self.grid.size
            assert gaps == [0.0] * self.grid.size
        self.check("Identical flows have zero distance and gap", flows_equal)


def main():
    tester = ValueFunctionTester()
    return 0 if tester.run_all() else 1


def test_value_function_suite():
    assert main() == 0


if __name__ == "__main__":
    raise SystemExit(main())
