"""
Best-response tests: closed-form optima, the boundary wall, exploitability of trivial games.
"""
import numpy as np
from tester_base import SuiteTester, close
from src.core.arcs import Arc, TimeGrid
from src.core.best_response import (BestResponseSolver, best_response, exploitability, group_starts)
from src.core.costs import FrozenCost
from src.core.measures import ArcMeasure, SpatialMeasure
from src.domains import DiscDomain
from src.lagrangians import QuadraticLagrangian
from src.couplings import ZeroCoupling, TargetCoupling
from src.exceptions import InfeasibleStartError


class BestResponseTester(SuiteTester):
    title = "Best response"

    def __init__(self):
        super().__init__()
        self.disc = DiscDomain(radius=1.0, tube_radius=0.5)
        self.lagrangian = QuadraticLagrangian(0.5)

    def case_1_closed_forms(self):
        self.section("TEST 1: Closed-form optima")

        def at_rest():
            grid = TimeGrid(1.0, 8)
            m = SpatialMeasure.dirac([0.0, 0.0])
            result = best_response([0.3, -0.2], [m] * grid.size, self.lagrangian, ZeroCoupling(), ZeroCoupling(),
                                   self.disc, grid)
            assert result.converged
            assert result.value == 0.0
            assert result.arc.sup_distance(Arc.constant(grid, [0.3, -0.2])) == 0.0
        self.check("Without couplings the constant arc is optimal", at_rest)

        def straight_line():
            domain = DiscDomain(radius=2.0, tube_radius=1.0)
            grid = TimeGrid(1.0, 16)
            x, z = np.array([-1.0, 0.5]), np.array([0.3, -0.2])
            m = SpatialMeasure.dirac(x)
            result = best_response(x, [m] * grid.size, self.lagrangian, ZeroCoupling(),
                                   TargetCoupling(target=z, weight=1.0), domain, grid)
            end = (0.5 * x + z) / 1.5
            assert result.converged
            close(result.value, np.sum((x - z) ** 2) / 3.0, 1e-9)
            assert result.arc.sup_distance(Arc.straight(grid, x, end)) <= 1e-4
        self.check("Quadratic pull: straight line with cost |x - z|^2 / (1 + 2T)", straight_line)

        def wall():
            grid = TimeGrid(1.0, 1)
            m = SpatialMeasure.dirac([0.0, 0.0])
            result = best_response([0.0, 0.0], [m] * grid.size, self.lagrangian, ZeroCoupling(),
                                   TargetCoupling(target=[3.0, 0.0], weight=1.0), self.disc, grid)
            assert result.converged, result.gradient_norm
            assert np.allclose(result.arc.end, [1.0, 0.0], atol=1e-6)
            close(result.value, 4.5, 1e-9)
            assert result.arc.is_feasible(self.disc)
        self.check("Target outside the disc: optimum stops at the wall with value 4.5", wall)

        def monotone_trace():
            grid = TimeGrid(1.0, 8)
            m = SpatialMeasure.dirac([0.0, 0.0])
            result = best_response([-0.5, 0.0], [m] * grid.size, self.lagrangian, ZeroCoupling(),
                                   TargetCoupling(target=[0.5, 0.5], weight=1.0), self.disc, grid)
            assert np.all(np.diff(result.objective_trace) < 0.0)
            assert result.value <= min(result.start_values) + 1e-15
        self.check("Objective decreases along the descent", monotone_trace)

    def case_2_solver(self):
        self.section("TEST 2: Solver details")
        grid = TimeGrid(1.0, 4)
        solver = BestResponseSolver.for_lagrangian(self.disc, self.lagrangian)

        def infeasible():
            cost = FrozenCost.from_flow(grid, [SpatialMeasure.dirac([0.0, 0.0])] * grid.size, self.lagrangian,
                                        ZeroCoupling(), ZeroCoupling())
            try:
                solver.solve([1.5, 0.0], cost)
            except InfeasibleStartError:
                return
            raise AssertionError("start outside the disc accepted")
        self.check("Start outside the closure raises InfeasibleStartError", infeasible)

        def normal_cone():
            nodes = np.array([[0.0, 0.0], [1.0, 0.0]])
            outward = solver.projected_gradient(nodes, np.array([[0.0, 0.0], [-3.0, 1.0]]))
            assert np.allclose(outward, [[0.0, 1.0]])
            inward = solver.projected_gradient(nodes, np.array([[0.0, 0.0], [3.0, 1.0]]))
            assert np.allclose(inward, [[3.0, 1.0]])
        self.check("Blocked outward component is removed at the wall", normal_cone)

        def guesses():
            rng = np.random.default_rng(0)
            starts = solver.initial_guesses(np.array([0.2, 0.2]), grid, rng, 4)
            assert len(starts) == 4
            assert np.all(starts[0] == [0.2, 0.2])
            for nodes in starts:
                assert np.all(nodes[0] == [0.2, 0.2])
                assert Arc(grid, nodes).is_feasible(self.disc)
        self.check("Multistart guesses begin at x and stay feasible", guesses)

        def reproducible():
            cost = FrozenCost.from_flow(grid, [SpatialMeasure.dirac([0.0, 0.0])] * grid.size, self.lagrangian,
                                        ZeroCoupling(), TargetCoupling(target=[0.4, 0.0]))
            a = solver.solve([-0.3, 0.1], cost, np.random.default_rng(5))
            b = solver.solve([-0.3, 0.1], cost, np.random.default_rng(5))
            assert np.array_equal(a.arc.nodes, b.arc.nodes)
            assert a.start_values == b.start_values
        self.check("Equal seeds give identical results", reproducible)

    def case_3_exploitability(self):
        self.section("TEST 3: Exploitability")
        grid = TimeGrid(1.0, 8)
        m0 = SpatialMeasure([[0.2, 0.1], [-0.4, 0.3], [0.0, -0.6]], [0.5, 0.3, 0.2])

        def trivial_game():
            eta = ArcMeasure.constant(m0, grid)
            outcome = exploitability(eta, QuadraticLagrangian(1.0), ZeroCoupling(), ZeroCoupling(), self.disc)
            assert outcome.value == 0.0
            assert not outcome.flagged
        self.check("Constant arcs are an exact equilibrium without couplings", trivial_game)

        def positive_gap():
            # L = |v|^2 / 2, G = |x - z|^2: the optimum moves 2/3 of the way and costs r^2 / 3.
            target = np.array([0.5, 0.0])
            r2 = np.sum((m0.points - target) ** 2, axis=1)
            eta = ArcMeasure.constant(m0, grid)
            outcome = exploitability(eta, QuadraticLagrangian(0.5), ZeroCoupling(),
                                     TargetCoupling(target=target, weight=1.0), self.disc)
            assert np.all(outcome.gaps >= 0.0)
            assert np.all(outcome.best_values <= outcome.support_costs + 1e-15)
            close(outcome.value, float(m0.weights @ (2.0 * r2 / 3.0)), 1e-3)
            halfway = ArcMeasure.from_arcs([Arc.straight(grid, x, x + 0.5 * (target - x)) for x in m0.points],
                                           m0.weights, m0)
            outcome = exploitability(halfway, QuadraticLagrangian(0.5), ZeroCoupling(),
                                     TargetCoupling(target=target, weight=1.0), self.disc)
            close(outcome.value, float(m0.weights @ (r2 / 24.0)), 1e-3)
        self.check("Exploitability of suboptimal arcs equals the closed-form cost gap", positive_gap)

        def grouping():
            arcs = [Arc.constant(grid, [0.2, 0.1]), Arc.straight(grid, [0.2, 0.1], [0.3, 0.1]),
                    Arc.constant(grid, [-0.4, 0.3]), Arc.constant(grid, [0.0, -0.6])]
            eta = ArcMeasure.from_arcs(arcs, [0.25, 0.25, 0.3, 0.2], m0)
            starts, groups = group_starts(eta)
            assert len(starts) == 3
            assert groups.tolist() == [0, 0, 1, 2]
        self.check("Arcs are grouped by their starting atom", grouping)


def main():
    tester = BestResponseTester()
    return 0 if tester.run_all() else 1


def test_best_response_suite():
    assert main() == 0


if __name__ == "__main__":
    raise SystemExit(main())
