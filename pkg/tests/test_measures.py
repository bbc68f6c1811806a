"""
Measure tests: pushforward, disintegration, transport distance against a brute-force
vertex search, the dual potential and mixing.
"""
from functools import lru_cache
import numpy as np
from scipy.spatial.distance import cdist
from tester_base import SuiteTester, close
from src.core.arcs import Arc, TimeGrid
from src.core.measures import (SpatialMeasure, ArcMeasure, pushforward, flow, disintegrate, reassemble,
                               kantorovich_d1, kantorovich_dual, optimal_plan)
from src.exceptions import InvalidMeasureError, MarginalMismatchError


def brute_force_d1(m1, m2):
    """Minimum over every leaf-elimination path of the transportation polytope.

    Each path fixes one cell at min(row, column) mass; the cheapest path visits an optimal vertex.
    """
    cost = cdist(m1.points, m2.points)

    @lru_cache(maxsize=None)
    def best(rows, cols):
        if max(rows) <= 1e-12 or max(cols) <= 1e-12:
            return 0.0
        value = np.inf
        for i, r in enumerate(rows):
            if r <= 1e-12:
                continue
            for j, c in enumerate(cols):
                if c <= 1e-12:
                    continue
                x = min(r, c)
                next_rows = tuple(round(v - x, 12) if k == i else v for k, v in enumerate(rows))
                next_cols = tuple(round(v - x, 12) if k == j else v for k, v in enumerate(cols))
                value = min(value, x * cost[i, j] + best(next_rows, next_cols))
        return value

    return best(tuple(round(w, 12) for w in m1.weights), tuple(round(w, 12) for w in m2.weights))


def random_measure(rng, size):
    weights = rng.integers(1, 10, size=size).astype(float)
    return SpatialMeasure(rng.uniform(-1.0, 1.0, size=(size, 2)), weights / weights.sum())


class MeasureTester(SuiteTester):
    title = "Measures"

    def __init__(self):
        super().__init__()
        self.grid = TimeGrid(1.0, 4)
        self.m0 = SpatialMeasure([[0.0, 0.0], [0.5, 0.0]], [0.25, 0.75])

    def two_arc_measure(self):
        arcs = [Arc.straight(self.grid, [0.0, 0.0], [0.0, 0.4]), Arc.straight(self.grid, [0.5, 0.0], [0.5, -0.4])]
        return ArcMeasure.from_arcs(arcs, [0.25, 0.75], self.m0)

    def case_1_spatial_measures(self):
        self.section("TEST 1: Spatial measures")

        def invalid_weights():
            try:
                SpatialMeasure([[0.0, 0.0], [1.0, 0.0]], [0.6, 0.5])
            except InvalidMeasureError:
                return
            raise AssertionError("weights summing to 1.1 accepted")
        self.check("Weights summing to 1.1 raise InvalidMeasureError", invalid_weights)

        def negative():
            try:
                SpatialMeasure([[0.0, 0.0], [1.0, 0.0]], [1.2, -0.2])
            except InvalidMeasureError:
                return
            raise AssertionError("negative weight accepted")
        self.check("Negative weights are rejected", negative)

        def merge():
            m = SpatialMeasure([[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]], [0.2, 0.3, 0.5]).merged()
            assert m.size == 2
            assert np.allclose(m.weights, [0.5, 0.5])
        self.check("Coincident atoms merge with summed weight", merge)

    def case_2_arc_measures(self):
        self.section("TEST 2: Arc measures")
        eta = self.two_arc_measure()

        def initial():
            assert pushforward(eta, 0.0) is self.m0
            assert eta.marginal_deviation() <= 1e-15
        self.check("Time-0 pushforward is the initial marginal", initial)

        def midpoint():
            m = pushforward(eta, 0.5)
            assert np.allclose(m.points, [[0.0, 0.2], [0.5, -0.2]])
            assert np.allclose(m.weights, [0.25, 0.75])
            m = pushforward(eta, 0.125)
            assert np.allclose(m.points, [[0.0, 0.05], [0.5, -0.05]])
        self.check("Pushforward interpolates arc positions", midpoint)

        def snapshots():
            series = flow(eta)
            assert len(series) == self.grid.size
            assert np.allclose(series[-1].points, [[0.0, 0.4], [0.5, -0.4]])
        self.check("Flow has one snapshot per grid node", snapshots)

        def mismatch():
            arcs = [Arc.constant(self.grid, [0.0, 0.0]), Arc.constant(self.grid, [0.3, 0.0])]
            try:
                ArcMeasure.from_arcs(arcs, [0.25, 0.75], self.m0)
            except MarginalMismatchError:
                return
            raise AssertionError("arc starting off the initial support accepted")
        self.check("Arcs must start on the initial support", mismatch)

        def wrong_split():
            arcs = [Arc.constant(self.grid, [0.0, 0.0]), Arc.constant(self.grid, [0.5, 0.0])]
            try:
                ArcMeasure.from_arcs(arcs, [0.5, 0.5], self.m0)
            except MarginalMismatchError:
                return
            raise AssertionError("wrong marginal weights accepted")
        self.check("Start weights must reproduce the initial marginal", wrong_split)

        def round_trip():
            split = disintegrate(eta)
            assert set(split) == {(0.0, 0.0), (0.5, 0.0)}
            for start, part in split.items():
                close(part.weights.sum(), 1.0, 1e-15)
                assert np.all(part.nodes[:, 0, :] == np.array(start))
            back = reassemble(split, self.m0)
            assert np.array_equal(back.nodes, eta.nodes)
            assert np.allclose(back.weights, eta.weights, atol=1e-15)
        self.check("Disintegrate then reassemble recovers the measure", round_trip)

        def mix():
            other = ArcMeasure.from_arcs(
                [Arc.straight(self.grid, [0.0, 0.0], [0.2, 0.0]), Arc.constant(self.grid, [0.5, 0.0])],
                [0.25, 0.75], self.m0)
            mixed = eta.mix(other, 0.3)
            assert mixed.size == 4
            close(mixed.weights.sum(), 1.0, 1e-14)
            assert mixed.marginal_deviation() <= 1e-14
            same = eta.mix(eta, 0.3, merge_tol=1e-9)
            assert same.size == 2
            assert np.allclose(same.weights, eta.weights)
        self.check("Mixing preserves the marginal and merges duplicates", mix)

        def bad_alpha():
            for alpha in (0.0, 1.5):
                try:
                    eta.mix(eta, alpha)
                except ValueError:
                    continue
                raise AssertionError(f"alpha={alpha} accepted")
        self.check("Mixing weight must lie in (0, 1]", bad_alpha)

    def case_3_transport_distance(self):
        self.section("TEST 3: Transport distance")

        def identical():
            m = random_measure(np.random.default_rng(3), 4)
            assert kantorovich_d1(m, m) == 0.0
            copy = SpatialMeasure(m.points.copy(), m.weights.copy())
            assert kantorovich_d1(m, copy) == 0.0
        self.check("Identical measures are at distance exactly 0", identical)

        def diracs():
            a, b = SpatialMeasure.dirac([0.0, 0.0]), SpatialMeasure.dirac([0.3, 0.4])
            close(kantorovich_d1(a, b), 0.5, 1e-15)
        self.check("Distance between Diracs is the point distance", diracs)

        def brute_force():
            for seed in range(100):
                rng = np.random.default_rng(seed)
                m1 = random_measure(rng, int(rng.integers(1, 6)))
                m2 = random_measure(rng, int(rng.integers(1, 6)))
                close(kantorovich_d1(m1, m2), brute_force_d1(m1, m2), 1e-9)
        self.check("LP distance matches exhaustive vertex search (100 seeds)", brute_force)

        def plan():
            rng = np.random.default_rng(7)
            m1, m2 = random_measure(rng, 5), random_measure(rng, 4)
            result = optimal_plan(m1, m2)
            assert result.is_valid()
        self.check("Optimal plan has the requested marginals", plan)

        def dual():
            for seed in range(20):
                rng = np.random.default_rng(1000 + seed)
                m1, m2 = random_measure(rng, 4), random_measure(rng, 3)
                value, points, potential = kantorovich_dual(m1, m2)
                close(value, kantorovich_d1(m1, m2), 1e-8)
                slack = cdist(points, points) - (potential[:, None] - potential[None, :])
                assert np.min(slack) >= -1e-9
        self.check("Dual potential is 1-Lipschitz and attains the distance", dual)

        def symmetric():
            rng = np.random.default_rng(11)
            m1, m2 = random_measure(rng, 3), random_measure(rng, 5)
            close(kantorovich_d1(m1, m2), kantorovich_d1(m2, m1), 1e-10)
        self.check("Distance is symmetric", symmetric)

        def triangle():
            rng = np.random.default_rng(12)
            for _ in range(50):
                m1, m2, m3 = (random_measure(rng, int(rng.integers(1, 6))) for _ in range(3))
                assert kantorovich_d1(m1, m3) <= kantorovich_d1(m1, m2) + kantorovich_d1(m2, m3) + 1e-9
        self.check("Triangle inequality on 50 random triples", triangle)

    def case_4_flow_continuity(self):
        self.section("TEST 4: Time continuity of flows")
        rng = np.random.default_rng(31)
        grid = TimeGrid(1.0, 12)
        m0 = random_measure(rng, 4)
        arcs = []
        for start in m0.points:
            steps = rng.normal(size=(grid.steps, 2)) * np.sqrt(grid.dt)
            arcs.append(Arc(grid, np.vstack([start, start + np.cumsum(steps, axis=0)])))
        eta = ArcMeasure.from_arcs(arcs, m0.weights, m0)
        snapshots = flow(eta)

        def holder():
            constant = float(np.max(eta.energies()))
            for a in range(grid.size):
                for b in range(a + 1, grid.size):
                    gap = grid.times[b] - grid.times[a]
                    assert kantorovich_d1(snapshots[a], snapshots[b]) <= constant * np.sqrt(gap) + 1e-12
        self.check("d1(m(s), m(t)) <= max energy * |t - s|^(1/2)", holder)

        def diagonal():
            for a in range(grid.size):
                for b in range(a + 1, grid.size):
                    coupling = float(np.sum(eta.weights * np.linalg.norm(eta.nodes[:, b] - eta.nodes[:, a], axis=1)))
                    assert kantorovich_d1(snapshots[a], snapshots[b]) <= coupling + 1e-12
        self.check("Moving each atom along its arc bounds d1 from above", diagonal)


def main():
    tester = MeasureTester()
    return 0 if tester.run_all() else 1


def test_measure_suite():
    assert main() == 0


if __name__ == "__main__":
    raise SystemExit(main())
