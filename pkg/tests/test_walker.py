"""
Tests for random-walk exit times, commute times, return probabilities and traces.
"""
import math

import numpy as np
import pytest

from eigslab.exceptions import InsufficientData, UsageError
from eigslab.services.export import trace_csv, trace_dot
from eigslab.services.system import build
from eigslab.services.walker import (
    commute_time, exit_times, geometric_times, resolve_vertex, return_probability, srw_step, trace,
    walk_dimension_estimate,
)
from tests.conftest import SEED, make_graph


class TestStepping:
    def test_step_moves_to_a_neighbour(self, cycle4):
        rng = np.random.default_rng(SEED)
        for _ in range(50):
            assert srw_step(cycle4, 0, rng) in (1, 3)

    def test_multi_edges_weight_the_step(self):
        g = make_graph(3, [(0, 1), (0, 1), (0, 1), (0, 2)])
        rng = np.random.default_rng(SEED)
        hits = sum(srw_step(g, 0, rng) == 1 for _ in range(4000))
        assert hits / 4000 == pytest.approx(0.75, abs=0.03)

    def test_stationary_frequency_follows_degree(self):
        # triangle with a doubled pendant edge: not bipartite, degrees 2, 2, 4, 2
        g = make_graph(4, [(0, 1), (1, 2), (2, 0), (2, 3), (2, 3)])
        rng = np.random.default_rng(SEED)
        visits = np.zeros(g.n_vertices)
        v = 0
        for _ in range(200_000):
            v = srw_step(g, v, rng)
            visits[v] += 1
        assert visits / visits.sum() == pytest.approx(g.degrees() / g.degrees().sum(), abs=0.01)

    def test_resolve_vertex(self, dhl):
        g = build(dhl, 1)
        assert resolve_vertex(g, "terminal+") == 0
        assert resolve_vertex(g, "terminal-") == 1
        assert resolve_vertex(g, "3") == 3
        with pytest.raises(UsageError):
            resolve_vertex(g, "17")
        with pytest.raises(UsageError):
            resolve_vertex(g, "somewhere")


class TestExitTimes:
    def test_single_vertex_ball(self, single_edge):
        sample = exit_times(single_edge, 0, [1], trials=100)[0]
        assert sample.mean_tau == 1.0
        assert sample.stderr == 0.0
        assert sample.censored == 0

    def test_path_from_the_middle(self):
        # ball {1, 2, 3} of the path 0-1-2-3-4 around 2: gambler's ruin, E[tau] = 4
        g = make_graph(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
        sample = exit_times(g, 2, [2], trials=4000, seed=SEED)[0]
        assert sample.mean_tau == pytest.approx(4.0, abs=4 * sample.stderr + 0.05)

    def test_whole_graph_ball_is_censored(self, cycle4):
        sample = exit_times(cycle4, 0, [3], trials=20, max_steps=50)[0]
        assert sample.censored == 20
        assert sample.censored_fraction == 1.0
        assert math.isnan(sample.mean_tau)

    def test_independent_of_workers(self, dhl):
        g = build(dhl, 3)
        serial = exit_times(g, 0, [2, 4], trials=600, seed=SEED, workers=1)
        parallel = exit_times(g, 0, [2, 4], trials=600, seed=SEED, workers=4)
        assert [s.mean_tau for s in serial] == [s.mean_tau for s in parallel]

    def test_rejects_zero_trials(self, single_edge):
        with pytest.raises(UsageError):
            exit_times(single_edge, 0, [1], trials=0)

    def test_regression_needs_three_radii(self, dhl):
        with pytest.raises(InsufficientData):
            walk_dimension_estimate(dhl, 3, [1, 2])

    def test_regression_reuses_a_built_graph(self, dhl):
        g = build(dhl, 4)
        fresh = walk_dimension_estimate(dhl, 4, [1, 2, 3], trials=200, seed=SEED)
        reused = walk_dimension_estimate(dhl, 4, [1, 2, 3], trials=200, seed=SEED, g=g)
        assert reused.slope == fresh.slope

    def test_regression_rejects_graph_of_another_level(self, dhl):
        with pytest.raises(UsageError):
            walk_dimension_estimate(dhl, 4, [1, 2, 3], g=build(dhl, 3))

    @pytest.mark.slow
    def test_dhl_exit_ratio(self, dhl):
        # E[tau(m+1)] / E[tau(m)] ~ rho(M) rho(Psi) = 4
        estimate = walk_dimension_estimate(dhl, 7, [1, 2, 3, 4], trials=2000, seed=SEED)
        taus = [s.mean_tau for s in estimate.samples]
        for low, high in zip(taus[1:], taus[2:]):
            assert high / low == pytest.approx(4.0, rel=0.15)

    @pytest.mark.slow
    def test_dhl_walk_dimension(self, dhl):
        estimate = walk_dimension_estimate(dhl, 6, [1, 2, 3, 4], trials=1000, seed=SEED)
        assert 1.8 <= estimate.slope <= 2.2
        assert all(s.censored_fraction < 0.01 for s in estimate.samples)

    @pytest.mark.slow
    @pytest.mark.parametrize("birth", [0, 2, 5])
    def test_dhl_slope_ignores_birth_level(self, dhl, birth):
        g = build(dhl, 6)
        start = int(np.flatnonzero(g.birth_level == birth)[0])
        estimate = walk_dimension_estimate(dhl, 6, [1, 2, 3, 4], start=start, trials=1000, seed=SEED, g=g)
        assert 1.8 <= estimate.slope <= 2.2

    @pytest.mark.slow
    def test_vicsek_walk_dimension(self, vicsek):
        estimate = walk_dimension_estimate(vicsek, 5, [1, 2, 3, 4], trials=1000, seed=SEED)
        assert 2.2 <= estimate.slope <= 2.7


class TestCommuteTime:
    def test_single_edge_is_deterministic(self, single_edge):
        result = commute_time(single_edge, 0, 1, trials=200)
        assert result.empirical_mean == 2.0
        assert result.identity_value == pytest.approx(2.0)

    def test_triangle(self, triangle):
        result = commute_time(triangle, 0, 1, trials=10_000, seed=SEED)
        assert result.identity_value == pytest.approx(4.0)
        assert result.z_score < 3

    @pytest.mark.parametrize("edges, a, b", [
        ([(0, 1), (1, 2), (2, 3)], 0, 3),
        ([(0, 1), (1, 2), (2, 3), (3, 0)], 0, 2),
        ([(0, 1), (0, 1), (1, 2)], 0, 2),
    ])
    def test_identity_on_small_graphs(self, edges, a, b):
        g = make_graph(max(max(e) for e in edges) + 1, edges)
        result = commute_time(g, a, b, trials=10_000, seed=SEED)
        assert result.z_score < 3

    @pytest.mark.slow
    def test_dhl_level_three(self, dhl):
        result = commute_time(build(dhl, 3), 0, 1, trials=10_000, seed=SEED, workers=2)
        assert result.identity_value == pytest.approx(128.0)
        assert result.z_score < 3

    def test_needs_distinct_vertices(self, triangle):
        with pytest.raises(UsageError):
            commute_time(triangle, 1, 1)


class TestReturnProbability:
    def test_geometric_times(self):
        assert geometric_times(1, 5) == [1, 2, 4, 8, 16]
        assert geometric_times(3, 3) == [3, 6, 12]

    def test_single_edge_always_returns(self, single_edge):
        result = return_probability(single_edge, 0, [1, 2, 4])
        assert result.method == "exact"
        assert result.probabilities == pytest.approx([1.0, 1.0, 1.0])
        assert result.spectral_dim_estimate == pytest.approx(0.0, abs=1e-12)

    def test_cycle_exact(self, cycle4):
        assert return_probability(cycle4, 0, [1, 2, 3]).probabilities == pytest.approx([0.5, 0.5, 0.5])

    def test_monte_carlo_agrees_with_exact(self, dhl):
        g = build(dhl, 2)
        exact = return_probability(g, 0, [1, 2, 4], method="exact")
        mc = return_probability(g, 0, [1, 2, 4], method="monte_carlo", trials=20_000, seed=SEED)
        for p, q, s in zip(exact.probabilities, mc.probabilities, mc.stderrs):
            assert q == pytest.approx(p, abs=4 * s + 1e-3)

    def test_dhl_terminal_estimate(self, dhl):
        g = build(dhl, 6)
        result = return_probability(g, g.terminal_plus, geometric_times(1, 10))
        assert result.method == "exact"
        assert result.spectral_dim_estimate == pytest.approx(1.0, abs=0.3)

    def test_unknown_method(self, cycle4):
        with pytest.raises(UsageError):
            return_probability(cycle4, 0, [1], method="guess")

    def test_carries_caveat(self, cycle4):
        assert "heuristic" in return_probability(cycle4, 0, [1, 2]).caveat


class TestTrace:
    def test_zero_steps(self, cycle4):
        assert trace(cycle4, 2, 0).vertices == [2]

    def test_reproducible(self, dhl):
        g = build(dhl, 3)
        assert trace(g, 0, 500, seed=SEED).vertices == trace(g, 0, 500, seed=SEED).vertices
        assert trace(g, 0, 500, seed=SEED).vertices != trace(g, 0, 500, seed=SEED + 1).vertices

    def test_consecutive_vertices_are_adjacent(self, dhl):
        g = build(dhl, 2)
        A = g.adjacency()
        path = trace(g, 0, 200, seed=SEED).vertices
        assert all(A[u, v] > 0 for u, v in zip(path, path[1:]))

    def test_exports(self, cycle4):
        result = trace(cycle4, 0, 10, seed=SEED)
        csv = trace_csv(result)
        assert csv.splitlines()[0] == "step,vertex"
        assert len(csv.splitlines()) == 12
        assert 'label="start"' in trace_dot(cycle4, result)
