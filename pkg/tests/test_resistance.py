"""
Tests for effective resistance backends and the renormalisation map.
"""
import math

import numpy as np
import pytest

from eigslab.exceptions import ConvergenceError, EigsLabError
from eigslab.services.presets import list_presets, load_preset
from eigslab.services.resistance import (
    check_walk_dimension_bound, effective_resistance, grounded_resistance, hilbert_distance, psi, psi_eigenpair,
    psi_power, psi_trace, verify_renormalisation,
)
from eigslab.services.system import build
from tests.conftest import make_graph

BACKENDS = ["laplacian", "reduction"]
ALL_PRESETS = list_presets() + ["flower:2,3", "flower:3,2"]
AXIOM_TRIALS = 1000
SLACK = 1e-10


class TestEffectiveResistance:
    @pytest.mark.parametrize("backend", BACKENDS)
    def test_series(self, path4, backend):
        assert effective_resistance(path4, backend=backend) == pytest.approx(3.0)

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_parallel_multi_edges(self, backend):
        g = make_graph(2, [(0, 1), (0, 1), (0, 1)])
        assert effective_resistance(g, [1.0, 2.0, 2.0], backend=backend) == pytest.approx(0.5)

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_cycle(self, cycle4, backend):
        assert effective_resistance(cycle4, backend=backend) == pytest.approx(1.0)
        assert effective_resistance(cycle4, a=0, b=1, backend=backend) == pytest.approx(0.75)

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_disconnected_is_infinite(self, backend):
        g = make_graph(4, [(0, 1), (2, 3)], terminals=(0, 2))
        assert math.isinf(effective_resistance(g, backend=backend))

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_zero_resistance_edges_contract(self, path4, backend):
        assert effective_resistance(path4, [0.0, 1.0, 0.0], backend=backend) == pytest.approx(1.0)
        assert effective_resistance(path4, [0.0, 0.0, 0.0], backend=backend) == 0.0

    def test_backends_agree_on_weighted_levels(self, fig2):
        g = build(fig2, 3)
        x = np.array([0.7, 1.9])
        lap = effective_resistance(g, x[g.colours - 1], backend="laplacian")
        red = effective_resistance(g, x[g.colours - 1], backend="reduction")
        assert lap == pytest.approx(red, rel=1e-10)

    def test_interior_pair(self, dhl):
        g = build(dhl, 2)
        lap = effective_resistance(g, a=2, b=5)
        assert lap == pytest.approx(effective_resistance(g, a=2, b=5, backend="reduction"), rel=1e-10)

    def test_rejects_bad_input(self, path4):
        with pytest.raises(ValueError):
            effective_resistance(path4, [1.0, -1.0, 1.0])
        with pytest.raises(ValueError):
            effective_resistance(path4, [1.0, 1.0])
        with pytest.raises(ValueError):
            effective_resistance(path4, a=1, b=1)
        with pytest.raises(ValueError):
            effective_resistance(path4, backend="guess")

    def test_grounded_resistance(self, path4):
        assert grounded_resistance(path4, None, 0, {0, 1}) == pytest.approx(2.0)

    def test_grounded_resistance_needs_v_in_a(self, path4):
        with pytest.raises(ValueError):
            grounded_resistance(path4, None, 3, {0, 1})

    @pytest.mark.parametrize("legs", [1, 3, 5])
    def test_grounded_star(self, legs):
        g = make_graph(legs + 1, [(0, k) for k in range(1, legs + 1)])
        assert grounded_resistance(g, None, 0, {0}) == pytest.approx(1 / legs)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_grounded_parallel_edges(self, k):
        g = make_graph(2, [(0, 1)] * k)
        assert grounded_resistance(g, None, 0, {0}) == pytest.approx(1 / k)

    def test_grounded_ball_matches_reduction(self, dhl):
        g = build(dhl, 3)
        ball = set(np.flatnonzero(g.distances_from(0) < 2).tolist())
        # merge the complement into one ground vertex and reduce
        ground = g.n_vertices
        relabel = [u if u in ball else ground for u in range(g.n_vertices)]
        edges = [(relabel[u], relabel[v]) for u, v, _ in g.edge_list() if relabel[u] != relabel[v]]
        merged = make_graph(ground + 1, edges, terminals=(0, ground))
        expected = effective_resistance(merged, backend="reduction")
        assert grounded_resistance(g, None, 0, ball) == pytest.approx(expected, rel=1e-10)

    def test_grounded_resistance_scales_with_weights(self, dhl):
        g = build(dhl, 3)
        ball = set(np.flatnonzero(g.distances_from(0) < 2).tolist())
        unit = grounded_resistance(g, None, 0, ball)
        assert grounded_resistance(g, np.full(g.n_edges, 2.0), 0, ball) == pytest.approx(2 * unit)

    def test_grounded_resistance_needs_a_complement(self, triangle):
        with pytest.raises(EigsLabError):
            grounded_resistance(triangle, None, 0, {0, 1, 2})

    def test_commute_bound_on_levels(self, dhl, xi):
        assert all(c.holds for c in check_walk_dimension_bound(build(dhl, 3)))
        check = check_walk_dimension_bound(build(xi, 2))[0]
        assert check.energy_product == pytest.approx(36 * (11 / 4) ** 2)
        assert check.distance_squared == 81


class TestPsi:
    def test_dhl_is_identity(self, dhl):
        assert psi(dhl, [2.5]) == pytest.approx([2.5])

    def test_xi(self, xi):
        assert psi(xi, [1.0]) == pytest.approx([11 / 4])

    def test_decorations_carry_no_current(self, vicsek):
        assert psi(vicsek, [1.0]) == pytest.approx([3.0])

    def test_fig2_first_iterate(self, fig2):
        assert psi(fig2, [1.0, 1.0]) == pytest.approx([1.0, 1.2])

    def test_backends_agree(self, fig2):
        x = [0.3, 2.0]
        assert psi(fig2, x, backend="reduction") == pytest.approx(psi(fig2, x), rel=1e-12)

    def test_wrong_length(self, fig2):
        with pytest.raises(ValueError):
            psi(fig2, [1.0])


class TestPsiAxioms:
    """Randomised checks of the renormalisation-map axioms on every bundled system."""

    @staticmethod
    def _slack(*values) -> np.ndarray:
        return SLACK * (1 + sum(np.abs(v) for v in values))

    @pytest.mark.parametrize("name", ALL_PRESETS)
    def test_homogeneity(self, name):
        system = load_preset(name)
        rng = np.random.default_rng(11)
        for _ in range(AXIOM_TRIALS):
            x = rng.uniform(0.1, 10.0, size=system.K)
            lam = rng.uniform(0.0, 10.0)
            px = psi(system, x)
            assert np.all(np.abs(psi(system, lam * x) - lam * px) <= self._slack(lam * px))

    @pytest.mark.parametrize("name", ALL_PRESETS)
    def test_monotonicity(self, name):
        system = load_preset(name)
        rng = np.random.default_rng(12)
        for _ in range(AXIOM_TRIALS):
            a = rng.uniform(0.0, 10.0, size=system.K)
            b = rng.uniform(0.0, 10.0, size=system.K)
            a[rng.random(system.K) < 0.1] = 0.0
            lo, hi = np.minimum(a, b), np.maximum(a, b)
            p_lo, p_hi = psi(system, lo), psi(system, hi)
            assert np.all(p_hi >= p_lo - self._slack(p_lo))

    @pytest.mark.parametrize("name", ALL_PRESETS)
    def test_superadditivity(self, name):
        system = load_preset(name)
        rng = np.random.default_rng(13)
        for _ in range(AXIOM_TRIALS):
            x = rng.uniform(0.1, 10.0, size=system.K)
            y = rng.uniform(0.1, 10.0, size=system.K)
            px, py = psi(system, x), psi(system, y)
            assert np.all(psi(system, x + y) >= px + py - self._slack(px, py))

    @pytest.mark.parametrize("name", ALL_PRESETS)
    def test_concavity(self, name):
        system = load_preset(name)
        rng = np.random.default_rng(14)
        for _ in range(AXIOM_TRIALS):
            x = rng.uniform(0.1, 10.0, size=system.K)
            y = rng.uniform(0.1, 10.0, size=system.K)
            lam = rng.uniform(0.0, 1.0)
            px, py = psi(system, x), psi(system, y)
            mixed = psi(system, lam * x + (1 - lam) * y)
            assert np.all(mixed >= lam * px + (1 - lam) * py - self._slack(px, py))

    @pytest.mark.parametrize("name", ALL_PRESETS)
    def test_rayleigh_monotonicity_on_levels(self, name):
        g = build(load_preset(name), 2)
        rng = np.random.default_rng(15)
        for _ in range(AXIOM_TRIALS):
            r = rng.uniform(0.1, 5.0, size=g.n_edges)
            bumped = r + rng.uniform(0.0, 3.0, size=g.n_edges) * (rng.random(g.n_edges) < 0.5)
            low = effective_resistance(g, r)
            assert effective_resistance(g, bumped) >= low - SLACK * (1 + low)


class TestEigenpair:
    def test_dhl(self, dhl):
        pair = psi_eigenpair(dhl)
        assert pair.rho == pytest.approx(1.0)
        assert pair.v == pytest.approx([1.0])

    def test_fig2_root(self, fig2):
        pair = psi_eigenpair(fig2)
        rho = pair.rho
        assert 1.10603 <= rho <= 1.10623
        assert abs(27 * rho ** 4 + 6 * rho ** 3 - 50 * rho ** 2 + 6 * rho + 6) < 1e-8
        assert sum(pair.v) == pytest.approx(1.0)
        assert psi(fig2, pair.v) == pytest.approx(rho * np.array(pair.v), rel=1e-9)

    def test_fig2_trace(self, fig2):
        trace = psi_trace(fig2, 3)
        expected = [(1.0, 1.0), (1.0, 1.2), (1.09697, 1.33571), (1.21244, 1.47834)]
        for got, want in zip(trace.iterates, expected):
            assert got == pytest.approx(want, abs=5e-5)
        assert trace.projective_distance[-1] < trace.projective_distance[0]

    def test_iteration_cap(self, fig2):
        with pytest.raises(ConvergenceError) as e:
            psi_eigenpair(fig2, max_iter=2)
        assert e.value.iterations == 2

    def test_hilbert_distance_ignores_scale(self):
        assert hilbert_distance(np.array([1.0, 2.0]), np.array([3.0, 6.0])) == pytest.approx(0.0)


class TestRenormalisation:
    @pytest.mark.parametrize("name", ALL_PRESETS)
    @pytest.mark.parametrize("n", range(5))
    def test_level_resistance_matches_psi_power(self, name, n):
        check = verify_renormalisation(load_preset(name), n)
        assert check.lhs == pytest.approx(check.rhs, rel=1e-8)

    def test_weighted_fig2(self, fig2):
        check = verify_renormalisation(fig2, 3, x=[0.5, 2.0])
        assert check.lhs == pytest.approx(check.rhs, rel=1e-8)

    def test_psi_power(self, xi):
        assert psi_power(xi, [1.0], 3) == pytest.approx([(11 / 4) ** 3])
