"""
Tests for the canonicality and distance-positivity validators.
"""
import numpy as np
import pytest

from eigslab.services.presets import list_presets, load_preset
from eigslab.services.system import load_system
from eigslab.services.validation import off_path_edges, validate, validate_canonical, validate_distance_positive


def _one_colour(vertices, edges, **extra):
    return load_system({
        "colours": 1,
        "initial_colour": 1,
        "rules": [{"vertices": vertices, "plant_plus": 0, "plant_minus": 1, "edges": edges}],
        **extra,
    })


PENDANT = [[0, 2, 1], [2, 1, 1], [2, 3, 1]]


class TestCanonicality:
    @pytest.mark.parametrize("name", list_presets() + ["flower:2,3", "flower:3,2"])
    @pytest.mark.parametrize("method", ["flow", "enumerate"])
    def test_methods_agree_on_presets(self, name, method):
        system = load_preset(name)
        flow = [off_path_edges(rule, "flow") for rule in system.rules]
        assert [off_path_edges(rule, method) for rule in system.rules] == flow

    def test_methods_agree_on_random_rule_graphs(self):
        rng = np.random.default_rng(3)
        for _ in range(300):
            vertices = int(rng.integers(3, 11))
            # random spanning tree keeps the rule connected; extra edges add cycles and parallels
            edges = [[int(rng.integers(v)), v, 1] for v in range(1, vertices)]
            for _ in range(int(rng.integers(0, vertices))):
                u, v = (int(w) for w in rng.choice(vertices, size=2, replace=False))
                edges.append([u, v, 1])
            rule = _one_colour(vertices, edges).rule(1)
            assert off_path_edges(rule, "flow") == off_path_edges(rule, "enumerate"), edges

    def test_pendant_edge_is_not_canonical(self):
        system = _one_colour(4, PENDANT)
        violations = validate_canonical(system)
        assert len(violations) == 1
        assert violations[0].kind == "not_canonical"
        assert violations[0].edge == (2, 3)

    def test_pendant_edge_is_a_decoration_when_allowed(self):
        system = _one_colour(4, PENDANT, allow_decorations=True)
        report = validate(system)
        assert report.valid
        assert [w.kind for w in report.warnings] == ["decoration"]

    def test_bridge_of_wheatstone_is_on_a_path(self):
        # the bridge 2-3 is used by 0-2-3-1
        system = _one_colour(4, [[0, 2, 1], [2, 1, 1], [0, 3, 1], [3, 1, 1], [2, 3, 1]])
        assert validate_canonical(system) == []

    def test_dangling_cycle_is_not_canonical(self):
        # triangle hanging off vertex 2 lies on no simple terminal path
        system = _one_colour(5, [[0, 2, 1], [2, 1, 1], [2, 3, 1], [3, 4, 1], [4, 2, 1]])
        flagged = {v.edge for v in validate_canonical(system)}
        assert flagged == {(2, 3), (3, 4), (4, 2)}
        assert off_path_edges(system.rule(1), "enumerate") == [2, 3, 4]

    def test_unknown_method(self, dhl):
        with pytest.raises(ValueError):
            off_path_edges(dhl.rule(1), "guess")


class TestDistancePositivity:
    def test_one_colour_terminal_distance_one(self):
        system = _one_colour(3, [[0, 1, 1], [0, 2, 1], [2, 1, 1]])
        kinds = [v.kind for v in validate_distance_positive(system)]
        assert kinds == ["terminal_distance"]

    def test_colour_missing_from_every_path(self):
        system = load_system({
            "colours": 2,
            "initial_colour": 1,
            "rules": [
                {"vertices": 3, "plant_plus": 0, "plant_minus": 1, "edges": [[0, 2, 1], [2, 1, 1]]},
                {"vertices": 3, "plant_plus": 0, "plant_minus": 1, "edges": [[0, 2, 2], [2, 1, 2]]},
            ],
        })
        violations = validate_distance_positive(system)
        assert violations and all(v.kind == "distance" for v in violations)
        assert not validate(system).valid

    @pytest.mark.parametrize("name", list_presets() + ["flower:2,3", "flower:3,2"])
    def test_presets_are_valid(self, name):
        report = validate(load_preset(name))
        assert report.valid, report.violations

    def test_fig2_has_no_warnings(self, fig2):
        report = validate(fig2)
        assert report.violations == [] and report.warnings == []
