"""
Tests for the dimension report and the reference table.
"""
import math

import pytest

from eigslab.services.dims import (
    DIM_FIELDS, REFERENCE_VALUES, dimensions, format_table, local_dimensions, table1, table_frame,
)
from eigslab.services.presets import TABLE_PRESETS, flower, list_presets, load_preset

TOL = 5e-4

# rows whose shipped rule graphs reproduce the published values
MATCHING_ROWS = ["dhl", "flower:2,3", "flower:3,2", "vicsek", "fig2"]
ALL_PRESETS = list_presets() + ["flower:2,3", "flower:3,2"]


def _close(value: float, expected: float) -> bool:
    if math.isinf(expected):
        return math.isinf(value)
    return abs(value - expected) <= TOL


class TestDimensions:
    def test_dhl(self, dhl):
        report = dimensions(dhl)
        assert report.dim_B == pytest.approx(2.0)
        assert report.dim_D == pytest.approx(2.0)
        assert report.dim_R == pytest.approx(0.0, abs=1e-12)
        assert report.dim_W == pytest.approx(2.0)
        assert report.dim_S_finite_born == pytest.approx(1.0)
        assert report.dim_S_generic == pytest.approx(2.0)
        assert not report.recurrent
        assert report.regime == "marginal"

    def test_fig2(self, fig2):
        report = dimensions(fig2)
        expected = [2.4461, 2.4461, 0.1455, 2.5916, 1.1160, 1.8877]
        assert [getattr(report, k) for k in DIM_FIELDS] == pytest.approx(expected, abs=TOL)
        assert report.recurrent
        assert report.regime == "positive"
        assert report.scale_free

    def test_transient_flower(self):
        report = dimensions(flower(3, 2))
        assert not report.recurrent
        assert report.regime == "negative"

    def test_path_systems_are_not_scale_free(self, xi):
        report = dimensions(xi)
        assert math.isinf(report.dim_D)
        assert not report.scale_free
        assert report.dim_S_finite_born == pytest.approx(report.dim_S_generic)

    def test_xi_resistance_exponent(self, xi):
        assert dimensions(xi).dim_R == pytest.approx(math.log(11 / 4) / math.log(3))

    def test_walk_dimension_is_sum(self, fig2):
        report = dimensions(fig2)
        assert report.dim_W == pytest.approx(report.dim_B + report.dim_R)

    def test_inputs(self, dhl):
        inputs = dimensions(dhl).inputs
        assert (inputs.rho_M, inputs.rho_N, inputs.rho_min_D, inputs.rho_Psi) == pytest.approx((4, 2, 2, 1))

    def test_inf_serialises(self, xi):
        assert '"dim_D": Infinity' in dimensions(xi).model_dump_json(indent=2)


class TestFamilies:
    @pytest.mark.parametrize("u", range(2, 7))
    @pytest.mark.parametrize("v", range(2, 7))
    def test_flowers_have_walk_dimension_two(self, u, v):
        report = dimensions(flower(u, v))
        assert report.dim_W == pytest.approx(2.0, abs=1e-9)
        assert report.recurrent == (u < v)

    @pytest.mark.parametrize("name", ALL_PRESETS)
    def test_preset_invariants(self, name):
        report = dimensions(load_preset(name))
        assert report.inputs.rho_N < report.inputs.rho_M
        assert report.dim_W >= 2 - 1e-9
        assert (report.dim_S_generic < 2 - 1e-9) == report.recurrent


class TestLocalDimensions:
    def test_dhl(self, dhl):
        local = local_dimensions(dhl)
        assert local.mass_loc == pytest.approx(1.0)
        assert local.res_loc == pytest.approx(-1.0)

    def test_degenerate_for_paths(self, vicsek):
        assert local_dimensions(vicsek).degenerate


@pytest.fixture(scope="module")
def table_rows():
    return {row.report.system: row for row in table1()}


class TestTable:
    def test_row_order(self):
        assert [row.report.system for row in table1(["dhl", "fig2"])] == ["dhl", "fig2"]

    def test_all_rows_present(self, table_rows):
        assert set(table_rows) == {load_preset(name).name for name in TABLE_PRESETS}

    @pytest.mark.parametrize("name", MATCHING_ROWS)
    def test_matching_rows(self, table_rows, name):
        row = table_rows[load_preset(name).name]
        for key in DIM_FIELDS:
            assert _close(getattr(row.report, key), row.reference[key]), key
        assert row.report.recurrent == row.reference_recurrent

    def test_recurrence_flags(self, table_rows):
        for system, row in table_rows.items():
            assert row.report.recurrent == REFERENCE_VALUES[system][1]

    def test_box_dimensions_match_everywhere(self, table_rows):
        for row in table_rows.values():
            assert _close(row.report.dim_B, row.reference["dim_B"])

    def test_deltas_expose_reference_mismatch(self, table_rows):
        assert abs(table_rows["xi"].deltas["dim_R"]) > TOL
        assert abs(table_rows["laakso"].deltas["dim_R"]) > TOL

    def test_frame_and_text(self, table_rows):
        frame = table_frame(list(table_rows.values()))
        assert list(frame["system"]) == list(table_rows)
        assert "delta_dim_R" in frame.columns
        text = format_table(list(table_rows.values()))
        assert "fig2" in text and "Recc." in text and "inf" in text
