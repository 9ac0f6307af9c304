"""Tests for visibility and detection-efficiency thresholds.

Core claims covered here:
  * the critical visibility at perfect detection is sqrt(3) (2/3)^N and the
    general formula handles the entry-sum correction at eta < 1,
  * the critical efficiency solves visibility(eta) = 1, collapses to the
    closed form (2^N sqrt(3) / 3^N)^(1/N) whenever the entry sum vanishes,
    decreases with N and stays above 2/3,
  * the two-setting reference threshold is 2^((1-N)/2) and is overtaken by
    the three-setting one from N = 4 on,
  * tabulation and percent rendering are exact and reproducible.
"""

import math

import pytest

from ghzbell import (
    CSV_HEADER,
    ThresholdResult,
    critical_efficiency,
    critical_visibility,
    efficiency_closed_form,
    entry_sum_closed_form,
    lhv_bound,
    percent_string,
    render_table_csv,
    threshold_table,
    two_setting_visibility_threshold,
)

SQRT3 = math.sqrt(3.0)


class TestCriticalVisibility:
    def test_closed_form_at_perfect_detection(self):
        for n in range(2, 21):
            got = critical_visibility(n).v_critical
            assert abs(got - SQRT3 * (2.0 / 3.0) ** n) < 1e-12

    def test_frozen_values(self):
        assert critical_visibility(2).v_critical == pytest.approx(
            0.7698003589195009, abs=1e-12
        )
        assert critical_visibility(3).v_critical == pytest.approx(
            0.5132002392796672, abs=1e-12
        )
        assert critical_visibility(10).v_critical == pytest.approx(
            0.030036410895197707, abs=1e-12
        )

    def test_frozen_value_with_losses(self):
        got = critical_visibility(2, eta=0.9).v_critical
        assert got == pytest.approx(0.9408671053460566, abs=1e-12)

    def test_losses_raise_the_threshold(self):
        for n in (2, 3, 5):
            perfect = critical_visibility(n).v_critical
            lossy = critical_visibility(n, eta=0.9).v_critical
            assert lossy > perfect

    def test_result_fields(self):
        res = critical_visibility(3, eta=0.8)
        assert res.n_parties == 3
        assert res.eta == 0.8
        assert res.bound_lhs == lhv_bound(3)
        assert res.q_n_abs == abs(entry_sum_closed_form(3))
        assert res.v_critical > 0

    def test_attainable_flag(self):
        assert critical_visibility(2).attainable
        assert not critical_visibility(2, eta=0.75).attainable

    def test_to_dict(self):
        data = critical_visibility(2).to_dict()
        assert data["n_parties"] == 2
        assert data["v_critical"] == pytest.approx(0.7698003589195009, abs=1e-12)
        assert data["attainable"] is True

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            critical_visibility(1)
        with pytest.raises(ValueError):
            critical_visibility(3, eta=0.0)
        with pytest.raises(ValueError):
            critical_visibility(3, eta=1.2)


class TestCriticalEfficiency:
    def test_frozen_values(self):
        assert critical_efficiency(2) == pytest.approx(0.8699290346957322, abs=1e-10)
        assert critical_efficiency(3) == pytest.approx(0.7984330690821702, abs=1e-10)
        assert critical_efficiency(4) == pytest.approx(0.7648017936265847, abs=1e-10)
        assert critical_efficiency(5) == pytest.approx(0.7439181566706534, abs=1e-10)

    def test_percent_rendering(self):
        expected = {2: "87.0", 3: "79.8", 4: "76.5", 5: "74.4"}
        for n, text in expected.items():
            assert percent_string(critical_efficiency(n)) == text

    def test_solves_unit_visibility(self):
        for n in range(2, 13):
            eta = critical_efficiency(n)
            assert critical_visibility(n, eta=eta).v_critical == pytest.approx(
                1.0, abs=1e-9
            )

    def test_decreasing_and_above_two_thirds(self):
        values = [critical_efficiency(n) for n in range(2, 21)]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert all(v > 2.0 / 3.0 for v in values)

    def test_large_n_approaches_two_thirds(self):
        eta40 = critical_efficiency(40)
        assert 2.0 / 3.0 < eta40 < 0.68
        assert eta40 == pytest.approx(0.6758849197415822, abs=1e-10)

    def test_invalid_n(self):
        with pytest.raises(ValueError):
            critical_efficiency(1)


class TestEfficiencyClosedForm:
    def test_matches_bisection_when_entry_sum_vanishes(self):
        for n in (4, 7, 10):
            closed = efficiency_closed_form(n)
            assert abs(closed - critical_efficiency(n)) < 1e-12

    def test_frozen_value(self):
        assert efficiency_closed_form(4) == pytest.approx(
            (16 * SQRT3 / 81) ** 0.25, abs=1e-15
        )
        assert efficiency_closed_form(4) == pytest.approx(0.7648017936265847, abs=1e-12)

    def test_rejects_nonvanishing_entry_sum(self):
        with pytest.raises(ValueError):
            efficiency_closed_form(5)


class TestTwoSettingThreshold:
    def test_frozen_values(self):
        assert two_setting_visibility_threshold(2) == pytest.approx(
            0.7071067811865476, abs=1e-15
        )
        assert two_setting_visibility_threshold(4) == pytest.approx(
            0.3535533905932738, abs=1e-15
        )
        assert two_setting_visibility_threshold(10) == pytest.approx(
            0.04419417382415922, abs=1e-15
        )

    def test_percent_rendering(self):
        expected = {2: "70.7", 3: "50.0", 4: "35.4", 5: "25.0", 10: "4.4"}
        for n, text in expected.items():
            assert percent_string(two_setting_visibility_threshold(n)) == text

    def test_crossover_at_four_parties(self):
        # The three-setting threshold only wins from four parties on.
        for n in (2, 3):
            assert critical_visibility(n).v_critical > two_setting_visibility_threshold(n)
        for n in range(4, 13):
            assert critical_visibility(n).v_critical < two_setting_visibility_threshold(n)

    def test_invalid_n(self):
        with pytest.raises(ValueError):
            two_setting_visibility_threshold(1)


class TestPercentString:
    def test_half_up_rounding(self):
        assert percent_string(0.2225) == "22.3"
        assert percent_string(0.35355339059327373) == "35.4"
        assert percent_string(0.5) == "50.0"
        assert percent_string(0.044194173824159216) == "4.4"

    def test_new_threshold_two_parties_renders_77_0(self):
        # sqrt(3) * 4/9 = 0.7698..., which rounds to 77.0 (not 77.8).
        assert percent_string(critical_visibility(2).v_critical) == "77.0"

    def test_negative_rounds_away_from_zero(self):
        assert percent_string(-0.2225) == "-22.3"


class TestThresholdTable:
    def test_rows_match_individual_calls(self):
        rows = threshold_table(5)
        assert [r.n for r in rows] == [2, 3, 4, 5]
        for row in rows:
            n = row.n
            assert row.v_cr_new == critical_visibility(n).v_critical
            assert row.v_cr_old == two_setting_visibility_threshold(n)
            assert row.eta_cr == critical_efficiency(n)

    def test_invalid_n_max(self):
        with pytest.raises(ValueError):
            threshold_table(1)

    def test_csv_header_and_shape(self):
        text = render_table_csv(threshold_table(4))
        lines = text.splitlines()
        assert lines[0] == CSV_HEADER
        assert CSV_HEADER == "n,v_cr_new,v_cr_old,eta_cr"
        assert len(lines) == 4

    def test_csv_values_roundtrip(self):
        lines = render_table_csv(threshold_table(3)).splitlines()
        fields = lines[1].split(",")
        assert fields[0] == "2"
        assert float(fields[1]) == critical_visibility(2).v_critical
        assert float(fields[2]) == two_setting_visibility_threshold(2)
        assert float(fields[3]) == critical_efficiency(2)

    def test_row_to_dict(self):
        row = threshold_table(3)[0]
        data = row.to_dict()
        assert set(data) == {"n", "v_cr_new", "v_cr_old", "eta_cr"}
        assert data["n"] == 2


class TestThresholdResultValidation:
    def test_negative_visibility_rejected(self):
        with pytest.raises(ValueError):
            ThresholdResult(
                n_parties=2, eta=1.0, v_critical=-0.1, bound_lhs=1.0, q_n_abs=0.0
            )
