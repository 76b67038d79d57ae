import numpy as np
import pytest

from rscf import harness
from rscf.scenario import ConfigError, ScenarioConfig, VelocityProfile


def _config(**kw):
    base = dict(
        num_aps=4,
        num_ues=3,
        antennas_per_ap=2,
        frame_length=12,
        velocity=VelocityProfile(mode="equal", value=30.0),
    )
    base.update(kw)
    return ScenarioConfig(**base)


def _spec(**kw):
    base = dict(
        variable="power_split_t",
        grid=(0.0, 0.5),
        config=_config(),
        scheme_pairs=(("mr", "superposition"),),
        realizations=100,
        seed=7,
        time_instant=5,
    )
    base.update(kw)
    return harness.SweepSpec(**base)


class TestSweepSpec:
    def test_unknown_variable(self):
        with pytest.raises(ConfigError):
            _spec(variable="nope")

    def test_empty_grid(self):
        with pytest.raises(ConfigError):
            _spec(grid=())

    def test_unsorted_grid(self):
        with pytest.raises(ConfigError):
            _spec(grid=(0.5, 0.0))


class TestRunSweep:
    def test_t_zero_has_no_common_se(self):
        rows = harness.run_sweep(_spec(config=_config(velocity=VelocityProfile())))
        row0 = [r for r in rows if r.sweep_value == 0.0][0]
        assert row0.common_se == 0.0
        for r in rows:
            assert r.sum_se == pytest.approx(r.common_se + r.private_se, abs=1e-9)

    def test_aging_reduces_se(self):
        rows = harness.run_sweep(_spec(variable="time_instant_n", grid=(1, 10)))
        by_n = {r.sweep_value: r for r in rows}
        # paired channels: later instant cannot beat the fresh one by more than noise
        assert by_n[10].sum_se <= by_n[1].sum_se + 2 * by_n[1].stderr

    def test_bad_scheme_yields_error_row(self):
        rows = harness.run_sweep(_spec(scheme_pairs=(("mr", "superposition"), ("zf", "random"))))
        good = [r for r in rows if not r.error]
        bad = [r for r in rows if r.error]
        assert len(good) == 2 and len(bad) == 2
        assert all(np.isnan(r.sum_se) for r in bad)

    def test_ue_sweep_pairs_channels(self):
        rows = harness.run_sweep(
            _spec(variable="num_ues_K", grid=(2, 3), realizations=50)
        )
        assert len(rows) == 2
        assert all(not r.error for r in rows)

    def test_velocity_sweep(self):
        rows = harness.run_sweep(
            _spec(variable="velocity_profile", grid=(0.0, 30.0), realizations=80)
        )
        by_v = {r.sweep_value: r for r in rows}
        assert by_v[30.0].sum_se <= by_v[0.0].sum_se + 2 * by_v[0.0].stderr

    def test_threads_match_serial(self):
        spec = _spec(realizations=40)
        serial = harness.run_sweep(spec)
        parallel = harness.run_sweep(_spec(realizations=40, threads=2))
        for a, b in zip(serial, parallel):
            assert a.sum_se == b.sum_se and a.stderr == b.stderr


class TestCsv:
    def test_deterministic_output(self, tmp_path):
        spec = _spec(realizations=60)
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        harness.write_csv(harness.run_sweep(spec), p1)
        harness.write_csv(harness.run_sweep(spec), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_power_stored_in_both_units(self, tmp_path):
        rows = harness.run_sweep(
            _spec(variable="transmit_power_dbm", grid=(13.0, 23.0), realizations=30)
        )
        by_p = {r.sweep_value: r for r in rows}
        assert by_p[23.0].transmit_power_dbm == pytest.approx(23.0)
        assert by_p[23.0].transmit_power_w == pytest.approx(10 ** ((23.0 - 30.0) / 10.0))

    def test_timing_sidecar(self, tmp_path):
        rows = harness.run_sweep(_spec(realizations=30))
        path = tmp_path / "t.csv"
        harness.write_timing(rows, path)
        lines = path.read_text().splitlines()
        assert lines[0].split(",") == list(harness.TIMING_COLUMNS)
        assert all(float(line.split(",")[-1]) > 0 for line in lines[1:])

    def test_header_and_digits(self, tmp_path):
        rows = harness.run_sweep(_spec(realizations=30))
        path = tmp_path / "out.csv"
        harness.write_csv(rows, path)
        lines = path.read_text().splitlines()
        assert lines[0].split(",") == list(harness.CSV_COLUMNS)
        assert len(lines) == 1 + len(rows)


class TestValidateClosedForm:
    def test_small_run_passes(self):
        cfg = _config(num_aps=4, num_ues=2)
        report = harness.validate_closed_form(
            cfg, realizations=200, oracle_samples=40_000, seed=3, time_instant=5
        )
        assert report.all_passed

    def test_perfect_csi_reports_clean_bound(self):
        cfg = _config(velocity=VelocityProfile(mode="equal", value=0.0), num_ues=2)
        report = harness.validate_closed_form(
            cfg, realizations=200, oracle_samples=30_000, seed=4, time_instant=5
        )
        assert report.all_passed
