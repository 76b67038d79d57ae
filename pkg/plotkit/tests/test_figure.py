import subprocess
import sys
from pathlib import Path

import pytest

from plotkit.figure import FigureSpec, NoDataError, SchemaError, load_rows, render

HEADER = (
    "sweep_variable,sweep_value,private_scheme,common_scheme,"
    "transmit_power_dbm,transmit_power_w,sum_se,stderr,common_se,private_se,error"
)


def _sweep_t_csv(path):
    lines = [HEADER]
    for t, (se1, se2) in zip((0.0, 0.5, 1.0), ((5.1, 6.2), (6.0, 7.1), (4.2, 5.0))):
        lines.append(f"power_split_t,{t},mr,superposition,23,0.199526231,{se1},0.04,1.0,4.0,")
        lines.append(f"power_split_t,{t},lmmse,random,23,0.199526231,{se2},0.05,1.2,4.9,")
    path.write_text("\n".join(lines) + "\n")
    return path


class TestLoadRows:
    def test_round_trip(self, tmp_path):
        header, rows = load_rows(_sweep_t_csv(tmp_path / "a.csv"))
        assert header == HEADER.split(",")
        assert len(rows) == 6

    def test_empty_body(self, tmp_path):
        p = tmp_path / "empty.csv"
        p.write_text(HEADER + "\n")
        with pytest.raises(NoDataError, match="no data rows"):
            load_rows(p)


class TestRender:
    def test_two_schemes_two_series(self, tmp_path):
        csv_path = _sweep_t_csv(tmp_path / "a.csv")
        out = tmp_path / "fig.png"
        labels = render(FigureSpec(str(csv_path), "sweep_value", str(out)))
        assert out.exists() and out.stat().st_size > 0
        assert labels == ["lmmse:random", "mr:superposition"]

    def test_missing_column_named(self, tmp_path):
        csv_path = _sweep_t_csv(tmp_path / "a.csv")
        with pytest.raises(SchemaError, match="'nope'"):
            render(FigureSpec(str(csv_path), "nope", str(tmp_path / "fig.png")))

    def test_error_rows_skipped(self, tmp_path):
        p = tmp_path / "err.csv"
        p.write_text(
            HEADER + "\n"
            "power_split_t,0,mr,superposition,23,0.2,5.0,0.1,1.0,4.0,\n"
            "power_split_t,0.5,zf,random,23,0.2,nan,nan,nan,nan,unknown scheme\n"
        )
        labels = render(FigureSpec(str(p), "sweep_value", str(tmp_path / "fig.png")))
        assert labels == ["mr:superposition"]

    def test_only_error_rows(self, tmp_path):
        p = tmp_path / "err.csv"
        p.write_text(
            HEADER + "\npower_split_t,0,zf,random,23,0.2,nan,nan,nan,nan,unknown scheme\n"
        )
        with pytest.raises(NoDataError):
            render(FigureSpec(str(p), "sweep_value", str(tmp_path / "fig.png")))

    def test_velocity_labels_parse(self, tmp_path):
        p = tmp_path / "v.csv"
        p.write_text(
            HEADER + "\n"
            "velocity_profile,equal:0.0,mr,superposition,23,0.2,8.0,0.1,1.0,7.0,\n"
            "velocity_profile,equal:30.0,mr,superposition,23,0.2,6.0,0.1,0.8,5.2,\n"
        )
        out = tmp_path / "fig.png"
        render(FigureSpec(str(p), "sweep_value", str(out)))
        assert out.exists()

    def test_input_not_mutated(self, tmp_path):
        csv_path = _sweep_t_csv(tmp_path / "a.csv")
        before = csv_path.read_bytes()
        render(FigureSpec(str(csv_path), "sweep_value", str(tmp_path / "fig.png")))
        assert csv_path.read_bytes() == before


class TestScripts:
    SCRIPTS_DIR = Path(__file__).resolve().parents[1]

    def _run(self, script, *args):
        return subprocess.run(
            [sys.executable, str(self.SCRIPTS_DIR / script), *args],
            capture_output=True,
            text=True,
        )

    def test_plot_sweep_t(self, tmp_path):
        csv_path = _sweep_t_csv(tmp_path / "a.csv")
        out = tmp_path / "fig.png"
        proc = self._run("plot_sweep_t.py", "--in", str(csv_path), "--out", str(out))
        assert proc.returncode == 0, proc.stderr
        assert out.exists()

    def test_schema_error_exit(self, tmp_path):
        csv_path = _sweep_t_csv(tmp_path / "a.csv")
        proc = self._run(
            "plot_sweep.py", "--in", str(csv_path), "--out", str(tmp_path / "f.png"),
            "--x", "bogus_col",
        )
        assert proc.returncode == 2
        assert "bogus_col" in proc.stdout

    def test_no_data_exit(self, tmp_path):
        p = tmp_path / "empty.csv"
        p.write_text(HEADER + "\n")
        proc = self._run("plot_sweep.py", "--in", str(p), "--out", str(tmp_path / "f.png"))
        assert proc.returncode == 1
        assert "no data rows" in proc.stdout
