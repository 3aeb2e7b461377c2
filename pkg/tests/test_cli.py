import csv
import json

import pytest

from laserising.cli import main


@pytest.fixture
def af_file(tmp_path):
    path = tmp_path / "af.txt"
    path.write_text("M 2\nJ 0 1 1.0\n")
    return path


def _rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_oracle_prints_degenerate_pair(af_file, tmp_path, capsys):
    assert main(["oracle", str(af_file), "--out", str(tmp_path / "o")]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "minimum_energy -1.0"
    assert set(out[2:]) == {"+1 -1", "-1 +1"}


def test_oracle_infeasible(tmp_path, capsys):
    big = tmp_path / "big.txt"
    big.write_text("M 25\nJ 0 1 1\n")
    assert main(["oracle", str(big), "--out", str(tmp_path / "o")]) == 4
    assert "limited" in capsys.readouterr().err


def test_config_errors_exit_2(af_file, tmp_path, capsys):
    assert main(["solve", "--set", "etaa=1", "--out", str(tmp_path)]) == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("M 2\nJ 1 0 1.0\n")
    assert main(["oracle", str(bad), "--out", str(tmp_path)]) == 2
    err = capsys.readouterr()
    assert "unknown key 'etaa'" in err.err and "bad.txt:2" in err.err
    assert err.out == ""


def test_numerical_abort_exits_3(tmp_path):
    code = main(["simulate", "--set", "eta=1e300", "--set", "duration_s=1e-10",
                 "--out", str(tmp_path)])
    assert code == 3
    assert json.loads((tmp_path / "manifest.json").read_text())["status"] == "numerical_abort"


def test_simulate_writes_one_trajectory(tmp_path):
    assert main(["simulate", "--set", "duration_s=1e-9", "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "trajectory.csv")
    assert len(rows) == 101 and "dphi_0_1" in rows[0]


def test_solve_is_deterministic_and_echoes_config(tmp_path, capsys):
    args = ["solve", "--set", "trials=6", "--set", "duration_s=5e-9", "--seed", "11"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--set", "workers=3", "--out", str(tmp_path / "b")]) == 0
    for name in ("trials.csv", "summary.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert main(["solve", "--config", str(tmp_path / "a" / "config.resolved"),
                 "--out", str(tmp_path / "c")]) == 0
    assert (tmp_path / "a" / "trials.csv").read_bytes() == \
        (tmp_path / "c" / "trials.csv").read_bytes()
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert manifest["master_seed"] == 11 and manifest["config"]["trials"] == "6"
    assert "success_fraction" in capsys.readouterr().out


def test_solve_json_summary(tmp_path):
    assert main(["solve", "--set", "trials=4", "--set", "duration_s=2e-9", "--format", "json",
                 "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["trials"] == 4


def test_standingwave_default_excursion(tmp_path):
    assert main(["standingwave", "--out", str(tmp_path)]) == 0
    shifts = [float(r["freq_shift_hz"]) for r in _rows(tmp_path / "standingwave.csv")]
    assert max(shifts) - min(shifts) == pytest.approx(96.8e6, rel=1e-3)


def test_lockcurve(tmp_path):
    assert main(["lockcurve", "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "lockcurve.csv")
    locked = sum(r["locked"] == "1" for r in rows) / len(rows)
    assert locked == pytest.approx(1.3 / 4.5, abs=0.005)


def test_sweep_tables(tmp_path):
    base = ["sweep", "--set", "trials=3", "--set", "noise_mode=kick"]
    assert main(base + ["--set", "sweep_axis=eta", "--set", "sweep_start=0.005",
                        "--set", "sweep_stop=0.04", "--set", "sweep_steps=2",
                        "--out", str(tmp_path / "eta")]) == 0
    rows = _rows(tmp_path / "eta" / "sweep.csv")
    assert [r["regime"] for r in rows] == ["pinned", "bifurcated"]
    assert main(base + ["--set", "sweep_axis=coupling_phase", "--set", "sweep_start=0.5",
                        "--set", "sweep_stop=3.5", "--set", "sweep_steps=2",
                        "--format", "json", "--out", str(tmp_path / "theta")]) == 0
    rows = json.loads((tmp_path / "theta" / "sweep.json").read_text())
    assert [r["measured_order"] for r in rows] == [0.0, 3.141592653589793]
    assert main(["sweep", "--out", str(tmp_path / "none")]) == 2
