import csv
import json

import pytest

from robin_asymptotics.cli import main


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def square_file(tmp_path):
    return _write(tmp_path / "square.json",
                  {"polygon": {"vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]}})


def test_corner_square(square_file, tmp_path, capsys):
    assert main(["corner", "--input", square_file, "--out", str(tmp_path / "o")]) == 0
    assert "C_Omega = 2 " in capsys.readouterr().out
    report = json.loads((tmp_path / "o" / "corner.json").read_text())
    assert report["C_Omega"] == pytest.approx(2.0)


def test_corner_octant(tmp_path, capsys):
    f = _write(tmp_path / "oct.json", {"cone": {"dim": 3,
                                                "normals": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}})
    assert main(["corner", "--input", f, "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "corner.json").read_text())
    assert report["exact"] and report["lower"] == pytest.approx(3.0, abs=1e-9)
    assert "(exact)" in capsys.readouterr().out


def test_corner_rejects_cusp(tmp_path, capsys):
    f = _write(tmp_path / "c.json", {"corners": [{"kind": "cusp"}]})
    assert main(["corner", "--input", f]) == 2
    assert "cusp" in capsys.readouterr().err


def test_corner_numerical_failure(tmp_path):
    f = _write(tmp_path / "w.json", {"cone": {"dim": 3, "normals": [[1, 0, 0], [0, 1, 0]]}})
    assert main(["corner", "--input", f]) == 3


def test_missing_input_file(tmp_path):
    assert main(["corner", "--input", str(tmp_path / "nope.json")]) == 2


def test_sweep_outputs_are_reproducible(square_file, tmp_path, capsys):
    args = ["sweep", "--input", square_file, "--gamma-start", "1", "--gamma-stop", "4",
            "--gamma-count", "3", "--gamma-log"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    for name in ("sweep.csv", "sweep.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    rows = list(csv.DictReader((tmp_path / "a" / "sweep.csv").open()))
    assert [float(r["gamma"]) for r in rows] == [1.0, 2.0, 4.0]
    svg = (tmp_path / "a" / "sweep.svg").read_text()
    assert "<svg" in svg and "Date" not in svg
    assert "C_est" in capsys.readouterr().out


def test_sweep_empty_grid(square_file):
    assert main(["sweep", "--input", square_file, "--gamma-count", "0"]) == 2


def test_model_table(tmp_path, capsys):
    assert main(["model", "--model", "angle", "--alpha", "0.7853981633974483",
                 "--gamma-start", "1", "--gamma-stop", "3", "--gamma-count", "3",
                 "--out", str(tmp_path)]) == 0
    rows = list(csv.DictReader((tmp_path / "model.csv").open()))
    assert [float(r["ratio"]) for r in rows] == pytest.approx([-2.0] * 3)
    assert main(["model", "--model", "box", "--sides", "0.5", "0.5"]) == 0
    assert main(["model", "--model", "ball", "--m", "3"]) == 0


def test_model_needs_parameters():
    assert main(["model", "--model", "angle"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["model", "--model", "torus"])
    assert exc.value.code == 2


def test_cusp(tmp_path, capsys):
    assert main(["cusp", "--p", "1.5", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    slope = float(out.split()[2])
    assert abs(slope - 4) <= 0.2
    header = (tmp_path / "cusp.csv").read_text().splitlines()[0]
    assert header == "gamma,J,log_gamma,log_negJ"


def test_cusp_refuses_p2(capsys):
    assert main(["cusp", "--p", "2"]) == 2
    assert "unbounded order" in capsys.readouterr().err


def test_config_file(tmp_path, capsys):
    cfg = _write(tmp_path / "run.json", {"command": "model", "model": "box",
                                         "sides": [0.5, 0.5], "gamma_count": 2})
    assert main(["--config", cfg]) == 0
    assert len(capsys.readouterr().out.strip().splitlines()) == 3
    bad = _write(tmp_path / "bad.json", {"command": "model", "colour": "red"})
    assert main(["--config", bad]) == 2


def test_command_required():
    assert main([]) == 2
