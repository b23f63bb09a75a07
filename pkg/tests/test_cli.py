import json

import numpy as np
import pytest

from tammes.cli import dispatch


def run(capsys, *argv):
    code = dispatch(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_no_arguments_is_usage_error(capsys):
    code, out, err = run(capsys)
    assert code == 1 and out == "" and "usage" in err


def test_unknown_flag_is_usage_error(capsys):
    code, _, err = run(capsys, "simplex", "--n", "3", "--d", "2", "--nope")
    assert code == 1 and "unrecognized" in err


def test_simplex_too_small_dimension(capsys):
    code, out, _ = run(capsys, "simplex", "--n", "5", "--d", "2")
    assert code == 1 and out == ""


def test_solve_small(capsys):
    code, out, _ = run(capsys, "solve", "--d", "3", "--n", "4", "--loss", "mma", "--seed", "1")
    assert code == 0
    data = json.loads(out)
    assert data["min_angle_deg"] >= 109.4
    assert data["seed"] == 1 and data["n"] == 4 and data["d"] == 3


def test_simplex_then_analyze(tmp_path, capsys):
    path = tmp_path / "s.json"
    assert dispatch(["simplex", "--n", "5", "--d", "4", "--out", str(path)]) == 0
    code, out, _ = run(capsys, "analyze", "--in", str(path))
    assert code == 0
    assert round(json.loads(out)["min_angle_deg"], 1) == 104.5


def test_solve_analyze_roundtrip_exact(tmp_path, capsys):
    path = tmp_path / "p.json"
    assert dispatch(["solve", "--d", "3", "--n", "12", "--iters", "500", "--seed", "4", "--out", str(path)]) == 0
    solved = json.loads(path.read_text())
    code, out, _ = run(capsys, "analyze", "--in", str(path), "--format-in", "json")
    assert code == 0
    assert json.loads(out)["min_angle_deg"] == solved["min_angle_deg"]


def test_analyze_histogram_csv(tmp_path, capsys):
    path = tmp_path / "w.csv"
    path.write_text("1,0\n0,1\n-1,0\n")
    code, out, _ = run(capsys, "analyze", "--in", str(path), "--format", "csv", "--bins", "4")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "bin_lo,bin_hi,count"
    assert sum(int(line.split(",")[2]) for line in lines[1:]) == 3


@pytest.mark.parametrize("content", ["1,0\n0,1,2\n", "1,0\nx,1\n", "1,0\n"])
def test_analyze_bad_input_is_io_error(tmp_path, capsys, content):
    path = tmp_path / "bad.csv"
    path.write_text(content)
    code, out, _ = run(capsys, "analyze", "--in", str(path))
    assert code == 3 and out == ""


def test_analyze_missing_file(capsys):
    code, _, _ = run(capsys, "analyze", "--in", "/nonexistent/w.csv")
    assert code == 3


def test_gradcurve_csv(capsys):
    code, out, _ = run(capsys, "gradcurve", "--samples", "5", "--wnorm", "2")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "theta_deg,cosine,mma,rf,log"
    assert len(lines) == 6
    assert all(float(line.split(",")[2]) == 0.5 for line in lines[1:])


def test_bench_small_csv(capsys):
    code, out, _ = run(capsys, "bench", "--seeds", "1", "--rows", "3,4", "--iters", "200")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "d,n,optimal,mma,cosine,rf,log"
    assert lines[1].startswith("3,4,109.5,")


def test_bench_bad_rows_is_usage_error(capsys):
    code, _, _ = run(capsys, "bench", "--rows", "3-4")
    assert code == 1


def test_demo_dump_layers(tmp_path, capsys):
    code, out, err = run(
        capsys, "demo", "--reg", "mma", "--epochs", "2", "--dump-layers", str(tmp_path / "layers")
    )
    assert code == 0
    assert "test accuracy" in err
    report = json.loads(out)
    assert len(report["per_layer_min_angle_deg"]) == 3
    w0 = np.loadtxt(tmp_path / "layers" / "layer0.csv", delimiter=",")
    assert w0.shape == (64, 2)
    code, out, _ = run(capsys, "analyze", "--in", str(tmp_path / "layers" / "layer2.csv"))
    assert json.loads(out)["min_angle_deg"] == report["per_layer_min_angle_deg"][2]


def test_out_to_unwritable_path(capsys):
    code, _, _ = run(capsys, "simplex", "--n", "3", "--d", "2", "--out", "/nonexistent/dir/x.json")
    assert code == 3


def test_bench_failed_cell_exit_code(monkeypatch, capsys):
    import math

    from tammes import bench

    monkeypatch.setattr(bench, "_run_cell", lambda cfg: (math.nan, "boom") if cfg.loss.name == "log" else (1.0, None))
    code, out, err = run(capsys, "bench", "--seeds", "1", "--rows", "3,4")
    assert code == 2
    assert out.splitlines()[1].endswith(",NA")
    assert "loss=log failed" in err
