"""Command line behavior, output formats, and exit codes."""

import json
import math

import numpy as np
import pytest

from apxmul import __version__
from apxmul.cli import main
from apxmul.imaging import GrayImage, load_pgm, save_pgm


@pytest.fixture()
def sample_pgm(tmp_path):
    rng = np.random.default_rng(11)
    arr = rng.integers(0, 256, size=(20, 24), dtype=np.uint8)
    path = tmp_path / "in.pgm"
    path.write_bytes(save_pgm(GrayImage(24, 20, arr.tobytes())))
    return path


def test_truth_table_csv_three_output(capsys):
    assert main(["truth-table", "--cell", "abcd1-exact", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "inputs,cout,carry,sum,value,exact,ed"
    assert len(lines) == 17
    assert lines[1].startswith("0000,")
    assert lines[-1].split(",") == ["1111", "1", "1", "1", "5", "5", "0"]


def test_truth_table_csv_approx_error_column(capsys):
    assert main(["truth-table", "--cell", "abcd1-approx", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 17
    assert lines[-1].split(",") == ["1111", "", "1", "1", "3", "5", "2"]
    eds = [int(row.split(",")[-1]) for row in lines[1:]]
    assert eds == [0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 1, 1, 2]


def test_truth_table_csv_two_output_blank_cout(capsys):
    assert main(["truth-table", "--cell", "abc1-approx", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 9
    for row in lines[1:]:
        assert row.split(",")[1] == ""


def test_truth_table_text(capsys):
    assert main(["truth-table", "--cell", "abc1-approx"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("cell: abc1-approx (arity 3)")
    assert "note:" in out
    assert "0.140625" in out and "0.0140" in out


def test_cell_stats_output(capsys):
    assert main(["cell-stats", "--cell", "ac4"]) == 0
    out = capsys.readouterr().out
    assert "cell = ac4" in out
    assert "p_err = 18/64 (0.28125)" in out
    assert "e_mean = -18/64 (-0.28125)" in out

    assert main(["cell-stats", "--cell", "ac1"]) == 0
    out = capsys.readouterr().out
    assert "e_mean = 25/64 (0.390625)" in out

    assert main(["cell-stats", "--cell", "abc1-exact"]) == 0
    out = capsys.readouterr().out
    assert "p_err = 0/64 (0)" in out


def test_analyze_json(capsys):
    assert main(["analyze", "--design", "proposed", "--json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["mean_ed"] == -45.25
    assert rep["max_ed"] == 833
    assert rep["pairs"] == 65536
    assert rep["zero_exact_skipped"] == 511
    assert 0.99 < rep["er"] < 1.0


def test_analyze_csv(capsys):
    assert main(["analyze", "--design", "ac2", "--csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "design,er,nmed,mred,mean_ed,max_ed"
    fields = lines[1].split(",")
    assert fields[0] == "ac2"
    assert fields[1] == "1.000000"
    assert fields[-1] == "1601"


def test_analyze_text(capsys):
    assert main(["analyze", "--design", "exact", "--width", "4"]) == 0
    out = capsys.readouterr().out
    assert "design = exact  width = 4  pairs = 256" in out
    assert "er      = 0.000000" in out
    assert "max_ed  = 0" in out
    assert "zero_exact_skipped = 31" in out


def test_analyze_sampled(capsys):
    argv = ["analyze", "--design", "proposed", "--width", "14",
            "--sample", "4000", "--seed", "5", "--json"]
    assert main(argv) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["pairs"] == 4000


def test_analyze_width_beyond_exhaustive_needs_sample(capsys):
    assert main(["analyze", "--design", "proposed", "--width", "14"]) == 1
    assert "sampled_report" in capsys.readouterr().err


def test_analyze_stdout_thread_invariant(capsys):
    assert main(["analyze", "--design", "ac5", "--json", "--threads", "1"]) == 0
    base = capsys.readouterr().out
    assert main(["analyze", "--design", "ac5", "--json", "--threads", "3"]) == 0
    assert capsys.readouterr().out == base


def test_compare_table_and_csv(tmp_path, capsys):
    out_csv = tmp_path / "table.csv"
    assert main(["compare", "--out", str(out_csv)]) == 0
    stdout = capsys.readouterr().out.splitlines()
    assert stdout[0].split() == ["design", "er", "nmed", "mred", "mean_ed", "max_ed"]
    assert stdout[-1] == "wrote %s" % out_csv
    lines = out_csv.read_text().splitlines()
    assert lines[0] == "design,er,nmed,mred,mean_ed,max_ed"
    names = [row.split(",")[0] for row in lines[1:]]
    assert names == ["exact", "ac1", "ac2", "ac3", "ac4", "ac5", "proposed"]
    mred = {row.split(",")[0]: float(row.split(",")[3]) for row in lines[1:]}
    for name in ("ac1", "ac2", "ac3", "ac4", "ac5"):
        assert mred["proposed"] < mred[name]
    assert mred["exact"] == 0.0


def test_bound_output(capsys):
    assert main(["bound", "--design", "proposed"]) == 0
    out = capsys.readouterr().out
    assert "design = proposed  width = 8" in out
    assert "static error bound = 1217" in out


def test_edge_detect_writes_p5(tmp_path, sample_pgm, capsys):
    out_path = tmp_path / "edges.pgm"
    argv = ["edge-detect", "--in", str(sample_pgm), "--design", "exact",
            "--out", str(out_path), "--psnr"]
    assert main(argv) == 0
    assert capsys.readouterr().out.strip() == "psnr = INF"
    edges = load_pgm(out_path.read_bytes())
    assert (edges.width, edges.height) == (24, 20)
    assert out_path.read_bytes().startswith(b"P5\n24 20\n255\n")


def test_edge_detect_psnr_number(tmp_path, sample_pgm, capsys):
    out_path = tmp_path / "edges.pgm"
    argv = ["edge-detect", "--in", str(sample_pgm), "--design", "proposed",
            "--out", str(out_path), "--psnr"]
    assert main(argv) == 0
    printed = capsys.readouterr().out.strip()
    assert printed.startswith("psnr = ")
    assert math.isfinite(float(printed.split("=")[1]))


def test_edge_detect_thread_invariant(tmp_path, sample_pgm, capsys):
    outs = []
    for t in ("1", "4"):
        out_path = tmp_path / ("edges%s.pgm" % t)
        argv = ["edge-detect", "--in", str(sample_pgm), "--design", "ac3",
                "--out", str(out_path), "--threads", t]
        assert main(argv) == 0
        outs.append(out_path.read_bytes())
    assert outs[0] == outs[1]
    capsys.readouterr()


def test_exit_code_unknown_design(capsys):
    assert main(["analyze", "--design", "ac9"]) == 1
    err = capsys.readouterr().err
    assert err.startswith("error:")
    assert "proposed" in err


def test_exit_code_unknown_cell(capsys):
    assert main(["truth-table", "--cell", "nope"]) == 1
    assert "choices" in capsys.readouterr().err


def test_exit_code_bad_threads(capsys):
    assert main(["analyze", "--design", "exact", "--threads", "0"]) == 1
    assert "--threads" in capsys.readouterr().err


def test_exit_code_missing_file(tmp_path, capsys):
    argv = ["edge-detect", "--in", str(tmp_path / "absent.pgm"),
            "--design", "exact", "--out", str(tmp_path / "o.pgm")]
    assert main(argv) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_exit_code_malformed_pgm(tmp_path, capsys):
    bad = tmp_path / "bad.pgm"
    bad.write_bytes(b"P5\n4 4\n255\nxx")
    argv = ["edge-detect", "--in", str(bad), "--design", "exact",
            "--out", str(tmp_path / "o.pgm")]
    assert main(argv) == 2
    assert "truncated" in capsys.readouterr().err


def test_exit_code_usage_errors(capsys):
    assert main([]) == 1
    assert main(["bogus"]) == 1
    assert main(["analyze", "--design", "exact", "--json", "--csv"]) == 1
    capsys.readouterr()


def test_help_and_version(capsys):
    assert main(["--help"]) == 0
    assert "apxmul" in capsys.readouterr().out
    assert main(["--version"]) == 0
    assert capsys.readouterr().out.strip() == "apxmul %s" % __version__
