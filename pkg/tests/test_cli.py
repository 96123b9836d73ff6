import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from singhelm.cli import main
from singhelm.fundsol import Parameters, default_k1


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def parse_csv(text):
    lines = text.splitlines()
    assert lines[0].startswith("# ")
    header = json.loads(lines[0][2:])
    rows = list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))
    return header, rows


def test_eval_single_row(capsys):
    code, out, _ = run_cli(capsys, "eval", "--point", "1:1,1,1:1,1,30")
    assert code == 0
    header, rows = parse_csv(out)
    assert header["command"] == "eval" and header["p"] == 3
    assert len(rows) == 1
    v = float(rows[0]["value"])
    assert math.isfinite(v) and v > 0
    assert rows[0]["error"] == ""


def test_eval_column_order(capsys):
    _, out, _ = run_cli(capsys, "eval", "--p", "4", "--point", "2:1,1,1,0:1,2,1,1")
    cols = out.splitlines()[1].split(",")
    assert cols == ["i", "x1", "x2", "x3", "x4", "x01", "x02", "x03", "x04",
                    "value", "path", "tail", "level", "error"]


def test_eval_singular_row_is_recorded(capsys):
    code, out, _ = run_cli(capsys, "eval", "--point", "1:1,1,1:1,2,1", "--point", "1:1,1,1:1,1,1")
    assert code == 2
    _, rows = parse_csv(out)
    assert rows[0]["error"] == ""
    assert "singular point" in rows[1]["error"]
    assert rows[1]["value"] == "nan"


def test_eval_bad_branch_is_row_error(capsys):
    code, out, _ = run_cli(capsys, "eval", "--point", "9:1,1,1:1,2,1")
    assert code == 2
    assert "branch index" in parse_csv(out)[1][0]["error"]


def test_eval_json(capsys):
    code, out, _ = run_cli(capsys, "eval", "--format", "json", "--seed", "17", "--mu", "0.5",
                           "--point", "3:0.2,0.15,0.2:0.1,0.1,3")
    assert code == 0
    doc = json.loads(out)
    assert doc["header"]["seed"] == 17 and doc["header"]["mu"] == 0.5
    assert doc["header"]["k"][1:] == [1.0] * 7
    assert doc["columns"][0] == "i" and doc["columns"][-1] == "error"
    assert doc["rows"][0]["i"] == 3 and doc["rows"][0]["path"] == "DirectSeries"


def test_eval_input_file(tmp_path, capsys):
    src = tmp_path / "points.csv"
    src.write_text("# comment\ni,x1,x2,x3,x01,x02,x03\n1,1,1,1,2,1,1\n5,0.2,0.15,0.2,0.1,0.1,3\n")
    out = tmp_path / "out.csv"
    code, stdout, _ = run_cli(capsys, "eval", "--in", str(src), "--out", str(out))
    assert code == 0 and stdout == ""
    _, rows = parse_csv(out.read_text())
    assert [r["i"] for r in rows] == ["1", "5"]
    assert rows[0]["path"] == "Integral"


def test_input_file_bad_header(tmp_path, capsys):
    src = tmp_path / "points.csv"
    src.write_text("i,x,y,z\n1,1,1,1\n")
    code, _, err = run_cli(capsys, "eval", "--in", str(src))
    assert code == 1 and "header" in err


@pytest.mark.parametrize("argv", [
    ["eval", "--alpha", "0.25,0.6,0.1", "--point", "1:1,1,1:1,2,1"],
    ["eval", "--alpha", "0.25,0.25", "--point", "1:1,1,1:1,2,1"],
    ["eval", "--p", "2", "--point", "1:1,1,1:1,2,1"],
    ["eval", "--k", "1,2,3", "--point", "1:1,1,1:1,2,1"],
    ["eval", "--rel-tol", "2", "--point", "1:1,1,1:1,2,1"],
    ["eval"],
    ["eval", "--in", "/nonexistent/points.csv"],
    ["eval", "--point", "garbage"],
])
def test_config_errors_exit_1(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == 1
    assert "error" in err


def test_argparse_errors_exit_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["eval", "--p", "three"])
    assert exc.value.code == 1


def test_output_is_reproducible(tmp_path, capsys):
    argv = ["eval", "--mu", "1", "--seed", "5", "--point", "2:0.3,0.2,0.25:0.15,0.1,2.5",
            "--point", "7:0.5,0.4,0.5:0.55,0.45,0.52"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli(capsys, *argv, "--out", str(a))[0] == 0
    assert run_cli(capsys, *argv, "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_residual_command(capsys):
    code, out, _ = run_cli(capsys, "residual", "--mu", "1", "--point", "4:0.2,0.15,0.2:0.1,0.1,3")
    assert code == 0
    _, rows = parse_csv(out)
    assert abs(float(rows[0]["order"]) - 2) < 0.3


def test_system_command(capsys):
    code, out, _ = run_cli(capsys, "system", "--point", "6:0.1,0.2,0.15,0.3")
    assert code == 0
    _, rows = parse_csv(out)
    assert [r["equation"] for r in rows] == ["1", "2", "3", "4"]
    assert all(abs(float(r["order"]) - 2) < 0.3 for r in rows)


def test_singularity_command_defaults(capsys):
    code, out, _ = run_cli(capsys, "singularity", "--p", "4", "--alpha", "0.1,0.25,0.4")
    assert code == 0
    _, rows = parse_csv(out)
    assert len(rows) == 3
    for r in rows:
        assert abs(float(r["slope"]) + 2) < 0.05
        assert abs(float(r["ratio"]) - 1) < 5e-3


def test_singularity_direction(capsys):
    code, out, _ = run_cli(capsys, "singularity", "--direction", "1,-1,0.5", "--point", "1,2,1")
    assert code == 0
    assert abs(float(parse_csv(out)[1][0]["slope"]) + 1) < 0.05


def test_selftest_quick_passes(capsys):
    code, out, _ = run_cli(capsys, "selftest", "--quick")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 8 and all(" PASS " in ln for ln in lines)


def test_selftest_loose_tolerance_fails(capsys):
    code, out, _ = run_cli(capsys, "selftest", "--quick", "--rel-tol", "1e-2")
    assert code == 3
    assert " FAIL " in out


def test_eval_grid_of_1000_rows(tmp_path, capsys):
    rng = np.random.default_rng(0)
    src = tmp_path / "grid.csv"
    lines = ["i,x1,x2,x3,x01,x02,x03"]
    far = []
    for n in range(1000):
        i = n % 8 + 1
        x = rng.uniform(0.05, 2.0, 3)
        if n % 10 == 0:
            # sigma -> 0 fringe: tiny coordinates, source far away
            x, x0 = rng.uniform(0.01, 0.02, 3), np.array([0.01, 0.01, 50.0])
            i = 1
            far.append(n)
        else:
            x0 = rng.uniform(0.05, 2.0, 3)
        lines.append(",".join([str(i)] + [repr(float(v)) for v in np.concatenate([x, x0])]))
    src.write_text("\n".join(lines) + "\n")
    out = tmp_path / "grid_out.csv"
    code, _, _ = run_cli(capsys, "eval", "--in", str(src), "--out", str(out))
    _, rows = parse_csv(out.read_text())
    assert len(rows) == 1000
    ok = [r for r in rows if not r["error"]]
    assert len(ok) >= 990
    assert code == (0 if len(ok) == 1000 else 2)
    prm = Parameters(3, (0.25,) * 3)
    k1 = default_k1(prm)
    for n in far:
        r = rows[n]
        x = np.array([float(r[c]) for c in ("x1", "x2", "x3")])
        x0 = np.array([float(r[c]) for c in ("x01", "x02", "x03")])
        r2 = float(((x - x0) ** 2).sum())
        lead = k1 * r2 ** (-prm.alpha_tot)
        # H0 = 1 + sum_k a b_k / d_k sigma_k + ..., here a b_k / d_k = 0.625
        sigma = 4 * x * x0 / r2
        assert abs(float(r["value"]) / lead - 1) <= 0.7 * sigma.sum()


def test_console_entry_points():
    for cmd in (["singhelm"], [sys.executable, "-m", "singhelm"]):
        res = subprocess.run(cmd + ["eval", "--point", "1:1,1,1:1,2,1"], capture_output=True, text=True)
        assert res.returncode == 0
        assert "Integral" in res.stdout
