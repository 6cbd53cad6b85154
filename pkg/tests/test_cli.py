import csv
import io
import json
import math
import subprocess
import sys

import pytest

from xtele import cli, fidelity
from xtele.report import COLUMNS

REF_SPEC = "r11=0.3,r22=0.15,r33=0.05,r44=0.5,r14=0.35,r23=0"
MIXED_SPEC = "r11=0.25,r22=0.25,r33=0.25,r44=0.25,r14=0,r23=0"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_header_order(capsys):
    code, out, _ = run(capsys, "eval", "--x", REF_SPEC)
    assert code == 0
    assert out.splitlines()[0] == ",".join(COLUMNS)


def test_eval_pure_maximal(capsys):
    code, out, _ = run(capsys, "eval", "--pure", "alpha=0.70710678")
    (row,) = rows(out)
    assert code == 0
    assert float(row["f_x"]) == pytest.approx(1.0, abs=1e-8)
    assert float(row["p_qext"]) == pytest.approx(1.0, abs=1e-8)
    assert float(row["f_x_use_0"]) == pytest.approx(1.0, abs=1e-8)


def test_eval_reference(capsys):
    code, out, _ = run(capsys, "eval", "--x", REF_SPEC)
    (row,) = rows(out)
    assert row["f_x"] == "0.833333333"
    assert row["f_x_use_0"] == "0.847845797"
    assert row["c_x_use_0_th"] == "0.00753414207"
    assert (row["q_plain"], row["q_use"], row["q_filtered"]) == ("true", "true", "true")
    assert row["method"] == "closed_form"


def test_eval_maximally_mixed(capsys):
    code, out, _ = run(capsys, "eval", "--x", MIXED_SPEC)
    (row,) = rows(out)
    assert code == 0
    assert (row["q_plain"], row["q_use"], row["q_filtered"]) == ("false", "false", "false")
    assert row["f_x"] == "0.5"


def test_eval_r11_zero_leaves_use_columns_empty(capsys):
    code, out, _ = run(capsys, "eval", "--x", "r11=0,r22=0.2,r33=0.3,r44=0.5,r14=0,r23=0.1")
    (row,) = rows(out)
    assert code == 0
    assert row["f_x_use"] == row["p_qext"] == row["c_x_use_th"] == row["q_use"] == ""
    assert row["q_plain"] == "false"


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--x", "r11=0.3,r22=oops"],
        ["eval", "--x", "r11=0.3"],
        ["eval", "--x", REF_SPEC.replace("r14=0.35", "r14=0.45")],  # not PSD
        ["eval", "--x", "r11=0.5,r22=0.15,r33=0.05,r44=0.3,r14=0.35,r23=0"],  # ordering
        ["eval", "--pure", "alpha=0.9"],
        ["eval", "--pure", "alpha=0.5", "--x", REF_SPEC],
        ["eval"],
        ["sweep", "--x", REF_SPEC, "--sweep", "r14=0:1"],
        ["sweep", "--x", REF_SPEC, "--sweep", "bogus=0:1:3"],
        ["eval", "--x", REF_SPEC, "--config", "/nonexistent/cfg"],
    ],
)
def test_bad_input_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_argparse_usage_error_is_exit_2():
    proc = subprocess.run([sys.executable, "-m", "xtele", "eval", "--method", "magic"], capture_output=True)
    assert proc.returncode == 2


def test_strict_principal(capsys):
    spec = "r11=0.1,r22=0.3,r33=0.3,r44=0.3,r14=0,r23=0"
    assert run(capsys, "eval", "--x", spec)[0] == 0
    assert run(capsys, "eval", "--x", spec, "--strict-principal")[0] == 2


def test_sweep_single_step_matches_eval(capsys):
    _, ev, _ = run(capsys, "eval", "--x", REF_SPEC)
    _, sw, _ = run(capsys, "sweep", "--x", REF_SPEC, "--sweep", "r14=0.35:0.35:1")
    assert sw == ev


def test_sweep_invalid_rows_kept(capsys):
    code, out, _ = run(capsys, "sweep", "--x", REF_SPEC, "--sweep", "r14=0:0.5:6")
    table = rows(out)
    assert code == 0
    assert len(table) == 6
    assert [r["valid"] for r in table] == ["true"] * 4 + ["false"] * 2
    assert table[-1]["r14"] == "0.5" and table[-1]["f_x"] == ""


def test_sweep_all_invalid(capsys):
    code, out, err = run(capsys, "sweep", "--x", REF_SPEC, "--sweep", "r14=0.5:0.6:3")
    assert code == 2 and out == "" and "invalid" in err


def test_sweep_pure_alpha_column(capsys):
    code, out, _ = run(capsys, "sweep", "--pure", "alpha=0.1", "--sweep", f"alpha=0:{1 / math.sqrt(2)}:21")
    assert code == 0
    for row in rows(out):
        a = math.sqrt(float(row["r11"]))
        assert float(row["f_x"]) == pytest.approx(2 / 3 + 2 * a * math.sqrt(1 - a * a) / 3, abs=1e-8)


def test_sweep_crossing(capsys):
    code, out, _ = run(capsys, "sweep", "--x", REF_SPEC, "--sweep", f"r14=0:{math.sqrt(0.15)}:101")
    for row in rows(out):
        gap = float(row["c14"]) - float(row["c_x_th"])
        if abs(gap) > 1e-8:
            assert (row["q_plain"] == "true") == (float(row["f_x"]) > 2 / 3) == (gap > 0)


def test_json(capsys):
    code, out, _ = run(capsys, "sweep", "--x", REF_SPEC, "--sweep", "r14=0.3:0.35:2", "--format", "json")
    data = json.loads(out)
    assert code == 0 and len(data) == 2
    assert list(data[0]) == list(COLUMNS)
    assert data[1]["q_filtered"] is True and data[1]["valid"] is True
    assert data[1]["f_x"] == pytest.approx(0.833333333)


def test_methods_agree(capsys):
    _, quad, _ = run(capsys, "eval", "--x", REF_SPEC, "--method", "quad")
    (q,) = rows(quad)
    assert q["method"] == "quadrature" and q["f_x_use_1"] == "0.58974359"
    _, mc, _ = run(capsys, "eval", "--x", REF_SPEC, "--method", "mc", "--samples", "20000", "--seed", "3")
    (m,) = rows(mc)
    assert m["n_samples"] == "20000" and m["seed"] == "3"
    assert abs(float(m["f_x_use"]) - 0.780739223) < 5 * float(m["std_err"])


def test_mc_deterministic_across_workers(capsys):
    base = ["eval", "--x", REF_SPEC, "--method", "mc", "--samples", "10000", "--seed", "5"]
    _, a, _ = run(capsys, *base)
    _, b, _ = run(capsys, *base, "--workers", "3")
    assert a == b


def test_config_defaults_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"# defaults\nx = {REF_SPEC}\nformat = json\nmethod=quad\n")
    code, out, _ = run(capsys, "--config", str(cfg), "eval")
    assert code == 0 and json.loads(out)[0]["method"] == "quadrature"
    code, out, _ = run(capsys, "--config", str(cfg), "eval", "--format", "csv")
    assert out.startswith("valid,")


def test_validate_deterministic(capsys):
    argv = ["validate", "--seed", "7", "--n", "15", "--mc-channels", "2", "--mc-samples", "4000"]
    code1, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2
    assert out1.rstrip().endswith("result: PASS")


def test_validate_corrupted_closed_form(capsys, monkeypatch):
    monkeypatch.setattr(fidelity, "closed_f_x", lambda x: 2 / 3 + (2 * x.r14 - x.r22) / 3)
    code, out, _ = run(capsys, "validate", "--seed", "1", "--n", "5", "--mc-channels", "0")
    assert code == 3
    assert "quadrature: x[" in out and "result: FAIL" in out


def test_internal_error_exit_1(capsys, monkeypatch):
    def boom(*a, **k):
        raise RuntimeError("kaboom")

    monkeypatch.setattr(cli.report, "build_row", boom)
    code, _, err = run(capsys, "eval", "--x", REF_SPEC)
    assert code == 1 and "kaboom" in err
