"""Command-line interface: exit codes, outputs, config defaults."""

import dataclasses
import json
import math
import os

import numpy as np
import pytest

from chfkit import cli, dataset
from conftest import make_uniform_case, write_table

PERIMETER = math.pi * 0.01


def case_sweep(n=12):
    return [make_uniform_case(
        test_id=i + 1,
        pressure=4e6 + 0.35e6 * i,
        mass_flux=1000.0 + 180.0 * i,
        heat_flux_avg=0.7e6 + 3e4 * i,
        inlet_subcooling=150e3 + 2e3 * i) for i in range(n)]


def write_xml(tmp_path, cases, name="data.xml", validate=True):
    path = tmp_path / name
    path.write_text(dataset.write_dataset(cases, validate=validate))
    return str(path)


def lut_path(tmp_path):
    return str(write_table(
        tmp_path / "table.tsv",
        [1e6, 5e6, 10e6, 15e6, 20e6],
        [300.0, 1000.0, 3000.0, 6000.0, 9600.0],
        [-0.6, -0.2, 0.0, 0.3, 0.8, 1.5],
        lambda p, g, x: 2e5 * (p / 1e6) + 3e2 * g + 5e5 * x + 3e6))


def sine_points_file(tmp_path, name="points.txt", length=2.0):
    z = np.linspace(0.0, length, 30)
    q = 1.0 + 0.35 * np.sin(np.pi * z / length)
    lines = ["# z q_norm"] + [f"{float(zi)!r} {float(qi)!r}"
                              for zi, qi in zip(z, q)]
    path = tmp_path / name
    path.write_text("\n".join(lines) + "\n")
    return str(path)


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------

def test_validate_clean_dataset(tmp_path, capsys):
    path = write_xml(tmp_path, case_sweep(5))
    assert cli.dispatch(["validate", "--data", path]) == 0
    out = capsys.readouterr().out
    assert "5 cases, 0 errors" in out


def test_validate_reports_errors_with_exit_1(tmp_path, capsys):
    bad = dataclasses.replace(case_sweep(1)[0], power=1.5e6 * PERIMETER * 2.0)
    path = write_xml(tmp_path, [bad], validate=False)
    assert cli.dispatch(["validate", "--data", path]) == 1
    captured = capsys.readouterr()
    assert "1 cases, 1 errors" in captured.out
    assert "consistency.power" in captured.err


def test_validate_malformed_xml(tmp_path, capsys):
    path = tmp_path / "broken.xml"
    path.write_text("<Data><TestID>1</TestID>")
    assert cli.dispatch(["validate", "--data", str(path)]) == 1
    assert "parse failed" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# usage errors
# ---------------------------------------------------------------------------

def test_usage_errors_exit_2(tmp_path, capsys):
    assert cli.dispatch(["frobnicate"]) == 2
    assert cli.dispatch(["validate"]) == 2            # missing --data
    assert cli.dispatch(["predict", "--model", "katto", "--data", "x"]) == 2
    capsys.readouterr()

    path = write_xml(tmp_path, case_sweep(2))
    assert cli.dispatch(["predict", "--model", "lut", "--data", path]) == 2
    assert "requires --lut-file" in capsys.readouterr().err
    assert cli.dispatch(["predict", "--model", "nn", "--data", path]) == 2
    assert "requires --model-file" in capsys.readouterr().err
    assert cli.dispatch(["evaluate", "--model", "lut", "--data", path,
                         "--out", str(tmp_path / "rep")]) == 2


def test_runtime_errors_exit_3(tmp_path, capsys):
    path = write_xml(tmp_path, case_sweep(2))
    missing = str(tmp_path / "no_such_file.xml")
    assert cli.dispatch(["predict", "--model", "bowring",
                         "--data", missing]) == 3
    # a structurally broken table is a runtime failure, not a usage one
    bad_table = tmp_path / "bad.tsv"
    bad_table.write_text("pressure_axis_Pa: 1e6\n")
    assert cli.dispatch(["predict", "--model", "lut", "--data", path,
                         "--lut-file", str(bad_table)]) == 3
    capsys.readouterr()


# ---------------------------------------------------------------------------
# predict
# ---------------------------------------------------------------------------

def test_predict_bowring_stdout(tmp_path, capsys):
    path = write_xml(tmp_path, case_sweep(3))
    assert cli.dispatch(["predict", "--model", "bowring", "--data", path]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split("\t") == ["test_id", "predicted", "predicted_power",
                                    "location", "skip_reason"]
    assert len(lines) == 4
    for row in lines[1:]:
        fields = row.split("\t")
        assert float(fields[1]) > 0.0
        assert float(fields[2]) > 0.0
        assert fields[4] == ""


def test_predict_lut_to_file(tmp_path):
    path = write_xml(tmp_path, case_sweep(3))
    out = tmp_path / "pred.tsv"
    assert cli.dispatch(["predict", "--model", "lut", "--data", path,
                         "--lut-file", lut_path(tmp_path),
                         "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 4
    assert all(float(r.split("\t")[1]) > 0.0 for r in lines[1:])


def test_predict_out_of_table_becomes_skip_row(tmp_path, capsys):
    # a table that stops at 5 MPa cannot serve 10+ MPa cases
    narrow = str(write_table(tmp_path / "narrow.tsv",
                             [1e6, 2e6, 5e6], [300.0, 1000.0, 3000.0],
                             [-0.6, 0.0, 0.8, 1.5],
                             lambda p, g, x: 3e6))
    path = write_xml(tmp_path, [make_uniform_case()])
    assert cli.dispatch(["predict", "--model", "lut", "--data", path,
                         "--lut-file", narrow]) == 0
    row = capsys.readouterr().out.splitlines()[1]
    assert row.split("\t")[4] == "OutOfTable"


# ---------------------------------------------------------------------------
# digitize
# ---------------------------------------------------------------------------

def test_digitize_stdout_fragment(tmp_path, capsys):
    points = sine_points_file(tmp_path)
    assert cli.dispatch(["digitize", "--points", points, "--length", "2.0",
                         "--perimeter", repr(PERIMETER),
                         "--shape", "middle-peaked"]) == 0
    captured = capsys.readouterr()
    assert "outlier(s) removed" in captured.err
    assert captured.out.count("<WallPower>") == 1
    wall = captured.out.split("<WallPower>")[1].split("</WallPower>")[0]
    assert len(wall.split()) == 40
    assert "<Shape>middle-peaked</Shape>" in captured.out
    assert "<Continuous>yes</Continuous>" in captured.out


def test_digitize_energy_gate(tmp_path, capsys):
    points = sine_points_file(tmp_path)
    declared = 1e6 * PERIMETER * 2.0
    common = ["digitize", "--points", points, "--length", "2.0",
              "--perimeter", repr(PERIMETER), "--q-av", "1e6",
              "--out", str(tmp_path / "frag.xml")]
    assert cli.dispatch(common + ["--declared-power", repr(declared)]) == 0
    assert "energy balance: pass" in capsys.readouterr().out
    assert (tmp_path / "frag.xml").exists()
    # a 3% power discrepancy fails the default 2% gate
    assert cli.dispatch(common + ["--declared-power",
                                  repr(declared * 1.03)]) == 1
    assert "energy balance: fail" in capsys.readouterr().out


def test_digitize_span_error_exits_3(tmp_path, capsys):
    z = np.linspace(0.0, 1.2, 20)          # covers 60% of the channel
    path = tmp_path / "short.txt"
    path.write_text("\n".join(f"{float(zi)!r} 1.0" for zi in z) + "\n")
    assert cli.dispatch(["digitize", "--points", str(path), "--length", "2.0",
                         "--perimeter", repr(PERIMETER)]) == 3
    assert capsys.readouterr().err.startswith("chfkit:")


# ---------------------------------------------------------------------------
# quality
# ---------------------------------------------------------------------------

def test_quality_stdout_and_filter(tmp_path, capsys):
    path = write_xml(tmp_path, case_sweep(2))
    assert cli.dispatch(["quality", "--data", path, "--test-id", "2"]) == 0
    out = capsys.readouterr().out
    assert "# test case 2" in out and "# test case 1" not in out
    assert out.splitlines()[1] == "z_m\th_J_per_kg\tx"
    assert cli.dispatch(["quality", "--data", path, "--test-id", "99"]) == 3
    capsys.readouterr()
    outdir = tmp_path / "profiles"
    assert cli.dispatch(["quality", "--data", path,
                         "--out", str(outdir)]) == 0
    assert sorted(os.listdir(outdir)) == ["quality_1.tsv", "quality_2.tsv"]


# ---------------------------------------------------------------------------
# evaluate
# ---------------------------------------------------------------------------

def test_evaluate_writes_reports(tmp_path, capsys):
    path = write_xml(tmp_path, case_sweep(8))
    table = lut_path(tmp_path)
    out = tmp_path / "report"
    assert cli.dispatch(["evaluate", "--model", "lut", "--data", path,
                         "--lut-file", table, "--out", str(out)]) == 0
    stdout = capsys.readouterr().out
    assert "lut on uniform: rmse" in stdout
    for name in ("parity.tsv", "summary.txt", "parity.svg"):
        assert (out / name).exists()


def test_evaluate_reruns_are_byte_identical(tmp_path, capsys):
    path = write_xml(tmp_path, case_sweep(8))
    table = lut_path(tmp_path)
    rc1 = cli.dispatch(["evaluate", "--model", "lut", "--data", path,
                        "--lut-file", table, "--out", str(tmp_path / "r1"),
                        "--threads", "1"])
    rc2 = cli.dispatch(["evaluate", "--model", "lut", "--data", path,
                        "--lut-file", table, "--out", str(tmp_path / "r2"),
                        "--threads", "3"])
    capsys.readouterr()
    assert rc1 == rc2 == 0
    for name in ("parity.tsv", "summary.txt", "parity.svg"):
        assert (tmp_path / "r1" / name).read_bytes() == \
            (tmp_path / "r2" / name).read_bytes()


# ---------------------------------------------------------------------------
# train
# ---------------------------------------------------------------------------

def test_train_then_predict_and_evaluate(tmp_path, capsys):
    path = write_xml(tmp_path, case_sweep(40))
    model_file = tmp_path / "model.chfnn"
    assert cli.dispatch(["train", "--data", path, "--out", str(model_file),
                         "--max-epochs", "30", "--seed", "1"]) == 0
    assert "trained on 40 cases" in capsys.readouterr().out
    assert model_file.exists()

    assert cli.dispatch(["predict", "--model", "nn", "--data", path,
                         "--model-file", str(model_file)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 41
    assert all(math.isfinite(float(r.split("\t")[1])) for r in lines[1:])

    out = tmp_path / "nn_report"
    assert cli.dispatch(["evaluate", "--model", "nn", "--data", path,
                         "--model-file", str(model_file),
                         "--out", str(out)]) == 0
    assert (out / "summary.txt").read_text().startswith("model: nn\n")


# ---------------------------------------------------------------------------
# config file defaults
# ---------------------------------------------------------------------------

def test_config_file_supplies_defaults(tmp_path, capsys):
    path = write_xml(tmp_path, case_sweep(2))
    table = lut_path(tmp_path)
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"lut_file": table}))
    assert cli.dispatch(["--config", str(config), "predict", "--model", "lut",
                         "--data", path]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 3


def test_config_env_var_and_flag_precedence(tmp_path, capsys, monkeypatch):
    path = write_xml(tmp_path, case_sweep(2))
    table = lut_path(tmp_path)
    env_config = tmp_path / "env.json"
    env_config.write_text(json.dumps({"lut_file": table}))
    monkeypatch.setenv(cli.CONFIG_ENV_VAR, str(env_config))
    assert cli.dispatch(["predict", "--model", "lut", "--data", path]) == 0
    capsys.readouterr()

    # an explicit flag beats the config default
    bad_config = tmp_path / "bad_default.json"
    bad_config.write_text(json.dumps({"lut_file": str(tmp_path / "nope.tsv")}))
    monkeypatch.setenv(cli.CONFIG_ENV_VAR, str(bad_config))
    assert cli.dispatch(["predict", "--model", "lut", "--data", path,
                         "--lut-file", table]) == 0
    capsys.readouterr()


def test_config_rejects_garbage(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.dispatch(["--config", str(bad), "validate", "--data", "x"]) == 2
    bad.write_text(json.dumps([1, 2, 3]))
    assert cli.dispatch(["--config", str(bad), "validate", "--data", "x"]) == 2
    assert cli.dispatch(["--config", str(tmp_path / "ghost.json"),
                         "validate", "--data", "x"]) == 2
    assert "bad config" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# plot-data
# ---------------------------------------------------------------------------

def test_plot_data_writes_svg(tmp_path, capsys):
    path = write_xml(tmp_path, case_sweep(6))
    out = tmp_path / "plots"
    assert cli.dispatch(["plot-data", "--data", path, "--out", str(out)]) == 0
    assert (out / "conditions.svg").exists()
    assert capsys.readouterr().out.strip().endswith("conditions.svg")
