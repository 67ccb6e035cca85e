import csv
import io
import json

import pytest

from pnindex.cli import RECIPES, emit_table, main


def _run(capsys, *argv):
    status = main(list(argv))
    return status, capsys.readouterr()


def test_recipe_lp4_exits_zero(capsys):
    status, out = _run(capsys, "recipe", "lp4-cubic-zero")
    doc = json.loads(out.out)
    assert status == 0 and doc["schema"] == 1 and doc["result"]["passed"]


def test_beta_family_recipe(capsys):
    status, out = _run(capsys, "recipe", "beta-quartic-family", "--beta", "2")
    assert status == 0
    assert json.loads(out.out)["result"]["norming_gap"] < 1e-8


def test_failing_recipe_exits_three(capsys):
    # the quartic gauge is not a norm here, so the claim does not hold
    status, out = _run(capsys, "recipe", "beta-quartic-family", "--beta", "5")
    assert status == 3
    assert json.loads(out.out)["result"]["passed"] is False


def test_beta_classify_command(capsys):
    status, out = _run(capsys, "beta-classify", "--beta", "-0.5")
    res = json.loads(out.out)["result"]
    assert status == 0 and res["is_norm"] is False and res["witness"]["margin"] > 0


@pytest.mark.parametrize(
    "argv, field",
    [
        (["radius", "--norm", "nope", "--poly", "lp-zero", "--p", "4"], "norm"),
        (["radius", "--norm", "lp", "--p", "4", "--poly", "nope"], "polynomial"),
        (["radius", "--norm", "lp", "--poly", "lp-zero"], "p"),
        (["recipe", "no-such-recipe"], "name"),
        (["radius", "--norm", "lp", "--p", "4", "--poly", "lp-zero", "--tol", "-1"], "tol"),
        (["radius", "--norm", "lp", "--p", "0.5", "--poly", "lp-zero"], "norm"),
    ],
)
def test_validation_errors_name_the_field(capsys, argv, field):
    status, out = _run(capsys, *argv)
    assert status == 2
    assert f"'{field}'" in out.err


def test_radius_csv_single_row(capsys):
    status, out = _run(capsys, "radius", "--norm", "lp", "--p", "4", "--poly", "lp-zero", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out.out)))
    assert status == 0 and len(rows) == 1
    assert rows[0]["certified"] == "true" and rows[0]["witness_angle"]


def test_empty_table_is_header_only():
    assert emit_table([]) == "k,norm,estimate,certified,seed,witness_angle\n"


def test_reals_use_17_digits():
    text = emit_table([{"k": 1, "estimate": 0.1}])
    assert "0.10000000000000001" in text


def test_config_file_and_atomic_output(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"command": "radius", "norm": {"variant": "AsymA", "params": {"a": 0.3}},
                               "polynomial": "asym-zero", "a": 0.3}))
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["--config", str(cfg), "--out", str(out1)]) == 0
    assert main(["--config", str(cfg), "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert json.loads(out1.read_text())["result"]["zero_certified"] is True
    assert [p.name for p in tmp_path.iterdir() if p.name.startswith(".")] == []


def test_samples_file(tmp_path, capsys):
    path = tmp_path / "s.csv"
    assert main(["radius", "--norm", "linf", "--poly", '{"degree": 2, "p1": [1, 0, 0], "p2": [0, 0, 0]}',
                 "--samples", str(path), "--n-samples", "64"]) == 0
    rows = list(csv.DictReader(path.open()))
    assert len(rows) > 64 and set(rows[0]) == {"angle", "x", "y", "fx", "fy", "value"}


def test_index_sweep_csv(capsys):
    status, out = _run(capsys, "index", "--norm", "l1", "--kmax", "2", "--starts", "2", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out.out)))
    assert status == 0 and [r["k"] for r in rows] == ["1", "2"]


@pytest.mark.parametrize("name", ["lp6-quintic-zero", "lp4-embedded-zero", "hilbert-rotation-zero",
                                  "asym-norm-zero", "interp-norm-zero", "eps-not-a-norm"])
def test_fast_recipes_pass(capsys, name):
    assert name in RECIPES
    status, out = _run(capsys, "recipe", name)
    assert status == 0, out.out
