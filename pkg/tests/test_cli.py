"""Command-line interface."""
import json
import math

import pytest
from click.testing import CliRunner

from lsbound.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_eval_c1_json(runner, tmp_path):
    cfg = write(tmp_path, "c.json", '{"s": 4}')
    res = runner.invoke(main, ["eval", "--quantity", "c1", "--config", cfg])
    assert res.exit_code == 0
    assert json.loads(res.output)["value"] == pytest.approx(60 / math.log(4), abs=1e-12)


def test_eval_toml(runner, tmp_path):
    cfg = write(tmp_path, "c.toml", "lambda_A = 0.0\nlambda_B = 0.01\ngamma = 0.5\n")
    res = runner.invoke(main, ["eval", "--quantity", "y_gamma", "--config", cfg])
    assert res.exit_code == 0 and json.loads(res.output)["value"] == pytest.approx(25.0)


def test_eval_structured(runner, tmp_path):
    cfg = write(tmp_path, "c.json", '{"s": 2, "n": 100, "h": 0.1}')
    res = runner.invoke(main, ["eval", "--quantity", "empirical_params", "--config", cfg])
    assert res.exit_code == 0 and "rho_s" in json.loads(res.output)["value"]


def test_eval_missing_key(runner, tmp_path):
    cfg = write(tmp_path, "c.json", "{}")
    res = runner.invoke(main, ["eval", "--quantity", "c1", "--config", cfg])
    assert res.exit_code != 0 and "missing" in res.output


def test_cover(runner, tmp_path):
    sp = write(tmp_path, "s.json", '{"kernels": ["triangle", "cosine"], "h_min": [0.1], "h_max": [0.4]}')
    res = runner.invoke(main, ["cover", "--space", sp, "--delta", str(math.log(2) / 2)])
    out = json.loads(res.output)
    assert res.exit_code == 0 and out["bandwidth_box"] == 2 and out["product"] >= 2


def test_run_unknown_suite(runner, tmp_path):
    res = runner.invoke(main, ["run", "--suite", "nope", "--out", str(tmp_path)])
    assert res.exit_code == 2


def test_run_suite(runner, tmp_path):
    cfg = write(tmp_path, "c.toml", "[fixed-w]\nn = 50\ns = [2.0]\n")
    res = runner.invoke(main, ["run", "--config", cfg, "--suite", "fixed-w", "--out", str(tmp_path / "o"),
                               "--seed", "1", "--reps", "300"])
    assert res.exit_code == 0, res.output
    assert {p.name for p in (tmp_path / "o").iterdir()} == {"report.json", "summary.csv", "constants.json"}


def test_bad_config_file(runner, tmp_path):
    cfg = write(tmp_path, "c.toml", "this is = = not toml")
    res = runner.invoke(main, ["run", "--config", cfg, "--suite", "lemmas", "--out", str(tmp_path / "o")])
    assert res.exit_code == 1 and "cannot parse" in res.output
