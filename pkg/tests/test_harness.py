"""Monte-Carlo harness plumbing: confidence limits, verdicts, configs, determinism."""
import math

import numpy as np
import pytest
from scipy import stats

from lsbound import harness as H
from lsbound.errors import ConfigError


class TestClopperPearson:
    def test_zero_hits(self):
        R = 20000
        assert H.cp_upper(0, R) == pytest.approx(1 - 0.01 ** (1 / R), rel=1e-9)

    def test_against_binomial(self):
        k, R = 7, 500
        u = H.cp_upper(k, R)
        assert stats.binom.cdf(k, R, u) == pytest.approx(0.01, rel=1e-6)

    def test_all_hits(self):
        assert H.cp_upper(10, 10) == 1.0

    def test_invalid(self):
        with pytest.raises(ConfigError):
            H.cp_upper(5, 3)


class TestVerdict:
    def test_uninformative(self):
        assert H.verdict(1.2, 0.0) == H.VERDICT_SKIP and H.verdict(0.8, 0.0) == H.VERDICT_SKIP

    def test_pass_fail(self):
        assert H.verdict(0.1, 0.05) == "PASS" and H.verdict(0.1, 0.2) == "FAIL"

    def test_ceiling_rows_zero(self):
        stat = np.array([1.0, 2.0, 3.0])
        rows = H.ceiling_rows("c", stat, [1.0], [3.5])
        assert rows[0].frequency == 0.0 and rows[0].verdict == "PASS"

    def test_z_grid_targets(self):
        bound = lambda z: math.exp(-z)
        z = H.z_grid(bound, 0.01, 5, 0.9, 0.01)
        assert np.allclose([bound(v) for v in z], np.geomspace(0.9, 0.01, 5), rtol=1e-6)


class TestConfig:
    def test_unknown_suite(self):
        with pytest.raises(ConfigError):
            H.suite_config("nope")

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            H.suite_config("fixed-w", {"bogus": 1})

    def test_reps_floor(self):
        with pytest.raises(ConfigError):
            H.suite_config("fixed-w", reps=10)

    def test_per_suite_table(self):
        cfg = H.suite_config("fixed-w", {"fixed-w": {"n": 50}, "lemmas": {"configs": 3}})
        assert cfg["n"] == 50

    def test_empty_class(self):
        with pytest.raises(ConfigError, match="empty class"):
            H.run_suite("uniform-nonrandom", {"h_count": 0}, reps=100)


def test_fixed_w_small_run_deterministic(tmp_path):
    cfg = {"s": [2.0], "n": 50}
    a = H.run_suite("fixed-w", cfg, tmp_path / "a", seed=3, reps=400)
    b = H.run_suite("fixed-w", cfg, tmp_path / "b", seed=3, reps=400)
    assert a.passed
    for name in ("summary.csv", "report.json", "constants.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    header = (tmp_path / "a" / "summary.csv").read_text().splitlines()[0]
    assert header == "experiment,z,frequency,cp_upper,bound,verdict"


def test_jobs_do_not_change_results(tmp_path):
    cfg = {"s": [1.5], "n": 50}
    a = H.run_suite("fixed-w", cfg, seed=5, reps=600, jobs=1)
    b = H.run_suite("fixed-w", cfg, seed=5, reps=600, jobs=3)
    assert a.summary_csv() == b.summary_csv()
