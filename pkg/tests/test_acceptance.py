"""Acceptance criteria at desk scale.

Each test prints one line "PASS|FAIL criterion k: ..." (also collected into the
terminal summary) and then asserts.  Runtime budgets are part of each criterion.
Run standalone with ``python tests/test_acceptance.py``.
"""
import math
import time

import numpy as np
import pytest

from lsbound import empirical as E
from lsbound import harness as H
from lsbound import kde as K
from lsbound import regression as RG
from lsbound.framework import u_eps
from lsbound.params import delta_H

SEED = H.COMMON["seed"]
LINES: list[str] = []


def report(k: int, ok: bool, seconds: float, budget: float, detail: str) -> bool:
    ok = ok and seconds < budget
    line = f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail} [{seconds:.2f} s of {budget:g} s]"
    LINES.append(line)
    print(line)
    return ok


def failures(res: H.SuiteResult, prefix: str = "") -> list[str]:
    out = [f"{r.experiment}@z={r.z:.4g}" for r in res.rows if r.verdict == "FAIL" and r.experiment.startswith(prefix)]
    return out + [c.name for c in res.checks if not c.passed and c.name.startswith(prefix)]


@pytest.fixture(scope="module")
def majorant_run():
    t0 = time.perf_counter()
    res = H.run_suite("random-majorant", seed=SEED)
    return res, time.perf_counter() - t0


def test_criterion_1_constants():
    t0 = time.perf_counter()
    ln2 = math.log(2.0)
    cases = [
        (E.c1(4.0), 60.0 / math.log(4.0)),
        (u_eps(1.0), 4.0),
        (E.ubar_eps(0.5, 0.0, 3.0), u_eps(0.5)),
        (K.D_func(0.0, 1, 1.0, 1.0), 0.0),
        (K.D_func(0.0, 2, 7.0, 3.0), 0.0),
        (delta_H((0.1,), (0.1,)), 0.0),
        (delta_H((0.1,), (0.2,)), ln2),
        (delta_H((0.1, 0.4), (0.2, 0.1)), 2 * ln2),
        (delta_H((0.2,), (0.1,)), delta_H((0.1,), (0.2,))),
        (E.y_gamma(0.0, 0.01, 0.5), 25.0),
        (E.y_gamma(1.0, 1.0, math.sqrt(2.0)), 1.0),
        (E.y_gamma(0.1, 0.0, 0.5), 6.25),
        (RG.g_alpha_b(0.0, 1.0, 1.0, 3.0), 1.0),
        (RG.g_alpha_b(0.0, 2.0, 0.5, 1.5), 1.0),
    ]
    errs = [abs(a - b) / max(1.0, abs(b)) for a, b in cases]
    ok = max(errs) <= 1e-12
    assert report(1, ok, time.perf_counter() - t0, 1.0,
                  f"{len(cases)} exact constants, max error {max(errs):.1e}")


def test_criterion_2_metrics():
    t0 = time.perf_counter()
    checks = H.metric_checks(SEED, 10 ** 4)
    bad = [c.name for c in checks if not c.passed]
    assert report(2, not bad and len(checks) == 4, time.perf_counter() - t0, 5.0,
                  f"metric axioms on 1e4 triples for {', '.join(c.name for c in checks)}; failures {bad or 'none'}")


def test_criterion_3_lemmas():
    t0 = time.perf_counter()
    checks = H.lemma_checks(24, SEED, tol=1e-3)
    bad = [c.name for c in checks if not c.passed]
    worst = max(c.detail.get("worst_ratio", c.detail.get("factor", 0.0)) for c in checks)
    n_eval = min(c.detail["evaluations"] for c in checks if "evaluations" in c.detail)
    assert report(3, not bad, time.perf_counter() - t0, 60.0,
                  f"{len(checks)} lemma families, >= {n_eval} evaluations each, worst lhs/rhs {worst:.5f}; "
                  f"failures {bad or 'none'}")


def test_criterion_4_fixed_w(tmp_path):
    res = H.run_suite("fixed-w", out=tmp_path, seed=SEED)
    bad = failures(res)
    tested = sum(r.verdict == "PASS" for r in res.rows if not r.experiment.startswith("ceiling"))
    ceil = [r for r in res.rows if r.experiment.startswith("ceiling")]
    ok = not bad and tested > 0 and all(r.frequency == 0 for r in ceil) and res.config["reps"] == 20000
    assert report(4, ok, res.seconds, 180.0,
                  f"R={res.config['reps']}, {tested} informative z rows CP-bounded, {len(ceil)} ceiling rows at "
                  f"frequency 0; failures {bad or 'none'}")


def test_criterion_5_pathwise(majorant_run):
    res, sec = majorant_run
    names = [c for c in res.checks if c.name.startswith(("r1-", "sigma-hat", "consistency"))]
    bad = [c.name for c in names if not c.passed]
    med = next(c for c in names if c.name == "consistency-trend").detail["median_rel_error"]
    ok = not bad and len(names) == 7 and med["4000"] < med["250"]
    assert report(5, ok, sec, 120.0,
                  f"r1 and Sigma_hat<=M_s in all {res.config['reps']} realizations at n=250,1000,4000; "
                  f"median rel. error {med['250']:.2e} -> {med['4000']:.2e}; failures {bad or 'none'}")


def test_criterion_6_uniform_nonrandom():
    res = H.run_suite("uniform-nonrandom", seed=SEED)
    details = []
    ok = res.constants["class_size"] == 50 and res.config["reps"] == 10000
    for s in (1.5, 2.0):
        rows = [r for r in res.rows if r.experiment == f"thm4-s{s:g}" and r.verdict != H.VERDICT_SKIP]
        first = sorted(rows, key=lambda r: r.z)[:3]
        ok = ok and len(first) == 3 and all(r.verdict == "PASS" for r in first)
        details.append(f"s={s:g}: " + ", ".join(f"{r.cp_upper:.2e}<={r.bound:.2e}" for r in first))
    assert report(6, ok, res.seconds, 180.0, f"50 (K,h) pairs, R=1e4; {'; '.join(details)}")


def test_criterion_7_sandwich(majorant_run):
    res, sec = majorant_run
    sw = {c.name: c for c in res.checks}
    frac = sw["sandwich-ge-99pct"].detail["frac_ok"]
    ok = sw["sandwich-ge-99pct"].passed and sw["violations-outside-A"].passed and frac >= 0.99
    assert report(7, ok, sec, 180.0,
                  f"sandwich holds in {100 * frac:.1f}% of {res.config['sandwich_reps']} realizations at "
                  f"n={res.config['sandwich_n']}, violations inside event A: "
                  f"{sw['violations-outside-A'].detail['violations_inside_A']}")


def test_criterion_8_kde_constants():
    t0 = time.perf_counter()
    checks = H.kde_constant_checks() + [H.covering_checks(50, SEED)]
    bad = [c.name for c in checks if not c.passed]
    assert report(8, not bad and checks[-1].detail["pairs"] == 50, time.perf_counter() - t0, 10.0,
                  f"{len(checks) - 1} constants to 1e-9 and covering vs entropy on 50 (delta, box) pairs; "
                  f"failures {bad or 'none'}")


def test_criterion_9_regression():
    res = H.run_suite("regression", {"noises": ["gaussian", "laplace"]}, seed=SEED)
    bad = failures(res)
    tested = sum(r.verdict == "PASS" for r in res.rows)
    paths = [c for c in res.checks if c.name.startswith("pathwise")]
    ok = not bad and tested > 0 and len(paths) == 4 and res.config["reps"] == 20000
    assert report(9, ok, res.seconds, 180.0,
                  f"gaussian/laplace, s=1.5,3, R=2e4: {tested} informative rows CP-bounded, "
                  f"{len(paths)} pathwise checks; failures {bad or 'none'}")


def test_criterion_10_determinism(tmp_path):
    t0 = time.perf_counter()
    H.run_suite("fixed-w", out=tmp_path / "a", seed=SEED)
    H.run_suite("fixed-w", out=tmp_path / "b", seed=SEED)
    a, b = (tmp_path / "a" / "summary.csv").read_bytes(), (tmp_path / "b" / "summary.csv").read_bytes()
    assert report(10, a == b and len(a) > 0, time.perf_counter() - t0, 360.0,
                  f"two fixed-w runs, summary.csv byte-identical ({len(a)} bytes)")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
