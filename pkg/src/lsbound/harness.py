"""Seeded Monte-Carlo verification suites.

Every suite pairs empirical frequencies (with a one-sided Clopper-Pearson
upper limit) or pathwise inequalities with the bounds computed by the other
modules, and returns a SuiteResult that serializes to report.json,
summary.csv and constants.json.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy import optimize, stats

from . import kde as K
from .config import merge
from .empirical import (c1, corollary2_tail, corollary3, empirical_params, event_A, gamma_of_mu, sandwich,
                        theorem1_tail, theorem4_bound, assumption_L_factor, d_star, theorem5_assembly)
from .errors import ConfigError, LsboundError, PreconditionError
from .params import DELTA_H, BandwidthSet, FiniteSpace, build_slices, delta_H, entropy_bound_H
from .regression import check_noise, make_noise, theorem8_tail, theorem9_bound
from .sampling import Window, eta_path, lattice_norms, rng_for, spot_check, xi_path, ProcessRealization
from .weights import (Density, Kernel, WeightFunction, centered_norm, interpolation_sides, m_p, make_density,
                      make_kernel, sigma_s, verify_W2, young_check)

SUITES = ("fixed-w", "uniform-nonrandom", "random-majorant", "kde-thm7", "regression", "lemmas")
VERDICT_SKIP = "SKIPPED-UNINFORMATIVE"
STREAM = 2 ** 32  # replication indices of different experiments never collide


# ------------------------------------------------------------------ reports

@dataclass
class Row:
    experiment: str
    z: float
    frequency: float
    cp_upper: float
    bound: float
    verdict: str
    hits: int
    reps: int


@dataclass
class Check:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)


@dataclass
class SuiteResult:
    suite: str
    config: dict
    rows: list[Row] = field(default_factory=list)
    checks: list[Check] = field(default_factory=list)
    constants: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.verdict != "FAIL" for r in self.rows) and all(c.passed for c in self.checks)

    def summary_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["experiment", "z", "frequency", "cp_upper", "bound", "verdict"])
        for r in self.rows:
            wr.writerow([r.experiment, _g(r.z), _g(r.frequency), _g(r.cp_upper), _g(r.bound), r.verdict])
        for c in self.checks:
            wr.writerow([c.name, "", "", "", "", "PASS" if c.passed else "FAIL"])
        return buf.getvalue()

    def report(self) -> dict:
        return {"suite": self.suite, "passed": self.passed, "config": self.config,
                "rows": [asdict(r) for r in self.rows], "checks": [asdict(c) for c in self.checks]}

    def write(self, out: str | Path) -> Path:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(json.dumps(_jsonable(self.report()), indent=1, sort_keys=True))
        (out / "summary.csv").write_text(self.summary_csv())
        (out / "constants.json").write_text(json.dumps(_jsonable(self.constants), indent=1, sort_keys=True))
        return out


def _g(v) -> str:
    return "" if v is None else f"{float(v):.10g}"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def cp_upper(hits: int, reps: int, confidence: float = 0.99) -> float:
    """One-sided exact binomial upper confidence limit."""
    if reps < 1 or not 0 <= hits <= reps:
        raise ConfigError("invalid binomial counts")
    if hits == reps:
        return 1.0
    return float(stats.beta.ppf(confidence, hits + 1, reps - hits))


def verdict(bound: float, cp: float, cutoff: float = 0.8) -> str:
    if not bound < cutoff:
        return VERDICT_SKIP
    return "PASS" if cp <= bound else "FAIL"


def tail_rows(experiment: str, stat: np.ndarray, z: Sequence[float], thresholds: Sequence[float],
              bounds: Sequence[float], cutoff: float = 0.8, confidence: float = 0.99) -> list[Row]:
    """Frequency of {stat >= threshold(z)} against the bound at each z."""
    stat = np.asarray(stat)
    R = len(stat)
    rows = []
    for zi, th, b in zip(z, thresholds, bounds):
        hits = int(np.count_nonzero(stat >= th))
        cp = cp_upper(hits, R, confidence)
        rows.append(Row(experiment, float(zi), hits / R, cp, float(b), verdict(float(b), cp, cutoff), hits, R))
    return rows


def ceiling_rows(experiment: str, stat: np.ndarray, z: Sequence[float], thresholds: Sequence[float]) -> list[Row]:
    """Beyond a deterministic ceiling the frequency must be exactly zero."""
    R = len(stat)
    rows = []
    for zi, th in zip(z, thresholds):
        hits = int(np.count_nonzero(np.asarray(stat) >= th))
        rows.append(Row(experiment, float(zi), hits / R, cp_upper(hits, R), 0.0, "PASS" if hits == 0 else "FAIL",
                        hits, R))
    return rows


def solve_z(bound: Callable[[float], float], target: float, z0: float) -> float:
    """Smallest z >= z0 with bound(z) <= target, for a bound decreasing in z."""
    if bound(z0) <= target:
        return z0
    hi = max(2.0 * z0, 1e-6)
    for _ in range(200):
        if bound(hi) <= target:
            break
        hi *= 2.0
    else:
        raise LsboundError("bound does not fall below the target")
    lo = z0
    return float(optimize.brentq(lambda z: math.log(bound(z)) - math.log(target), lo, hi, xtol=1e-12 * hi,
                                 rtol=1e-12))


def z_grid(bound: Callable[[float], float], z0: float, points: int, hi: float, lo: float) -> np.ndarray:
    """z values at which the bound takes geometrically spaced values from hi down to lo."""
    targets = np.geomspace(hi, lo, points)
    return np.array([solve_z(bound, float(t), z0) for t in targets])


def _bound_lo(cfg: dict) -> float:
    """Smallest tested bound value: never below twice the zero-hit upper limit, which no count can beat."""
    return max(float(cfg["bound_lo"]), 2.0 * cp_upper(0, int(cfg["reps"]), cfg["confidence"]))


# ------------------------------------------------------------------ simulation

@dataclass(frozen=True)
class SimConfig:
    """One process, one weight, one design; the replication index selects the stream."""

    kind: str  # "xi" or "eta"
    n: int
    weight: WeightFunction
    density: Density
    seed: int
    noise: object | None = None
    stream: int = 0

    def __post_init__(self):
        if self.kind not in ("xi", "eta"):
            raise ConfigError("process kind must be xi or eta")
        if self.n < 1:
            raise ConfigError("n must be >= 1")
        if self.kind == "eta" and self.noise is None:
            raise ConfigError("eta needs a noise model")


def simulate(cfg: SimConfig, index: int) -> ProcessRealization:
    """Deterministic realization number `index`."""
    rng = rng_for(cfg.seed, cfg.stream * STREAM + index)
    X = cfg.density.sample(rng, cfg.n)
    if cfg.kind == "xi":
        return ProcessRealization(X, None, xi_path(cfg.weight, X, cfg.density))
    eps = cfg.noise.sample(rng, cfg.n)
    return ProcessRealization(X, eps, eta_path(cfg.weight, X, eps))


def simulate_batches(f: Density, n: int, reps: int, seed: int, stream: int, window: Window,
                     reducer: Callable[[np.ndarray, np.ndarray | None], np.ndarray], noise=None,
                     jobs: int = 1, batch: int = 500) -> np.ndarray:
    """Apply reducer(counts, eps_abs_sum) to binned replications; output is ordered by replication."""

    def work(i0: int, i1: int) -> np.ndarray:
        Xs, es = [], []
        for r in range(i0, i1):
            rng = rng_for(seed, stream * STREAM + r)
            Xs.append(f.sample(rng, n)[:, 0])
            if noise is not None:
                es.append(noise.sample(rng, n))
        X = np.stack(Xs)
        if noise is None:
            return reducer(window.bin(X), None)
        E = np.stack(es)
        return reducer(window.bin(X, E), np.abs(E).sum(axis=1))

    spans = [(i, min(i + batch, reps)) for i in range(0, reps, batch)]
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as ex:
            parts = list(ex.map(lambda ab: work(*ab), spans))
    else:
        parts = [work(a, b) for a, b in spans]
    return np.concatenate(parts, axis=0)


def norm_reducer(window: Window, weights: Sequence[WeightFunction], s_list: Sequence[float],
                 means: Sequence[np.ndarray] | None):
    """(B, members, len(s)) array of lattice L_s norms of the paths."""
    step = window.step

    def red(counts, _):
        out = np.empty((counts.shape[0], len(weights), len(s_list)))
        for j, w in enumerate(weights):
            rows, _ = window.paths(counts, w)
            if means is not None:
                rows = rows - means[j][None, :]
            for k, s in enumerate(s_list):
                out[:, j, k] = lattice_norms(rows, step, s)
        return out
    return red


# ------------------------------------------------------------------ defaults

COMMON = {"seed": 20240917, "jobs": 1, "cutoff": 0.8, "confidence": 0.99, "z_points": 20,
          "bound_hi": 0.95, "bound_lo": 1e-3}

DEFAULTS = {
    "fixed-w": {**COMMON, "n": 200, "s": [1.5, 2.0, 3.0], "reps": 20000, "kernel": "box", "ramp": 0.0625,
                "h": 0.1, "nodes_per_h": 64, "density": {"name": "uniform"}},
    "uniform-nonrandom": {**COMMON, "n": 200, "s": [1.5, 2.0], "reps": 10000, "eps": 1.0,
                          "kernels": ["box", {"name": "box", "ramp": 0.125}, "triangle", "cosine",
                                      "epanechnikov-lipschitz-clipped"],
                          "h_min": 0.05, "h_max": 0.3, "h_count": 10, "nodes_per_hmin": 16,
                          "density": {"name": "uniform"}},
    "random-majorant": {**COMMON, "n": [250, 1000, 4000], "s": 3.0, "reps": 5000, "kernel": "box",
                        "ramp": 0.0625, "h": 0.1, "nodes_per_h": 32, "density": {"name": "uniform"},
                        "sandwich_n": 10000, "sandwich_reps": 1000, "h_min": 0.02, "h_max": 0.2, "h_count": 8,
                        "nodes_per_hmin": 16, "eps": 1.0, "y": 2.0},
    "kde-thm7": {**COMMON, "kernels": ["box", "triangle", "cosine"], "h_min": [0.05], "h_max": [0.5],
                 "n": 1000000, "s": 3.0, "eps": 1.0, "y": 2.0, "q": 1.0, "f_inf": 1.0, "beta_K": 0.5,
                 "cover_pairs": 50, "csv_n": 1000, "csv_h_count": 8, "nodes_per_h": 16,
                 "trend_n": [100, 400, 1600], "trend_reps": 300, "trend_s": 1.5},
    "regression": {**COMMON, "n": 200, "s": [1.5, 3.0], "reps": 20000, "kernel": "box", "ramp": 0.0625,
                   "h": 0.1, "nodes_per_h": 64, "density": {"name": "uniform"},
                   "noises": ["gaussian", "laplace", "student-t"]},
    "lemmas": {**COMMON, "configs": 24, "triples": 10000},
}


def suite_config(name: str, config: dict | None = None, seed: int | None = None, reps: int | None = None,
                 jobs: int | None = None) -> dict:
    if name not in DEFAULTS:
        raise ConfigError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    config = dict(config or {})
    if name in config and isinstance(config[name], dict):  # per-suite table
        config = {**{k: v for k, v in config.items() if k not in DEFAULTS}, **config[name]}
    config = {k: v for k, v in config.items() if k not in SUITES}
    cfg = merge(DEFAULTS[name], config)
    if seed is not None:
        cfg["seed"] = int(seed)
    if reps is not None:
        cfg["reps"] = int(reps)
    if jobs is not None:
        cfg["jobs"] = int(jobs)
    if "reps" in cfg and cfg["reps"] < 100:
        raise ConfigError("reps must be >= 100")
    return cfg


def _kernel(spec) -> Kernel:
    if isinstance(spec, str):
        return make_kernel(spec)
    if isinstance(spec, dict):
        return make_kernel(spec["name"], int(spec.get("d", 1)), float(spec.get("ramp", 0.0625)))
    raise ConfigError(f"bad kernel spec {spec!r}")


def _density(spec) -> Density:
    spec = {"name": spec} if isinstance(spec, str) else dict(spec)
    name = spec.pop("name")
    d = int(spec.pop("d", 1))
    return make_density(name, d, **spec)


def _bandwidths(lo: float, hi: float, m: int) -> list[tuple[float]]:
    if m < 1:
        raise ConfigError("empty class")
    return [(float(h),) for h in np.geomspace(lo, hi, m)]


# ------------------------------------------------------------------ suite: fixed weight

def suite_fixed_w(cfg: dict, out: Path | None = None) -> SuiteResult:
    res = SuiteResult("fixed-w", cfg)
    f = _density(cfg["density"])
    ker = make_kernel(cfg["kernel"], 1, cfg["ramp"])
    n, h = int(cfg["n"]), float(cfg["h"])
    step = h / cfg["nodes_per_h"]
    w = ker.tabulate(step, h, n)
    w_fine = ker.tabulate(step / 2, h, n)
    win = Window.for_density(f, step)
    mean = win.mean_row(w, f, n)
    s_list = [float(s) for s in cfg["s"]]
    norms = simulate_batches(f, n, cfg["reps"], cfg["seed"], 1, win, norm_reducer(win, [w], s_list, [mean]),
                             jobs=cfg["jobs"])[:, 0, :]
    real = simulate(SimConfig("xi", n, w, f, cfg["seed"], stream=99), 0)
    err = spot_check(real, w, f)
    res.checks.append(Check("spot-check", err <= 1e-9 * n * w.sup, {"max_abs_error": err}))
    cut, conf = cfg["cutoff"], cfg["confidence"]
    for k, s in enumerate(s_list):
        stat = norms[:, k]
        p = empirical_params(w, f, s, n)
        pf = empirical_params(w_fine, f, s, n)
        rel = max(abs(p.rho_s - pf.rho_s) / pf.rho_s, abs(p.M_s - pf.M_s) / pf.M_s)
        res.checks.append(Check(f"quadrature-s{s:g}", rel <= 1e-3, {"rel_diff_G_2G": rel}))
        res.constants[f"s={s:g}"] = asdict(p)
        zs = z_grid(lambda z: theorem1_tail(p, z), 1e-9, cfg["z_points"], cfg["bound_hi"], _bound_lo(cfg))
        res.rows += tail_rows(f"thm1-s{s:g}", stat, zs, p.rho_s + zs, theorem1_tail(p, zs), cut, conf)
        if s < 2:
            thr0, _ = corollary2_tail(p.M_s, n, s, 1.0)
            bf = lambda z: corollary2_tail(p.M_s, n, s, z)[1]
            zs = z_grid(bf, 1e-9, cfg["z_points"], cfg["bound_hi"], _bound_lo(cfg))
            res.rows += tail_rows(f"cor2-s{s:g}", stat, zs, thr0 + zs, [bf(z) for z in zs], cut, conf)
        elif s > 2:
            rho_t, _, _ = corollary3(w, f, s, n, 1.0)
            bf = lambda z: corollary3(w, f, s, n, z)[2]
            zs = z_grid(bf, 1e-9, cfg["z_points"], cfg["bound_hi"], _bound_lo(cfg))
            res.rows += tail_rows(f"cor3-s{s:g}", stat, zs, rho_t + zs, [bf(z) for z in zs], cut, conf)
        ceil = 2.0 * n * p.M_s
        zc = ceil * np.array([1.0 + 1e-9, 1.25, 1.5])
        res.rows += ceiling_rows(f"ceiling-s{s:g}", stat, zc, p.rho_s + zc)
        res.checks.append(Check(f"pathwise-ceiling-s{s:g}", bool(stat.max() <= ceil * (1 + 1e-12)),
                                {"max_norm": float(stat.max()), "ceiling": ceil}))
    return res


# ------------------------------------------------------------------ suite: non-random uniform bound

def suite_uniform_nonrandom(cfg: dict, out: Path | None = None) -> SuiteResult:
    res = SuiteResult("uniform-nonrandom", cfg)
    f = _density(cfg["density"])
    D = K.KernelDictionary([_kernel(k) for k in cfg["kernels"]])
    n = int(cfg["n"])
    hs = _bandwidths(cfg["h_min"], cfg["h_max"], int(cfg["h_count"]))
    step = cfg["h_min"] / cfg["nodes_per_hmin"]
    cls, params = K.kde_class(D, hs, n, step, 1)
    win = Window.for_density(f, step)
    means = [win.mean_row(w, f, n) for w in cls.weights]
    s_list = [float(s) for s in cfg["s"]]
    norms = simulate_batches(f, n, cfg["reps"], cfg["seed"], 2, win,
                             norm_reducer(win, cls.weights, s_list, means), jobs=cfg["jobs"], batch=250)
    eps = float(cfg["eps"])
    res.constants["class_size"] = len(cls)
    for k, s in enumerate(s_list):
        order = s if s < 2 else 2.0
        fac = assumption_L_factor(cls, order)
        space = cls.space.scaled(fac)
        try:
            theorem4_bound(cls, s, eps, 1e-12, f=f, space=space)
            floor = 1e-12
        except PreconditionError as exc:
            floor = float(exc.details["floor"])
        prob = lambda z: theorem4_bound(cls, s, eps, z, f=f, space=space).probability
        zs = z_grid(prob, floor, cfg["z_points"], cfg["bound_hi"], _bound_lo(cfg))
        results = [theorem4_bound(cls, s, eps, float(z), f=f, space=space) for z in zs]
        # event: some member exceeds its own majorant
        hits_stat = []
        for r in results:
            hits_stat.append((norms[:, :, k] >= r.majorant[None, :]).any(axis=1))
        R = norms.shape[0]
        informative = 0
        for z, r, ev in zip(zs, results, hits_stat):
            hits = int(ev.sum())
            cp = cp_upper(hits, R, cfg["confidence"])
            v = verdict(r.probability, cp, cfg["cutoff"])
            if v != VERDICT_SKIP:
                informative += 1
            res.rows.append(Row(f"thm4-s{s:g}", float(z), hits / R, cp, r.probability, v, hits, R))
        res.checks.append(Check(f"informative-points-s{s:g}", informative >= 3, {"count": informative}))
        res.constants[f"s={s:g}"] = {"L_rescale": fac, "z_floor": floor,
                                     "first": results[0].to_dict() | {"majorant": None}}
    return res


# ------------------------------------------------------------------ suite: random majorant

def _majorant_reducer(win: Window, w2s: Sequence[WeightFunction], means2: Sequence[np.ndarray], n: int, s: float):
    """Per member: Sigma_hat_s and ||xi_{w^2}||_{s/2}."""

    def red(counts, _):
        out = np.empty((counts.shape[0], len(w2s), 2))
        for j, w2 in enumerate(w2s):
            raw, _ = win.paths(counts, w2)
            out[:, j, 0] = np.sqrt(lattice_norms(np.clip(raw / n, 0.0, None), win.step, s / 2.0))
            out[:, j, 1] = lattice_norms(raw - means2[j][None, :], win.step, s / 2.0)
        return out
    return red


def suite_random_majorant(cfg: dict, out: Path | None = None) -> SuiteResult:
    res = SuiteResult("random-majorant", cfg)
    f = _density(cfg["density"])
    ker = make_kernel(cfg["kernel"], 1, cfg["ramp"])
    s = float(cfg["s"])
    h = float(cfg["h"])
    step = h / cfg["nodes_per_h"]
    win = Window.for_density(f, step)
    medians = {}
    for i, n in enumerate(cfg["n"]):
        n = int(n)
        w = ker.tabulate(step, h, n)
        w2 = w.square()
        Sig = sigma_s(w, f, s)
        Ms = m_p(w, s)
        out_ = simulate_batches(f, n, cfg["reps"], cfg["seed"], 10 + i, win,
                                _majorant_reducer(win, [w2], [win.mean_row(w2, f, n)], n, s), jobs=cfg["jobs"])
        sig_hat, xw2 = out_[:, 0, 0], out_[:, 0, 1]
        lhs = np.abs(sig_hat - Sig)
        rhs = np.sqrt(xw2 / n)
        viol_r1 = int(np.count_nonzero(lhs > rhs * (1 + 1e-9) + 1e-15 * Sig))
        viol_m = int(np.count_nonzero(sig_hat > Ms * (1 + 1e-12)))
        med = float(np.median(lhs / Sig))
        medians[n] = med
        res.checks.append(Check(f"r1-n{n}", viol_r1 == 0, {"violations": viol_r1, "reps": len(lhs)}))
        res.checks.append(Check(f"sigma-hat-le-Ms-n{n}", viol_m == 0, {"violations": viol_m}))
        res.constants[f"n={n}"] = {"Sigma_s": Sig, "M_s": Ms, "median_rel_error": med}
    ns = sorted(medians)
    res.checks.append(Check("consistency-trend", medians[ns[-1]] < medians[ns[0]],
                            {"median_rel_error": {str(k): medians[k] for k in ns}}))
    res.checks += _sandwich_part(cfg, f, ker, s, res.constants)
    return res


def _sandwich_part(cfg: dict, f: Density, ker: Kernel, s: float, constants: dict) -> list[Check]:
    n = int(cfg["sandwich_n"])
    eps = float(cfg["eps"])
    hs = [h[0] for h in _bandwidths(cfg["h_min"], cfg["h_max"], int(cfg["h_count"]))]
    step = cfg["h_min"] / cfg["nodes_per_hmin"]
    ws = [ker.tabulate(step, h, n) for h in hs]
    win = Window.for_density(f, step)
    w2s = [w.square() for w in ws]
    prms = [empirical_params(w, f, s, n) for w in ws]
    U = np.array([p.U_xi for p in prms])
    Ms = np.array([p.M_s for p in prms])
    gam = gamma_of_mu(n * min(hs), s)
    space = FiniteSpace.from_points([(h,) for h in hs], DELTA_H)
    slices = build_slices(U, eps, space)
    out_ = simulate_batches(f, n, cfg["sandwich_reps"], cfg["seed"], 20, win,
                            _majorant_reducer(win, w2s, [win.mean_row(w2, f, n) for w2 in w2s], n, s),
                            jobs=cfg["jobs"], batch=100)
    C1 = c1(s)
    ok_count, bad_in_A, A_count = 0, 0, 0
    for r in range(out_.shape[0]):
        U_hat = C1 * (math.sqrt(n) * out_[r, :, 0] + 2.0 * n ** (1.0 / s) * Ms)
        lo, hi = sandwich(U, U_hat, gam, s, eps)
        good = bool(lo.all() and hi.all())
        A, _ = event_A(out_[r, :, 1], slices, gam, eps)
        ok_count += good
        A_count += A
        if not good and A:
            bad_in_A += 1
    R = out_.shape[0]
    lev = 4.0 * C1 * (1.0 + eps) * gam
    constants["sandwich"] = {"n": n, "gamma": gam, "inflation": lev, "frac_ok": ok_count / R,
                             "frac_event_A": A_count / R, "U": U.tolist(), "slices": slices.count}
    return [Check("sandwich-ge-99pct", ok_count / R >= 0.99, {"frac_ok": ok_count / R, "inflation": lev}),
            Check("violations-outside-A", bad_in_A == 0, {"violations_inside_A": bad_in_A})]


# ------------------------------------------------------------------ suite: kernel classes

def kde_constant_checks() -> list[Check]:
    """Worked examples against independent arithmetic, to 1e-9."""
    out = []

    def close(name, got, want, tol=1e-9):
        out.append(Check(name, abs(got - want) <= tol * max(1.0, abs(want)), {"got": got, "want": want}))

    close("D(ln2)", K.D_func(math.log(2), 1, 1, 1), 2 * (math.log(2) + 0.5 + 1.0))
    close("D(0)", K.D_func(0.0, 1, 1, 1), 0.0)
    close("D'(0)", K.D_prime(0.0, 1, 1, 1), 2.5)
    close("vartheta0_1", K.vartheta0_i(1, 4.0, 1.0, 1, 1.0, 1.0, 1.0), 10 * 60 / math.log(4))
    bw = BandwidthSet((0.1, 0.1), (0.4, 0.4))
    close("A_H", K.A_H(bw), math.log(4) ** 2)
    close("B_H", K.B_H(bw), 4.0)
    close("gamma", gamma_of_mu(1000.0, 3.0), 1000 ** (1 / 3 - 1 / 2))
    # y_* for s in (2,4): alpha_2 = 1, alpha_* = 2, vartheta_1 = 1/(16 148)
    r = K.theorem7_assembly(1, _unit_dictionary(), BandwidthSet((0.001,), (0.5,)), 1000, 1.0, 3.0, 1.0, 1.0,
                            check=False)
    close("y_star_1", r.y_star, 10.0 / 2368.0)
    th0 = 10 * 45 / math.log(3)
    close("C_star_1", r.C_star, 1 + 2 * th0 * (1.0 + 1000 ** (-1 / 6) + 1000 ** (-1 / 3)))
    return out


def _unit_dictionary() -> K.KernelDictionary:
    """Dictionary whose constants are L_K = k_1 = k_inf = 1 (for arithmetic examples)."""
    base = make_kernel("box", 1, 0.25)
    unit = Kernel("unit", base.func, 1, 1.0, 1.0, 1.0)
    return K.KernelDictionary([unit])


def covering_checks(pairs: int, seed: int) -> Check:
    rng = rng_for(seed, 5 * STREAM)
    worst, cnt = -math.inf, 0
    for _ in range(pairs):
        d = int(rng.integers(1, 3))
        lo = rng.uniform(0.005, 0.5, d)
        hi = np.minimum(lo * np.exp(rng.uniform(0.0, 5.0, d)), 1.0)
        bw = BandwidthSet(tuple(lo), tuple(hi))
        delta = float(np.exp(rng.uniform(math.log(0.01), 0.0)))
        lhs = math.log(bw.covering_number(delta))
        rhs = entropy_bound_H(bw, delta)
        worst = max(worst, lhs - rhs)
        cnt += 1
    return Check("H-covering-vs-entropy", worst <= 1e-12, {"pairs": cnt, "max_excess": worst})


def suite_kde(cfg: dict, out: Path | None = None) -> SuiteResult:
    res = SuiteResult("kde-thm7", cfg)
    res.checks += kde_constant_checks()
    res.checks.append(covering_checks(int(cfg["cover_pairs"]), cfg["seed"]))
    D = K.KernelDictionary([_kernel(k) for k in cfg["kernels"]])
    bw = BandwidthSet(tuple(cfg["h_min"]), tuple(cfg["h_max"]))
    for i in (1, 2):
        r = K.theorem7_assembly(i, D, bw, int(cfg["n"]), float(cfg["f_inf"]), float(cfg["s"]), float(cfg["eps"]),
                                float(cfg["y"]), float(cfg["q"]), beta_K=float(cfg["beta_K"]),
                                C_K=D.C_K(float(cfg["beta_K"])), check=False)
        res.constants[f"W{i}"] = r.to_dict()
    # entropy of the finite dictionary x bandwidth grid against the product bound
    if bw.d == 1:
        step = bw.h_min[0] / cfg["nodes_per_h"]
        hs = _bandwidths(bw.h_min[0], bw.h_max[0], int(cfg["csv_h_count"]))
        cls, _ = K.kde_class(D, hs, int(cfg["csv_n"]), step, 1)
        bK = float(cfg["beta_K"])
        CK = D.C_K(bK)
        worst = -math.inf
        for delta in np.geomspace(0.02, 1.0, 15):
            lhs = math.log(cls.space.covering_number(float(delta)))
            rhs = CK + delta ** -bK + entropy_bound_H(bw, float(delta))
            worst = max(worst, lhs - rhs)
        res.checks.append(Check("product-entropy", worst <= 1e-12, {"max_excess": worst, "C_K": CK}))
        if out is not None:
            Path(out).mkdir(parents=True, exist_ok=True)
            K.export_majorants_csv(Path(out) / "majorants.csv", D, hs, int(cfg["csv_n"]), step, float(cfg["s"]),
                                   make_density("uniform"))
        res.checks.append(_trend_check(cfg, D))
    return res


def _trend_check(cfg: dict, D: K.KernelDictionary) -> Check:
    """Mean excess sup_w[||xi_w||_s - (1+eps) U(w)]_+ over n with V_hmax = (ln n)^-2."""
    s = float(cfg["trend_s"])
    eps = float(cfg["eps"])
    f = make_density("uniform")
    means = {}
    for i, n in enumerate(cfg["trend_n"]):
        n = int(n)
        hmax = math.log(n) ** -2
        hs = _bandwidths(hmax / 4, hmax, 3)
        step = hs[0][0] / 16
        ws = [K.phi1(D, k, h, n, step) for k in range(len(D)) for h in hs]
        U = np.array([empirical_params(w, None, s, n).U_xi for w in ws])
        win = Window.for_density(f, step)
        norms = simulate_batches(f, n, int(cfg["trend_reps"]), cfg["seed"], 30 + i, win,
                                 norm_reducer(win, ws, [s], [win.mean_row(w, f, n) for w in ws]))[:, :, 0]
        exc = np.clip(norms - (1 + eps) * U[None, :], 0.0, None).max(axis=1)
        means[n] = float(exc.mean())
    ns = sorted(means)
    ok = all(means[a] >= means[b] for a, b in zip(ns, ns[1:]))
    return Check("thm6-trend", ok, {"mean_excess": {str(k): v for k, v in means.items()}})


# ------------------------------------------------------------------ suite: regression

def suite_regression(cfg: dict, out: Path | None = None) -> SuiteResult:
    res = SuiteResult("regression", cfg)
    f = _density(cfg["density"])
    ker = make_kernel(cfg["kernel"], 1, cfg["ramp"])
    n, h = int(cfg["n"]), float(cfg["h"])
    step = h / cfg["nodes_per_h"]
    w = ker.tabulate(step, h, n)
    win = Window.for_density(f, step)
    s_list = [float(s) for s in cfg["s"]]
    base = norm_reducer(win, [w], s_list, None)

    def red(counts, abs_sum):
        return np.concatenate([base(counts, None)[:, 0, :], abs_sum[:, None]], axis=1)

    for j, name in enumerate(cfg["noises"]):
        noise = make_noise(name)
        cert = check_noise(noise, seed=cfg["seed"])
        res.checks.append(Check(f"noise-certificate-{name}", cert["ok"],
                                {k: v for k, v in cert.items() if k not in ("x", "freq")}))
        arr = simulate_batches(f, n, cfg["reps"], cfg["seed"], 40 + j, win, red, noise=noise, jobs=cfg["jobs"])
        for k, s in enumerate(s_list):
            stat = arr[:, k]
            prm, _ = theorem8_tail(w, f, noise, s, n, 1.0)
            viol = int(np.count_nonzero(stat > prm.M_s * arr[:, -1] * (1 + 1e-12)))
            res.checks.append(Check(f"pathwise-{name}-s{s:g}", viol == 0, {"violations": viol}))
            bf = lambda z: float(theorem8_tail(w, f, noise, s, n, z)[1])
            zs = z_grid(bf, 1e-9, cfg["z_points"], cfg["bound_hi"], _bound_lo(cfg))
            res.rows += tail_rows(f"thm8-{name}-s{s:g}", stat, zs, prm.rho_s + zs, [bf(z) for z in zs],
                                  cfg["cutoff"], cfg["confidence"])
            res.constants[f"{name}/s={s:g}"] = asdict(prm)
    return res


# ------------------------------------------------------------------ suite: lemmas and metrics

def metric_checks(seed: int, triples: int = 10000) -> list[Check]:
    """Symmetry, identity and triangle inequality on random triples (8-ulp rounding slack)."""
    rng = rng_for(seed, 6 * STREAM)
    D = K.KernelDictionary([make_kernel("box"), make_kernel("triangle"), make_kernel("cosine"),
                            make_kernel("box", 1, 0.125)])
    m = len(D)
    slack = 8 * np.finfo(float).eps
    checks = []

    def run(name, sample, dist):
        bad = 0
        for _ in range(triples):
            a, b, c = sample(), sample(), sample()
            ab, ba, bc, ac, aa = dist(a, b), dist(b, a), dist(b, c), dist(a, c), dist(a, a)
            scale = max(ab, bc, ac, 1e-300)
            if ab != ba or aa != 0 or ac > ab + bc + slack * scale or ab < 0:
                bad += 1
        checks.append(Check(f"metric-{name}", bad == 0, {"triples": triples, "failures": bad}))

    hd = int(rng.integers(1, 3))
    hpt = lambda: tuple(np.exp(rng.uniform(math.log(0.01), 0.0, hd)))
    run("Delta_H", hpt, delta_H)
    z1 = lambda: (int(rng.integers(m)), tuple(np.exp(rng.uniform(math.log(0.01), 0.0, 1))))
    th = float(rng.uniform(0.5, 5.0))
    run("d1", z1, lambda a, b: K.d1(D, a, b, th))
    z2 = lambda: z1() + z1()
    run("d2", z2, lambda a, b: K.d2(D, a, b, th))
    ms, mh, ks = float(rng.uniform(0.2, 1.0)), float(rng.uniform(0.2, 1.0)), float(rng.uniform(1.0, 10.0))
    run("d_star", z1, lambda a, b: float(d_star(np.array(K.d1(D, a, b)), ks, ms, mh)))
    return checks


def _lemma_configs(count: int, seed: int):
    rng = rng_for(seed, 7 * STREAM)
    names = ["box", "triangle", "cosine", "epanechnikov-lipschitz-clipped"]
    dens = ["uniform", "histogram", "trunc-gauss-mix"]
    for _ in range(count):
        yield {"kernel": names[int(rng.integers(len(names)))], "kernel2": names[int(rng.integers(len(names)))],
               "h": float(rng.uniform(0.05, 0.3)), "h2": float(rng.uniform(0.05, 0.3)),
               "density": dens[int(rng.integers(len(dens)))], "s": float(rng.uniform(2.2, 5.0)),
               "n": int(rng.integers(50, 500)), "p": float(rng.uniform(1.1, 3.0))}


def lemma_checks(count: int, seed: int, tol: float = 1e-3) -> list[Check]:
    worst: dict[str, float] = {}
    counts: dict[str, int] = {}

    def record(name, lhs, rhs):
        ratio = lhs / rhs if rhs > 0 else (0.0 if lhs <= 0 else math.inf)
        worst[name] = max(worst.get(name, -math.inf), ratio)
        counts[name] = counts.get(name, 0) + 1

    dict_all = K.KernelDictionary([make_kernel(k) for k in ("box", "triangle", "cosine",
                                                            "epanechnikov-lipschitz-clipped")])
    idx = {k.name: i for i, k in enumerate(dict_all.kernels)}
    for c in _lemma_configs(count, seed):
        s, n, h, h2 = c["s"], c["n"], c["h"], c["h2"]
        step = min(h, h2) / 64
        f = make_density(c["density"])
        k1, k2 = idx[c["kernel"]], idx[c["kernel2"]]
        w = K.phi1(dict_all, k1, (h,), n, step)
        for p in (1.0, 2 * s / (s + 2), 2.0, s):
            record("lepski", centered_norm(w, f, p), 2.0 * m_p(w, p, f))
        a2 = verify_W2(w, 0.5, 1.0).ratio
        mu = n * w.support_measure
        for p, q in ((1.0, 2.0), (2.0, s), (2.0, math.inf)):
            record("tech_new1", *interpolation_sides(w, n, 0.5, a2, mu, p, q))
        record("sigg-Sigma", sigma_s(w, f, s), m_p(w, 2.0) * f.sqrt_norm(s, step))
        for p in (2 * s / (s + 2), 2.0, s):
            record("sigg-M", m_p(w, p, f), max(1.0, f.sup) ** (1 / p) * m_p(w, p))
        A = dict_all.tabulate(k1, (h,), step)
        B = dict_all.tabulate(k2, (h2,), step)
        y1 = young_check(A, B, 1.0)
        record("young-equality", abs(y1.lhs - y1.rhs), tol * y1.rhs)
        for p in (c["p"], 2.0, s, math.inf):
            y = young_check(A, B, p)
            record("young", y.lhs, y.rhs)
        z_a, z_b = (k1, (h,)), (k2, (h2,))
        for p in (1.0, 2.0, s, math.inf):
            record("tech1-i1", *K.tech1_sides(dict_all, z_a, z_b, n, step, p))
        pa, pb = (k1, (h,), k2, (h2,)), (k2, (h2,), k1, (h,))
        for p in (1.0, 2.0, s, math.inf):
            record("tech1-i2", *K.tech1_sides(dict_all, pa, pb, n, step, p, i=2))
            for key, (lhs, rhs) in K.tech204_sides(dict_all, pa, n, step, p).items():
                record(f"tech204-{key}", lhs, rhs)
        P = dict_all.kernels[k1].lipschitz / (n * h * h)
        ok, frac = K.tech2_check(w, P)
        record("tech2", 0.5, frac)
    checks = [Check(f"lemma-{k}", worst[k] <= 1 + tol and counts[k] >= 20,
                    {"worst_ratio": worst[k], "evaluations": counts[k]}) for k in sorted(worst)]
    checks += as_L_checks(seed)
    return checks


def as_L_checks(seed: int) -> list[Check]:
    """(L) with distances theta_i d^(i) on small kernel classes."""
    D = K.KernelDictionary([make_kernel("triangle"), make_kernel("cosine")])
    L, ki, k1 = D.lipschitz, D.k_inf, D.k1
    n, step = 100, 0.05 / 32
    hs = _bandwidths(0.05, 0.2, 4)
    out = []
    cls1, _ = K.kde_class(D, hs, n, step, 1, theta=K.theta_1(1, L, ki, k1))
    for s in (1.5, 3.0):
        fac = K.as_L_factor(cls1, s)
        out.append(Check(f"lemma-as-L-i1-s{s:g}", fac <= 1.0 + 1e-3, {"factor": fac}))
    cls2, _ = K.kde_class(D, hs[:2], n, step, 2, theta=K.theta_2(1, L, ki, k1))
    fac = K.as_L_factor(cls2, 3.0)
    out.append(Check("lemma-as-L-i2", fac <= 1.0 + 1e-3, {"factor": fac}))
    return out


def suite_lemmas(cfg: dict, out: Path | None = None) -> SuiteResult:
    res = SuiteResult("lemmas", cfg)
    res.checks += metric_checks(cfg["seed"], int(cfg["triples"]))
    res.checks += lemma_checks(int(cfg["configs"]), cfg["seed"])
    return res


# ------------------------------------------------------------------ entry point

RUNNERS = {"fixed-w": suite_fixed_w, "uniform-nonrandom": suite_uniform_nonrandom,
           "random-majorant": suite_random_majorant, "kde-thm7": suite_kde, "regression": suite_regression,
           "lemmas": suite_lemmas}


def run_suite(name: str, config: dict | None = None, out: str | Path | None = None, seed: int | None = None,
              reps: int | None = None, jobs: int | None = None) -> SuiteResult:
    cfg = suite_config(name, config, seed, reps, jobs)
    t0 = time.perf_counter()
    res = RUNNERS[name](cfg, Path(out) if out is not None else None)
    res.seconds = time.perf_counter() - t0
    if out is not None:
        res.write(out)
    return res
