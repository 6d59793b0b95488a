"""Command line: run suites, evaluate single quantities, compute covering numbers."""
from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import kde as K
from . import empirical as E
from . import regression as RG
from .config import load_config
from .errors import ConfigError, LsboundError
from .framework import u_eps
from .harness import SUITES, _density, _jsonable, _kernel, run_suite
from .params import BandwidthSet, ProductSpace, SpaceSpec, entropy_bound_H


def _need(cfg: dict, *keys):
    missing = [k for k in keys if k not in cfg]
    if missing:
        raise ConfigError(f"config is missing {', '.join(missing)}")
    return [cfg[k] for k in keys]


def _weight(cfg: dict):
    ker = _kernel(cfg.get("kernel", "box"))
    n, h = int(cfg["n"]), float(cfg.get("h", 0.1))
    step = h / float(cfg.get("nodes_per_h", 64))
    return ker.tabulate(step, h, n)


def _dictionary(cfg: dict) -> K.KernelDictionary:
    return K.KernelDictionary([_kernel(k) for k in cfg.get("kernels", ["box", "triangle", "cosine"])])


def _q_empirical(cfg):
    s, n = _need(cfg, "s", "n")
    return E.empirical_params(_weight(cfg), _density(cfg.get("density", "uniform")), float(s), int(n))


def _q_theorem7(cfg):
    i, s, n, eps, y = _need(cfg, "i", "s", "n", "eps", "y")
    D = _dictionary(cfg)
    bw = BandwidthSet(tuple(np.atleast_1d(cfg["h_min"])), tuple(np.atleast_1d(cfg["h_max"])))
    bK = float(cfg.get("beta_K", 0.5))
    return K.theorem7_assembly(int(i), D, bw, int(n), float(cfg.get("f_inf", 1.0)), float(s), float(eps),
                               float(y), float(cfg.get("q", 1.0)), beta_K=bK, C_K=D.C_K(bK), check=False)


def _q_regression(cfg):
    s, n = _need(cfg, "s", "n")
    noise = RG.make_noise(cfg.get("noise", "gaussian"))
    return RG.regression_params(_weight(cfg), _density(cfg.get("density", "uniform")), noise, float(s), int(n))


QUANTITIES = {
    "c1": lambda c: E.c1(float(_need(c, "s")[0])),
    "c3": lambda c: E.c3(float(_need(c, "s")[0]), float(c.get("c2", 1.0))),
    "c_star": lambda c: E.c_star_s(float(_need(c, "s")[0])),
    "u_eps": lambda c: u_eps(float(_need(c, "eps")[0])),
    "ubar_eps": lambda c: E.ubar_eps(*map(float, _need(c, "eps", "gamma", "s"))),
    "y_gamma": lambda c: E.y_gamma(*map(float, _need(c, "lambda_A", "lambda_B", "gamma"))),
    "gamma": lambda c: E.gamma_of_mu(*map(float, _need(c, "mu", "s"))),
    "D": lambda c: K.D_func(float(c["x"]), int(c.get("d", 1)), float(c.get("L_K", 1)), float(c.get("k_inf", 1))),
    "D_prime": lambda c: K.D_prime(float(c["x"]), int(c.get("d", 1)), float(c.get("L_K", 1)),
                                   float(c.get("k_inf", 1))),
    "vartheta0": lambda c: K.vartheta0_i(int(c.get("i", 1)), float(c["s"]), float(c.get("f_inf", 1)),
                                         int(c.get("d", 1)), float(c.get("L_K", 1)), float(c.get("k_inf", 1)),
                                         float(c.get("k1", 1))),
    "A_H": lambda c: K.A_H(BandwidthSet(tuple(np.atleast_1d(c["h_min"])), tuple(np.atleast_1d(c["h_max"])))),
    "B_H": lambda c: K.B_H(BandwidthSet(tuple(np.atleast_1d(c["h_min"])), tuple(np.atleast_1d(c["h_max"])))),
    "g_alpha_b": lambda c: RG.g_alpha_b(*map(float, _need(c, "x", "alpha", "b", "s"))),
    "G2": lambda c: RG.G2(float(c["x"]), float(c["p"]), float(c["P"]), int(c["n"]), float(c["s"])),
    "c_n": lambda c: RG.c_n(float(c["s"]), float(c["alpha_star"]), int(c["n"])),
    "empirical_params": _q_empirical,
    "regression_params": _q_regression,
    "theorem7": _q_theorem7,
}


def _as_json(value):
    if hasattr(value, "to_dict"):
        value = value.to_dict()
    elif hasattr(value, "__dataclass_fields__"):
        from dataclasses import asdict
        value = asdict(value)
    return json.dumps(_jsonable(value), indent=1, sort_keys=True)


@click.group()
def main():
    """Uniform L_s-norm bounds: suites, constants and covering numbers."""


@main.command()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None)
@click.option("--suite", required=True, type=click.Choice(SUITES))
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--seed", type=int, default=None)
@click.option("--reps", type=int, default=None)
@click.option("--jobs", type=int, default=None)
def run(config_path, suite, out, seed, reps, jobs):
    """Run a verification suite and write report.json, summary.csv, constants.json."""
    try:
        res = run_suite(suite, load_config(config_path), out, seed, reps, jobs)
    except LsboundError as exc:
        raise click.ClickException(str(exc))
    fails = sum(r.verdict == "FAIL" for r in res.rows) + sum(not c.passed for c in res.checks)
    click.echo(f"{suite}: {'PASS' if res.passed else 'FAIL'} ({len(res.rows)} rows, {len(res.checks)} checks, "
               f"{fails} failures, {res.seconds:.1f} s) -> {out}")
    sys.exit(0 if res.passed else 1)


@main.command(name="eval")
@click.option("--quantity", required=True, type=click.Choice(sorted(QUANTITIES)))
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None)
def eval_(quantity, config_path):
    """Print one constant or bound as JSON."""
    try:
        value = QUANTITIES[quantity](load_config(config_path))
    except (LsboundError, KeyError, ValueError) as exc:
        raise click.ClickException(f"{type(exc).__name__}: {exc}")
    click.echo(_as_json({"quantity": quantity, "value": value if np.isscalar(value) else json.loads(_as_json(value))}))


@main.command()
@click.option("--space", "space_path", required=True, type=click.Path(dir_okay=False, exists=True))
@click.option("--delta", required=True, type=float)
def cover(space_path, delta):
    """Covering numbers of a kernel-dictionary x bandwidth space at radius delta."""
    try:
        spec = SpaceSpec.from_json(Path(space_path).read_text())
        bw = spec.bandwidths
        out = {"delta": delta, "bandwidth_box": bw.covering_number(delta / spec.theta)}
        r = delta / spec.theta
        if r <= 1:
            out["entropy_bound_ln"] = entropy_bound_H(bw, r)
        if spec.kernels:
            D = K.KernelDictionary([_kernel(k) for k in spec.kernels])
            out["kernels"] = D.space.covering_number(r)
            out["product"] = ProductSpace(D.space, bw, spec.theta).covering_number(delta)
            if bw.d == 1:
                hs = bw.grid(spec.counts)
                pts = [(k, h) for k in range(len(D)) for h in hs]
                dist = np.array([[K.d1(D, a, b, spec.theta) for b in pts] for a in pts])
                from .params import FiniteSpace
                out["grid_points"] = len(pts)
                out["grid"] = FiniteSpace(dist).covering_number(delta)
    except (LsboundError, KeyError, ValueError) as exc:
        raise click.ClickException(f"{type(exc).__name__}: {exc}")
    click.echo(json.dumps(_jsonable(out), indent=1, sort_keys=True))


if __name__ == "__main__":  # pragma: no cover
    main()
