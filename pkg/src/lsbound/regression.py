"""Bounds for the regression-type process eta_w(t) = sum_i w(t - X_i) eps_i.

Noise laws are symmetric and satisfy either a sub-exponential tail
P{|eps| >= x} <= v exp(-b x^alpha) (kind E1) or a moment bound E|eps|^p <= P
(kind E2).
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy import integrate, special
from scipy.special import logsumexp

from .empirical import c1, c3, c_star_s
from .errors import DivergenceError, DomainError, PreconditionError
from .framework import u_eps
from .weights import Density, WeightClass, WeightFunction, m_p, sigma_s


# ------------------------------------------------------------------ noise laws

@dataclass(frozen=True)
class NoiseModel:
    """Symmetric noise law with its tail or moment certificate."""

    name: str
    kind: str  # "E1" or "E2"
    params: dict
    alpha: float | None = None
    b: float | None = None
    v: float | None = None
    p: float | None = None
    P: float | None = None

    def __post_init__(self):
        if self.kind == "E1":
            if not (self.alpha and self.alpha > 0 and self.b and self.b > 0 and self.v and self.v > 0):
                raise DomainError("E1 needs alpha, b, v > 0")
        elif self.kind == "E2":
            if not (self.p and self.p >= 2 and self.P and self.P > 0):
                raise DomainError("E2 needs p >= 2 and P > 0")
        else:
            raise DomainError(f"unknown noise kind {self.kind!r}")

    def magnitude(self, rng: np.random.Generator, size) -> np.ndarray:
        pr = self.params
        if self.name == "gaussian":
            return np.abs(rng.standard_normal(size)) * pr["scale"]
        if self.name == "laplace":
            return rng.standard_exponential(size) * pr["scale"]
        if self.name == "uniform":
            return rng.random(size) * pr["a"]
        if self.name == "student-t":
            return np.abs(rng.standard_t(pr["dof"], size))
        raise DomainError(f"no sampler for {self.name!r}")

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        """|eps| times an independent Rademacher sign, so the draw is symmetric by construction."""
        mag = self.magnitude(rng, size)
        sign = rng.integers(0, 2, size=size) * 2 - 1
        return mag * sign

    def abs_moment(self, r: float) -> float:
        """E|eps|^r in closed form."""
        if r <= 0:
            raise DomainError("moment order must be positive")
        pr = self.params
        if self.name == "gaussian":
            return pr["scale"] ** r * 2 ** (r / 2) * math.gamma((r + 1) / 2) / math.sqrt(math.pi)
        if self.name == "laplace":
            return pr["scale"] ** r * math.gamma(r + 1)
        if self.name == "uniform":
            return pr["a"] ** r / (r + 1)
        if self.name == "student-t":
            nu = pr["dof"]
            if r >= nu:
                return math.inf
            return math.exp(r / 2 * math.log(nu) + special.gammaln((r + 1) / 2) + special.gammaln((nu - r) / 2)
                            - 0.5 * math.log(math.pi) - special.gammaln(nu / 2))
        raise DomainError(f"no moments for {self.name!r}")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.abs_moment(2.0))

    def e_s(self, s: float) -> float:
        return self.abs_moment(s) ** (1.0 / s)

    def tail_bound(self, x) -> np.ndarray:
        if self.kind != "E1":
            raise DomainError("tail certificate exists for E1 only")
        x = np.asarray(x, dtype=float)
        return self.v * np.exp(-self.b * x ** self.alpha)

    def to_dict(self) -> dict:
        return asdict(self)


GAUSS_SLACK = 0.99


def make_noise(name: str, **kw) -> NoiseModel:
    """Built-in presets; all but student-t have unit variance by default."""
    if name == "gaussian":
        sc = kw.get("scale", 1.0)
        return NoiseModel(name, "E1", {"scale": sc}, alpha=2.0, b=0.5 * GAUSS_SLACK / sc ** 2, v=1.0)
    if name == "laplace":
        sc = kw.get("scale", 1.0 / math.sqrt(2.0))
        return NoiseModel(name, "E1", {"scale": sc}, alpha=1.0, b=1.0 / sc, v=1.0)
    if name == "uniform":
        a = kw.get("a", math.sqrt(3.0))
        # 1 - x/a <= exp(-x/a) on [0, a]
        return NoiseModel(name, "E1", {"a": a}, alpha=1.0, b=1.0 / a, v=1.0)
    if name == "student-t":
        p = kw.get("p", 4.0)
        dof = kw.get("dof", p + 1.0)
        if not dof > max(p, 2.0):
            raise DomainError("need dof > max(p, 2)")
        base = NoiseModel(name, "E2", {"dof": dof}, p=p, P=1.0)
        return NoiseModel(name, "E2", {"dof": dof}, p=p, P=base.abs_moment(p))
    raise DomainError(f"unknown noise preset {name!r}")


NOISE_PRESETS = ("gaussian", "laplace", "uniform", "student-t")


def mc_moment(noise: NoiseModel, r: float, seed: int, size: int = 10 ** 6) -> tuple[float, float]:
    """Seeded Monte-Carlo E|eps|^r and its standard error."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    a = np.abs(noise.magnitude(rng, size)) ** r
    return float(a.mean()), float(a.std(ddof=1) / math.sqrt(size))


class MomentCache:
    """JSON file of Monte-Carlo moments keyed by (law, params, order, seed)."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.data = json.loads(self.path.read_text()) if self.path.exists() else {}

    @staticmethod
    def key(noise: NoiseModel, r: float, seed: int) -> str:
        pr = ",".join(f"{k}={v:.12g}" for k, v in sorted(noise.params.items()))
        return f"{noise.name}[{pr}]|r={r:.12g}|seed={seed}"

    def get(self, noise: NoiseModel, r: float, seed: int, size: int = 10 ** 6) -> float:
        k = self.key(noise, r, seed)
        if k not in self.data:
            m, se = mc_moment(noise, r, seed, size)
            self.data[k] = {"moment": m, "se": se, "size": size}
            self.path.write_text(json.dumps(self.data, indent=1, sort_keys=True))
        return self.data[k]["moment"]


def check_noise(noise: NoiseModel, seed: int = 0, size: int = 2 * 10 ** 5, z: float = 4.0) -> dict:
    """Empirical certificate: E1 tail vs v exp(-b x^alpha) on a grid, or E2 moment vs P."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    e = noise.sample(rng, size)
    out = {"mean": float(e.mean()), "symmetry_z": float(e.mean() / (e.std() / math.sqrt(size)))}
    if noise.kind == "E1":
        a = np.sort(np.abs(e))
        xs = np.linspace(0.0, float(a[int(0.999 * size)]), 40)
        freq = 1.0 - np.searchsorted(a, xs, side="left") / size
        margin = z * np.sqrt(np.maximum(freq * (1 - freq), 1.0 / size) / size)
        excess = freq - margin - noise.tail_bound(xs)
        out.update(x=xs.tolist(), freq=freq.tolist(), worst_excess=float(excess.max()), ok=bool(excess.max() <= 0))
    else:
        m = np.abs(e) ** noise.p
        est, se = float(m.mean()), float(m.std(ddof=1) / math.sqrt(size))
        out.update(moment=est, se=se, P=noise.P, ok=bool(est <= noise.P + z * se))
    return out


# ------------------------------------------------------------------ tail functions

def g_alpha_b(x, alpha: float, b: float, s: float) -> np.ndarray | float:
    if not alpha > 0 or not b > 0:
        raise DomainError("alpha and b must be positive")
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise DomainError("x must be nonnegative")
    kappa = alpha / (2.0 + alpha) if s < 2 else alpha / (1.0 + alpha)
    val = np.exp(-np.minimum(np.abs(xa), np.abs(b ** (1.0 / alpha) * xa) ** kappa))
    return float(val) if val.ndim == 0 else val


def G1(x, noise: NoiseModel, n: int, s: float):
    return (1.0 + n * noise.v) * g_alpha_b(x, noise.alpha, noise.b, s)


def G2(x, p: float, P: float, n: int, s: float):
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise DomainError("x must be positive")
    if not p >= max(s, 2.0):
        raise DomainError("need p >= max(s, 2)")
    expo = p / 2.0 if s < 2 else p
    val = (1.0 + n * P) * (p / xa * np.log1p(xa / p)) ** expo
    return float(val) if val.ndim == 0 else val


# ------------------------------------------------------------------ fixed weight

@dataclass(frozen=True)
class RegressionBoundParams:
    s: float
    n: int
    sigma: float
    e_s: float
    M_s: float
    M_2: float
    Sigma_s: float | None
    M_mid: float
    rho_s: float
    varpi_sq: float
    lin: float  # (4/3) c_*(s) M_s
    family: str

    def upsilon(self, z):
        z = np.asarray(z, dtype=float)
        if np.any(z <= 0):
            raise DomainError("z must be positive")
        return z ** 2 / (self.varpi_sq / 3.0 + self.lin * z)


def regression_params(w: WeightFunction, f: Density | None, noise: NoiseModel, s: float, n: int
                      ) -> RegressionBoundParams:
    if n < 1 or s < 1:
        raise DomainError("need n >= 1 and s >= 1")
    sig, es = noise.sigma, noise.e_s(s)
    Ms, M2 = m_p(w, s), m_p(w, 2.0)
    rn, ns = math.sqrt(n), n ** (1.0 / s)
    Sig = sigma_s(w, f, s) if f is not None and s != 2 else None
    if s < 2:
        rho = sig * (4.0 * ns * Ms if Sig is None else min(rn * Sig, 4.0 * ns * Ms))
        vp = Ms ** 2 * ((6.0 * sig ** 2 + 8.0) * n + 96.0 * sig * ns)
        mid = float("nan")
    elif s == 2:
        if f is None:
            raise DomainError("the s = 2 variance term needs the design density")
        mid = m_p(w, 1.0, f)
        rho = sig * rn * M2
        vp = 6.0 * sig ** 2 * n * mid ** 2 + 24.0 * sig * rn * M2 ** 2
    else:
        if f is None:
            raise DomainError("the s > 2 bounds need the design density")
        mid = m_p(w, 2.0 * s / (s + 2.0), f)
        rho = c1(s) * (sig * rn * Sig + 2.0 * ns * es * Ms)
        vp = 6.0 * c3(s) * (sig ** 2 * n * mid ** 2 + 4.0 * sig * rn * Sig * Ms + 8.0 * es * ns * Ms ** 2)
    return RegressionBoundParams(s, n, sig, es, Ms, M2, Sig, mid, rho, vp, 4.0 / 3.0 * c_star_s(s) * Ms,
                                 "G1" if noise.kind == "E1" else "G2")


def theorem8_tail(w: WeightFunction, f: Density | None, noise: NoiseModel, s: float, n: int, z
                  ) -> tuple[RegressionBoundParams, np.ndarray]:
    """P{||eta_w||_s >= rho_s + z} <= G(Upsilon(z)); returns the parameters and the raw tail values."""
    prm = regression_params(w, f, noise, s, n)
    ups = prm.upsilon(z)
    if noise.kind == "E1":
        return prm, np.asarray(G1(ups, noise, n, s))
    return prm, np.asarray(G2(ups, noise.p, noise.P, n, s))


# ------------------------------------------------------------------ uniform bound

def _kappa(alpha: float, s: float) -> float:
    return alpha / (2.0 + alpha) if s < 2 else alpha / (1.0 + alpha)


def a_const(noise: NoiseModel, s: float, mes_I: float, f_inf: float, alpha_star: float) -> float:
    return max(noise.sigma * math.sqrt(mes_I),
               c1(s) * (noise.sigma * math.sqrt(f_inf) + 2.0 * noise.e_s(s) * alpha_star))


def c_n(s: float, alpha_star: float, n: int) -> float:
    return 4.0 / 3.0 * c_star_s(s) * alpha_star * n ** (-1.0 / s)


def b_n_sq(noise: NoiseModel, s: float, n: int, f_inf: float, mu_star: float, alpha_star: float) -> float:
    sig = noise.sigma
    if s < 2:
        return (2.0 * sig ** 2 + 8.0 / 3.0 + 32.0 * sig * n ** (1.0 / s - 1.0)) * mu_star ** (2.0 / s - 1.0)
    if s == 2:
        return 2.0 * f_inf ** 2 * mu_star + 8.0 / math.sqrt(n)
    es = noise.e_s(s)
    return 2.0 * c3(s) * f_inf ** 2 * (sig ** 2 * mu_star ** (2.0 / s)
                                      + (4.0 * sig * alpha_star + 8.0 * es * alpha_star ** 2) * n ** (-1.0 / s))


def L_alpha_b(eps: float, beta: float, alpha: float, b: float, s: float, kmax: int = 1000) -> float:
    """log of sum_k exp{eps^-beta 2^{beta k + 1}} sqrt(g(9 2^{k-3} k^-2))."""
    kap = _kappa(alpha, s)
    if not beta < kap:
        raise PreconditionError(f"entropy exponent must satisfy beta<alpha/({'2' if s < 2 else '1'}+alpha)",
                                beta=beta, threshold=kap)
    k = np.arange(1, kmax + 1, dtype=float)
    x = 9.0 * 2.0 ** (k - 3) / k ** 2
    with np.errstate(over="ignore"):
        lg = -np.minimum(x, (b ** (1.0 / alpha) * x) ** kap)
        terms = eps ** (-beta) * 2.0 ** (beta * k + 1) + 0.5 * lg
    if not np.isfinite(terms[-1]) or terms[-1] > -50:
        raise DivergenceError("series tail not negligible at the truncation level")
    return float(logsumexp(terms))


def J_alpha_b(q: float, alpha: float, b: float, s: float) -> float:
    def integrand(x):
        return q * (x - 1.0) ** (q - 1.0) * g_alpha_b(x, alpha, b, s) ** 0.25
    val, _ = integrate.quad(integrand, 1.0, np.inf, limit=400)
    return float(val)


@dataclass
class Theorem9Result:
    s: float
    n: int
    eps: float
    y: float
    q: float
    beta: float
    a: float
    b_n_sq: float
    c_n: float
    mu_star: float
    alpha_star: float
    w_bar2: float
    C_Z: float
    ln_L: float
    J: float
    T_n_eps: float
    factor: float  # a u_eps (1 + 2 sqrt(y) b_n + 2 y c_n)
    tail: float
    majorants: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def theorem9_bound(cls: WeightClass, noise: NoiseModel, s: float, n: int, eps: float, y: float,
                   q: float = 1.0, f_inf: float = 1.0, mes_I: float = 1.0, beta: float | None = None
                   ) -> Theorem9Result:
    """Majorant a u_eps (1 + 2 sqrt(y) b_n + 2 y c_n) sqrt(n) ||w||_2 and its moment tail."""
    if noise.kind != "E1":
        raise DomainError("the uniform regression bound is stated under the sub-exponential tail")
    if not y > 1:
        raise DomainError("y must exceed 1")
    if not q >= 1 or not eps > 0:
        raise DomainError("need q >= 1 and eps > 0")
    beta = cls.beta if beta is None else beta
    ast = cls.alpha_star
    mu = cls.mu_star
    a = a_const(noise, s, mes_I, f_inf, ast)
    b2 = b_n_sq(noise, s, n, f_inf, mu, ast)
    cn = c_n(s, ast, n)
    lnL = L_alpha_b(eps, beta, noise.alpha, noise.b, s)
    J = J_alpha_b(q, noise.alpha, noise.b, s)
    CZ = cls.C_Z(beta)
    wb = cls.w_bar(2.0)
    lnT = (math.log1p(n * noise.v) + q * math.log(2.0 ** (2 * eps) * (1 + eps) * a * wb)
           - math.log(2.0 ** (q * eps) - 1.0) + CZ + (8.0 / eps) ** beta
           + float(np.logaddexp(0.0, 2.0 * CZ + lnL)) + math.log(J))
    brack = 1.0 + 2.0 * math.sqrt(y * b2) + 2.0 * y * cn
    lng = math.log(g_alpha_b(y, noise.alpha, noise.b, s))
    with np.errstate(over="ignore"):
        T = float(np.exp(lnT))
        tail = float(np.exp(lnT + q * math.log(brack) + 0.25 * lng))
    fac = a * u_eps(eps) * brack
    maj = (fac * math.sqrt(n) * cls.norms(2.0)).tolist()
    return Theorem9Result(s, n, eps, y, q, beta, a, b2, cn, mu, ast, wb, CZ, lnL, J, T, fac, tail, maj)
