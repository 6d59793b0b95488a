"""Kernel density estimator processes over a kernel dictionary x bandwidth box.

phi_1(K, h) = n^-1 K_h and phi_2((K, h), (Q, hh)) = n^-1 K_h * Q_hh, the
distances d^(1), d^(2), the modulus function D and the constants feeding the
random uniform bound for these two classes.
"""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import optimize

from .empirical import (L_star, c1, empirical_params, gamma_of_mu, random_majorant, I_eps, ubar_eps)
from .errors import DivergenceError, DomainError, PreconditionError, RegimeError
from .framework import u_eps
from .params import BandwidthSet, FiniteSpace, delta_H
from .weights import Density, Kernel, WeightClass, WeightFunction

SUP_GRID = 4097  # nodes per axis for kernel sup distances


# ------------------------------------------------------------------ maps and distances

class KernelDictionary:
    """Finite kernel family with cached sup-norm distances and tabulations."""

    def __init__(self, kernels: Sequence[Kernel]):
        if not kernels:
            raise DomainError("empty kernel dictionary")
        d = {k.d for k in kernels}
        if len(d) != 1:
            raise DomainError("kernels must share the dimension")
        self.kernels = tuple(kernels)
        self.d = d.pop()
        self._tab: dict = {}
        self._conv: dict = {}
        self.sup_dist = self._sup_distances()

    def __len__(self) -> int:
        return len(self.kernels)

    def _sup_distances(self) -> np.ndarray:
        g = SUP_GRID if self.d == 1 else 257
        ax = np.linspace(-0.5, 0.5, g)
        pts = np.stack(np.meshgrid(*([ax] * self.d), indexing="ij"), axis=-1)
        vals = [k.func(pts) for k in self.kernels]
        m = len(vals)
        D = np.zeros((m, m))
        for i in range(m):
            for j in range(i + 1, m):
                D[i, j] = D[j, i] = float(np.abs(vals[i] - vals[j]).max())
        return D

    @property
    def lipschitz(self) -> float:
        return max(k.lipschitz for k in self.kernels)

    @property
    def k_inf(self) -> float:
        return max(k.k_inf for k in self.kernels)

    @property
    def k1(self) -> float:
        return min(k.k1 for k in self.kernels)

    @property
    def space(self) -> FiniteSpace:
        return FiniteSpace(self.sup_dist, tuple(k.label for k in self.kernels), "K")

    def C_K(self, beta_K: float, deltas: Sequence[float] | None = None) -> float:
        """sup over a delta grid of ln N_K(delta) - delta^-beta_K."""
        deltas = np.geomspace(1e-4, 1.0, 200) if deltas is None else deltas
        sp = self.space
        return float(max(math.log(sp.covering_number(dl)) - dl ** (-beta_K) for dl in deltas))

    def tabulate(self, k: int, h, step: float) -> WeightFunction:
        key = (k, tuple(np.atleast_1d(h).tolist()), round(step, 15))
        if key not in self._tab:
            self._tab[key] = self.kernels[k].tabulate(step, h, 1.0)
        return self._tab[key]

    def convolution(self, k: int, h, q: int, hh, step: float) -> WeightFunction:
        key = (k, tuple(np.atleast_1d(h).tolist()), q, tuple(np.atleast_1d(hh).tolist()), round(step, 15))
        if key not in self._conv:
            self._conv[key] = self.tabulate(k, h, step).convolve(self.tabulate(q, hh, step))
        return self._conv[key]


def phi1(D: KernelDictionary, k: int, h, n: int, step: float) -> WeightFunction:
    return D.tabulate(k, h, step).scale(1.0 / n)


def phi2(D: KernelDictionary, k: int, h, q: int, hh, n: int, step: float) -> WeightFunction:
    return D.convolution(k, h, q, hh, step).scale(1.0 / n)


def d1(D: KernelDictionary, z1: tuple, z2: tuple, theta: float = 1.0) -> float:
    """theta max{||K - K'||_inf, Delta_H(h, h')} for z = (kernel index, h)."""
    if not theta > 0:
        raise DomainError("theta must be positive")
    return theta * max(float(D.sup_dist[z1[0], z2[0]]), delta_H(z1[1], z2[1]))


def d2(D: KernelDictionary, z1: tuple, z2: tuple, theta: float = 1.0) -> float:
    """Distance on pairs [(K, h), (Q, hh)]."""
    if not theta > 0:
        raise DomainError("theta must be positive")
    (k, h, q, hh), (k2, h2, q2, hh2) = z1, z2
    kern = max(float(D.sup_dist[k, k2]), float(D.sup_dist[q, q2]))
    band = max(delta_H(h, h2), delta_H(hh, hh2))
    return theta * max(kern, band)


# ------------------------------------------------------------------ constants

def D_func(x: float, d: int, L_K: float, k_inf: float) -> float:
    if x < 0:
        raise DomainError("D is defined for x >= 0")
    return math.exp(d * x) * (x + 0.5 * L_K * math.sqrt(d) * math.expm1(x) + k_inf * math.expm1(d * x))


def D_prime(x: float, d: int, L_K: float, k_inf: float) -> float:
    if x < 0:
        raise DomainError("D is defined for x >= 0")
    inner = x + 0.5 * L_K * math.sqrt(d) * math.expm1(x) + k_inf * math.expm1(d * x)
    dinner = 1.0 + 0.5 * L_K * math.sqrt(d) * math.exp(x) + k_inf * d * math.exp(d * x)
    return math.exp(d * x) * (d * inner + dinner)


def theta_1(d: int, L_K: float, k_inf: float, k1: float) -> float:
    return k_inf / k1 * D_prime(2.0, d, L_K, k_inf)


def theta_2(d: int, L_K: float, k_inf: float, k1: float) -> float:
    return 2.0 ** (2 * d + 2) * k_inf ** 4 / k1 ** 2 * D_prime(4.0, d, L_K, k_inf)


def A_H(bw: BandwidthSet) -> float:
    return float(np.prod(np.log(np.asarray(bw.h_max) / np.asarray(bw.h_min))))


def B_H(bw: BandwidthSet) -> float:
    return float(np.sum(np.log2(np.asarray(bw.h_max) / np.asarray(bw.h_min))))


def alpha2_i(i: int, d: int, L_K: float, k_inf: float, k1: float) -> float:
    if i == 1:
        return (k1 / (L_K * math.sqrt(d))) ** d
    if i == 2:
        return (k1 ** 2 / (2.0 ** (d + 2) * math.sqrt(d) * L_K * k_inf)) ** d
    raise DomainError("i must be 1 or 2")


def vartheta0_i(i: int, s: float, f_inf: float, d: int, L_K: float, k_inf: float, k1: float) -> float:
    if i == 1:
        base = L_K * math.sqrt(d) / k1
    elif i == 2:
        base = 2.0 ** (d + 2) * math.sqrt(d) * L_K * k_inf / k1 ** 2
    else:
        raise DomainError("i must be 1 or 2")
    return 10.0 * c1(s) * f_inf * base ** (d / 2.0)


def C_star_xi_i(y: float, i: int, vartheta0: float, d: int, V_hmax: float, n: int, s: float) -> float:
    if not y > 0:
        raise DomainError("y must be positive")
    return 1.0 + 2.0 * vartheta0 * (math.sqrt(y) * ((2.0 ** (d * i) * V_hmax) ** (1 / s) + n ** (-1 / (2 * s)))
                                    + y * n ** (-1 / s))


def bandwidth_floor(i: int, s: float, d: int, L_K: float, k_inf: float, k1: float) -> float:
    t = min(s, 4.0)
    return (64.0 * c1(s) ** 2) ** (t / (t - 1.0)) * (2.0 ** (d + 2) * math.sqrt(d) * L_K * k_inf / k1 ** 2) ** (d * (i - 1))


def C_beta_d(beta: float, beta_K: float, d: int) -> float:
    """sup over delta in (0, 1] of d ln(3/delta) + delta^-beta_K - delta^-beta."""
    if not beta_K < beta:
        raise DomainError("need beta_K < beta")

    def neg(u):  # u = -ln delta >= 0
        return -(d * (math.log(3.0) + u) + math.exp(beta_K * u) - math.exp(beta * u))

    # the objective is concave in u past its peak; bracket it on a coarse grid first
    us = np.linspace(0.0, 200.0, 4001)
    vals = np.array([-neg(u) if beta * u < 700 else -np.inf for u in us])
    j = int(np.argmax(vals))
    lo, hi = us[max(j - 1, 0)], us[min(j + 1, len(us) - 1)]
    if hi > lo:
        res = optimize.minimize_scalar(neg, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
        return float(max(-res.fun, vals[j]))
    return float(vals[j])


def majorants_i(w: WeightFunction, s: float, n: int, f: Density | None = None,
                X: np.ndarray | None = None) -> dict:
    """U, and for s > 2 also U_hat, U_bar, U_breve, of one class member."""
    out = {"U": empirical_params(w, f, s, n).U_xi if (s <= 2 or f is not None) else None}
    floor = math.sqrt(n) * w.norm(2.0)
    if s <= 2:
        return out
    if f is not None:
        out["U_bar"] = max(out["U"], floor)
    if X is not None:
        maj = random_majorant(w, X, s)
        out["U_hat"], out["U_breve"] = maj.U_hat, maj.U_breve
    return out


def random_only(s: float):
    if s <= 2:
        raise RegimeError("data-driven majorants exist only for s > 2")


# ------------------------------------------------------------------ class construction

def bandwidth_grid(bw: BandwidthSet, counts) -> list[tuple[float, ...]]:
    return bw.grid(counts)


def kde_class(D: KernelDictionary, hs: Sequence, n: int, step: float, i: int = 1, theta: float = 1.0,
              alpha1: float = 0.5, beta: float = 0.5, pairs: Sequence | None = None) -> tuple[WeightClass, list]:
    """Finite class W^(i) with distance d^(i)_theta; returns the class and its parameter list."""
    if i == 1:
        params = [(k, tuple(h)) for k in range(len(D)) for h in hs]
        weights = [phi1(D, k, h, n, step) for k, h in params]
        dist = np.array([[d1(D, a, b, theta) for b in params] for a in params])
    elif i == 2:
        base = [(k, tuple(h)) for k in range(len(D)) for h in hs]
        params = list(pairs) if pairs is not None else [(a[0], a[1], b[0], b[1]) for a, b in
                                                          itertools.product(base, base)]
        weights = [phi2(D, k, h, q, hh, n, step) for k, h, q, hh in params]
        dist = np.array([[d2(D, a, b, theta) for b in params] for a in params])
    else:
        raise DomainError("i must be 1 or 2")
    labels = tuple(str(p) for p in params)
    return WeightClass(tuple(weights), FiniteSpace(dist, labels, f"d{i}"), n, alpha1, beta), params


# ------------------------------------------------------------------ lemma checks

def tech1_sides(D: KernelDictionary, z1, z2, n: int, step: float, p: float, i: int = 1) -> tuple[float, float]:
    """Both sides of the sup-norm modulus inequality for phi_1 (i=1) or phi_2 (i=2)."""
    L, ki = D.lipschitz, D.k_inf
    if i == 1:
        w = phi1(D, z1[0], z1[1], n, step) - phi1(D, z2[0], z2[1], n, step)
        V = float(np.prod(np.maximum(z1[1], z2[1])))
        inv = 0.0 if math.isinf(p) else 1.0 / p
        return w.norm(p), V ** (-1 + inv) * D_func(d1(D, z1, z2), D.d, L, ki) / n
    k, h, q, hh = z1
    k2, h2, q2, hh2 = z2
    w = phi2(D, k, h, q, hh, n, step) - phi2(D, k2, h2, q2, hh2, n, step)
    V = max(float(np.prod(np.maximum(h, h2))), float(np.prod(np.maximum(hh, hh2))))
    inv = 0.0 if math.isinf(p) else 1.0 / p
    return w.norm(p), 2.0 * ki * V ** (-1 + inv) * D_func(2.0 * d2(D, z1, z2), D.d, L, ki) / n


def tech2_check(w: WeightFunction, P: float) -> tuple[bool, float]:
    """Box of halfwidth ||w||_inf / (2 P sqrt d) around the argmax lies in {|w| >= ||w||_inf / 2}."""
    top = w.sup
    if top == 0:
        raise DomainError("degenerate weight")
    half = top / (2.0 * P * math.sqrt(w.d))
    centre = np.unravel_index(int(np.argmax(np.abs(w.values))), w.values.shape)
    r = int(math.floor(half / w.step + 1e-12))
    sl = tuple(slice(max(c - r, 0), c + r + 1) for c in centre)
    block = np.abs(w.values[sl])
    inside_grid = all(c - r >= 0 and c + r < sz for c, sz in zip(centre, w.values.shape))
    worst = float(block.min()) if inside_grid else 0.0
    return worst >= top / 2.0 * (1 - 1e-12), worst / top


def tech204_sides(D: KernelDictionary, z, n: int, step: float, p: float) -> dict:
    """(lhs, rhs) for statements (i)-(iv) on one convolution weight."""
    k, h, q, hh = z
    w = phi2(D, k, h, q, hh, n, step)
    d, ki, k1, L = D.d, D.k_inf, D.k1, D.lipschitz
    V = float(np.prod(np.maximum(h, hh)))
    inv = 0.0 if math.isinf(p) else 1.0 / p
    normp = w.norm(p)
    low_exp = 0.0 if math.isinf(p) else d * (1 - p) / p
    supp = w.support_measure
    level = float(np.count_nonzero(w.values >= 0.5 * w.sup) * w.cell)
    return {
        "i": (normp, 2.0 ** (d * inv) * ki ** 2 * V ** (-1 + inv) / n),
        "ii": (2.0 ** (-d if math.isinf(p) else low_exp) * k1 ** 2 * V ** (-1 + inv) / n, normp),
        "iii": (V * (k1 ** 2 / (2.0 ** (d + 1) * math.sqrt(d) * L * ki)) ** d, supp),
        "iv": ((k1 ** 2 / (2.0 ** (d + 2) * math.sqrt(d) * L * ki)) ** d * supp, level),
    }


def as_L_factor(cls: WeightClass, s: float) -> float:
    """Rescaling needed for (L) in the order the class uses (s below 2, else 2); <= 1 means it holds."""
    from .empirical import assumption_L_factor
    return assumption_L_factor(cls, s if s < 2 else 2.0)


# ------------------------------------------------------------------ assembly

@dataclass
class KdeConstants:
    i: int
    d: int
    s: float
    n: int
    eps: float
    q: float
    y: float
    L_K: float
    k1: float
    k_inf: float
    beta_K: float
    C_K: float
    V_hmin: float
    V_hmax: float
    alpha2: float
    alpha_star: float
    theta: float
    vartheta0: float
    vartheta1: float
    vartheta2: float
    gamma: float
    y_star: float
    k_star: float
    A_H: float
    B_H: float
    C_star: float
    ubar_eps: float | None
    majorant_factor: float | None
    beta_opt: float
    C_beta_d: float
    ln_L_term: float
    T1_tilde: float
    T2_tilde: float
    tail: float
    tail_T6: float
    bandwidth_floor: float
    ln_T1_tilde: float = float("nan")
    ln_T2_tilde: float = float("nan")
    ln_tail: float = float("nan")
    violations: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _inf_L_term(i: int, eps: float, kstar: float, beta_K: float, d: int, grid: int = 60) -> tuple[float, float, float]:
    """inf over beta in (beta_K, 1) of ln[L_{*,i}(beta) exp{2 i C_{beta,d}}]."""
    best = (math.inf, float("nan"), float("nan"))
    for beta in np.linspace(beta_K, 1.0, grid + 2)[1:-1]:
        try:
            lnL = L_star(eps, float(beta), 1.0, kstar)
        except DivergenceError:
            continue
        cb = C_beta_d(float(beta), beta_K, d)
        val = lnL + 2 * i * cb
        if val < best[0]:
            best = (val, float(beta), cb)
    return best


def theorem7_assembly(i: int, D: KernelDictionary, bw: BandwidthSet, n: int, f_inf: float, s: float,
                      eps: float, y: float, q: float = 1.0, beta_K: float = 0.0, C_K: float | None = None,
                      check: bool = True) -> KdeConstants:
    """All constants of the random uniform bound for W^(i), i in {1, 2}."""
    if not s > 2:
        raise RegimeError("the kernel-class random bound is stated for s > 2")
    if i not in (1, 2):
        raise DomainError("i must be 1 or 2")
    d, L, ki, k1 = D.d, D.lipschitz, D.k_inf, D.k1
    if bw.d != d:
        raise DomainError("bandwidth box and kernels differ in dimension")
    if not math.isfinite(L):
        raise DomainError("the kernel dictionary must be Lipschitz (finite L_K)")
    C_K = math.log(len(D)) if C_K is None else C_K
    Vmin = float(np.prod(bw.h_min))
    Vmax = float(np.prod(bw.h_max))
    mu = n * Vmin
    viol = []
    floor = bandwidth_floor(i, s, d, L, ki, k1)
    if not mu > floor:
        viol.append(f"n V_hmin = {mu:.6g} must exceed {floor:.6g}")
    a2 = alpha2_i(i, d, L, ki, k1)
    a_s = 2.0 / math.sqrt(a2)
    th = theta_1(d, L, ki, k1) if i == 1 else theta_2(d, L, ki, k1)
    v0 = vartheta0_i(i, s, f_inf, d, L, ki, k1)
    v1 = a_s ** -4 / 148.0
    v2 = 5.0 * math.sqrt(2.0) * c1(s / 2.0) * f_inf * a_s ** 2
    if s < 4:
        ys = v1 * n ** (4.0 / s - 1.0)
    else:
        ys = v2 * mu ** -0.5 * ((2.0 ** (d * i) * Vmax) ** (2 / s) + n ** (-1 / s)) ** -2
    if not 1 <= y <= ys:
        viol.append(f"y = {y:g} outside [1, y_* = {ys:.6g}]")
    gam = gamma_of_mu(mu, s)
    try:
        ub = ubar_eps(eps, gam, s)
    except PreconditionError as exc:
        ub = None
        viol.append(str(exc))
    if viol and check:
        raise PreconditionError("; ".join(viol), violations=viol, required_nV_hmin=floor)
    ks = 8.0 * c1(s) * a_s ** 2
    Cst = C_star_xi_i(y, i, v0, d, Vmax, n, s)
    aH, bH = A_H(bw), B_H(bw)
    ln_inf, beta_opt, cb = _inf_L_term(i, eps, ks, beta_K, d)
    ln_brack = float(np.logaddexp(0.0, ln_inf))
    ln_common = (d * i * math.log(24.0 * ks * th / eps) + i * (8.0 * ks * th / eps) ** beta_K + 3 * i * C_K
                 + math.log(math.log2(2.0 ** d * ki ** 2 * ks / k1 ** 2)) + ln_brack)
    u = u_eps(eps)
    lnT1 = math.log(I_eps(q, eps)) + q * math.log(2.0 ** (1 + d / 2) * u * ks * ki ** 2) + ln_common
    lnT2 = q * math.log(c1(s) + 2.0) + q * math.log(2.0 ** (d / 2) * a_s * ki ** 2) + ln_common
    ln_fac = 2 * i * math.log1p(aH) + math.log1p(bH)
    with np.errstate(over="ignore"):
        T1 = float(np.exp(lnT1))
        T2 = float(np.exp(lnT2))
        tail = float(np.exp(lnT1 + ln_fac + q / 2 * math.log(n) + q * math.log(Cst) - y / 2))
        tail6 = float(np.exp(lnT2 + ln_fac + q * (s - 2) / (2 * s) * math.log(n) - ys / 2))
    ln_tail = lnT1 + ln_fac + q / 2 * math.log(n) + q * math.log(Cst) - y / 2
    return KdeConstants(i, d, s, n, eps, q, y, L, k1, ki, beta_K, C_K, Vmin, Vmax, a2, a_s, th, v0, v1, v2,
                        gam, ys, ks, aH, bH, Cst, ub, None if ub is None else ub * Cst, beta_opt, cb,
                        ln_inf, T1, T2, tail, tail6, floor, lnT1, lnT2, ln_tail, viol)


# ------------------------------------------------------------------ export

def export_majorants_csv(path: str | Path, D: KernelDictionary, hs: Sequence, n: int, step: float, s: float,
                         f: Density | None = None) -> int:
    """One row per (kernel, h) with U and, for s > 2 with f given, U_bar."""
    rows = 0
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        d = D.d
        wr.writerow(["kernel"] + [f"h{j + 1}" for j in range(d)] + ["U", "U_bar", "sqrt_n_norm2"])
        for k in range(len(D)):
            for h in hs:
                w = phi1(D, k, h, n, step)
                m = majorants_i(w, s, n, f)
                fl = math.sqrt(n) * w.norm(2.0)
                wr.writerow([D.kernels[k].label] + [f"{v:.10g}" for v in np.atleast_1d(h)]
                            + [_fmt(m.get("U")), _fmt(m.get("U_bar")), f"{fl:.10g}"])
                rows += 1
    return rows


def _fmt(v) -> str:
    return "" if v is None else f"{v:.10g}"
