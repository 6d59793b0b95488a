"""Bounds for the empirical process xi_w(t) = sum_i [w(t - X_i) - E w(t - X)].

Fixed-weight tails, the non-random majorant U_xi with its (A, B) companions,
the data-driven majorant built from the sample, and the constant assembly
for uniform bounds over classes of difference weights.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import gammaln, logsumexp

from .errors import DivergenceError, DomainError, PreconditionError, RegimeError
from .framework import (EXP_TAIL, BoundTriple, L_exp, covering_profile, u_eps)
from .params import FiniteSpace, SliceDecomposition
from .sampling import bin_sample
from .weights import Density, WeightClass, WeightFunction, m_p, sigma_s

__all__ = [
    "c1", "c3", "c_star_s", "EmpiricalBoundParams", "empirical_params", "rho_s", "omega_sq",
    "U_xi", "A_xi", "B_xi", "theorem1_tail", "corollary2_tail", "corollary3", "u_eps",
    "ubar_eps", "y_gamma", "RandomMajorant", "random_majorant", "r1_sides", "theorem3_constants",
    "event_A", "sandwich", "theorem4_bound", "Theorem4Result", "gamma_of_mu", "theta0",
    "theta1", "theta2", "k_star", "I_eps", "L_star", "C_p_default", "DifferenceClassConstants",
    "theorem5_assembly", "empirical_triple", "assumption_L_factor", "d_star",
]


# ------------------------------------------------------------------ constants

def c1(s: float) -> float:
    """Rosenthal-type constant: 15 s / ln s for s > 2, else 1."""
    if s < 1:
        raise DomainError("s must be >= 1")
    return 1.0 if s <= 2 else 15.0 * s / math.log(s)


def c3(s: float, c2: float = 1.0) -> float:
    return max(c1(s), c2)


def c_star_s(s: float, c2: float = 1.0) -> float:
    if s < 1:
        raise DomainError("s must be >= 1")
    if s < 2:
        return 0.0
    if s == 2:
        return 1.0
    return c3(s, c2)


def ubar_eps(eps: float, gamma: float, s: float) -> float:
    """u_eps / (1 - 4 c1(s)(1 + eps) gamma)."""
    if gamma < 0:
        raise DomainError("gamma must be nonnegative")
    lev = 4.0 * c1(s) * (1.0 + eps) * gamma
    if lev >= 1:
        raise PreconditionError(f"majorant inflation undefined: 4 c1(s)(1+eps) gamma = {lev:.4g} >= 1",
                                gamma=gamma, limit=1.0 / (4.0 * c1(s) * (1.0 + eps)))
    return u_eps(eps) / (1.0 - lev)


def y_gamma(lambda_A: float, lambda_B: float, gamma: float) -> float:
    """Positive root y of sqrt(y) lambda_A + y lambda_B = gamma^2."""
    if lambda_A < 0 or lambda_B < 0:
        raise DomainError("lambda values must be nonnegative")
    if lambda_A == 0 and lambda_B == 0:
        raise DomainError("root undefined when both lambdas vanish")
    if not gamma > 0:
        raise DomainError("gamma must be positive")
    g2 = gamma * gamma
    # t = sqrt(y); the rationalised root avoids cancellation when lambda_B is small
    t = 2.0 * g2 / (lambda_A + math.sqrt(lambda_A ** 2 + 4.0 * lambda_B * g2))
    if not math.isfinite(t * t):
        raise DomainError("root overflows double precision")
    return t * t


# ------------------------------------------------------------------ fixed weight

@dataclass
class EmpiricalBoundParams:
    s: float
    n: int
    c1: float
    c3: float
    c_star: float
    f_inf: float
    M_s: float
    M_2: float
    Sigma_s: float | None
    M_mid: float  # M_{1,tau,nu'} at s = 2, M_{2s/(s+2),tau,nu'} for s > 2
    rho_s: float
    omega_sq: float
    U_xi: float
    A_xi: float
    B_xi: float

    def to_dict(self) -> dict:
        return asdict(self)


def _need_f(f, what: str):
    if f is None:
        raise DomainError(f"{what} needs the design density")


def empirical_params(w: WeightFunction, f: Density | None, s: float, n: int, c2: float = 1.0
                     ) -> EmpiricalBoundParams:
    if n < 1:
        raise DomainError("n must be >= 1")
    if s < 1:
        raise DomainError("s must be >= 1")
    C1, C3, Cst = c1(s), c3(s, c2), c_star_s(s, c2)
    Ms, M2 = m_p(w, s), m_p(w, 2.0)
    rn, ns = math.sqrt(n), n ** (1.0 / s)
    f_inf = f.f_inf if f is not None else 1.0
    Sig = sigma_s(w, f, s) if f is not None else None
    if s < 2:
        rho = 4.0 * ns * Ms if Sig is None else min(rn * Sig, 4.0 * ns * Ms)
        om = Ms ** 2 * (14.0 * n + 96.0 * ns)
        mid = float("nan")
        U = 4.0 * ns * Ms
        A2 = 37.0 * n * Ms ** 2
    elif s == 2:
        _need_f(f, "omega^2 at s = 2")
        mid = m_p(w, 1.0, f)
        rho = rn * M2
        om = 6.0 * n * mid ** 2 + 24.0 * rn * M2 ** 2
        U = rn * M2
        A2 = 2.0 * f_inf ** 2 * n * m_p(w, 1.0) ** 2 + 8.0 * rn * M2 ** 2
    else:
        _need_f(f, "the s > 2 bounds")
        p = 2.0 * s / (s + 2.0)
        mid = m_p(w, p, f)
        rho = C1 * (rn * Sig + 2.0 * ns * Ms)
        om = 6.0 * C3 * (n * mid ** 2 + 4.0 * rn * Sig * Ms + 8.0 * ns * Ms ** 2)
        U = rho
        A2 = 2.0 * C3 * f_inf ** 2 * (n * m_p(w, p) ** 2 + 4.0 * rn * M2 * Ms + 8.0 * ns * Ms ** 2)
    B = 4.0 / 3.0 * Cst * Ms
    return EmpiricalBoundParams(s, n, C1, C3, Cst, f_inf, Ms, M2, Sig, mid, rho, om, U,
                                math.sqrt(A2), B)


def rho_s(w, f, s, n) -> float:
    return empirical_params(w, f, s, n).rho_s


def omega_sq(w, f, s, n) -> float:
    return empirical_params(w, f, s, n).omega_sq


def U_xi(w, f, s, n) -> float:
    return empirical_params(w, f, s, n).U_xi


def A_xi(w, f, s, n) -> float:
    return empirical_params(w, f, s, n).A_xi


def B_xi(w, f, s, n) -> float:
    return empirical_params(w, f, s, n).B_xi


def _gauss_bernstein(z, var_third: float, lin: float) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0):
        raise DomainError("z must be positive")
    den = var_third + lin * z
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0, np.exp(-z * z / np.where(den > 0, den, 1.0)), 0.0)
    return out


def theorem1_tail(params: EmpiricalBoundParams, z) -> np.ndarray | float:
    """P{||xi_w||_s >= rho_s + z} bound exp{-z^2 / (omega^2/3 + (4/3) c_* M_s z)}."""
    out = _gauss_bernstein(z, params.omega_sq / 3.0, 4.0 / 3.0 * params.c_star * params.M_s)
    return float(out) if out.ndim == 0 else out


def corollary2_tail(M_s: float, n: int, s: float, z) -> tuple[float, np.ndarray | float]:
    """Threshold 4 n^{1/s} M_s and tail exp{-z^2 / (37 n M_s^2)} for s < 2."""
    if not 1 <= s < 2:
        raise RegimeError("the f-free sub-Gaussian form is stated for s in [1, 2)")
    out = _gauss_bernstein(z, 37.0 * n * M_s ** 2, 0.0)
    return 4.0 * n ** (1.0 / s) * M_s, (float(out) if out.ndim == 0 else out)


def corollary3(w: WeightFunction, f: Density, s: float, n: int, z, c2: float = 1.0):
    """(rho~, omega~^2, tail) with f entering only through ||sqrt f||_s and f_inf."""
    if not s > 2:
        raise RegimeError("this form is stated for s > 2")
    C1, C3 = c1(s), c3(s, c2)
    Ms, M2 = m_p(w, s), m_p(w, 2.0)
    sq = f.sqrt_norm(s, w.step)
    fi = max(1.0, f.sup)
    rn, ns = math.sqrt(n), n ** (1.0 / s)
    rho_t = C1 * (rn * M2 * sq + 2.0 * ns * Ms)
    om_t = 6.0 * C3 * (n * fi ** ((s + 2) / s) * m_p(w, 2 * s / (s + 2)) ** 2
                       + 4.0 * rn * M2 * Ms * sq + 8.0 * ns * Ms ** 2)
    out = _gauss_bernstein(z, om_t / 3.0, 4.0 / 3.0 * C3 * Ms)
    return rho_t, om_t, (float(out) if out.ndim == 0 else out)


# ------------------------------------------------------------------ random majorant

@dataclass(frozen=True, eq=False)
class RandomMajorant:
    S_sq: WeightFunction  # t -> (1/n) sum_i w^2(t - X_i)
    Sigma_hat: float
    U_hat: float
    U_breve: float
    M_s: float
    M_2: float
    n: int
    s: float
    mode: str = "data"
    Sigma: float | None = None
    U_oracle: float | None = None


def _S_sq(w: WeightFunction, counts: WeightFunction, n: int) -> WeightFunction:
    vals = fftconvolve(counts.values, w.values ** 2) / n
    vals = np.clip(vals, 0.0, None)
    return WeightFunction(vals, w.step, tuple(a + b for a, b in zip(counts.origin, w.origin)), "S^2")


def _norm_of(vals: np.ndarray, cell: float, p: float) -> float:
    a = np.abs(vals)
    return float((np.sum(a ** p) * cell) ** (1.0 / p))


def random_majorant(w: WeightFunction, X: np.ndarray, s: float, f: Density | None = None,
                    c2: float = 1.0) -> RandomMajorant:
    """Sample-based majorant c1[sqrt(n) Sigma_hat_s + 2 n^{1/s} M_s] and its floor sqrt(n) M_2."""
    if not s > 2:
        raise RegimeError("the data-driven majorant is defined for s > 2")
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        raise DomainError("empty sample")
    counts = bin_sample(X, w.step)
    n = int(X.shape[0])
    S2 = _S_sq(w, counts, n)
    sig_hat = _norm_of(S2.values, S2.cell, s / 2.0) ** 0.5
    Ms, M2 = m_p(w, s), m_p(w, 2.0)
    C1 = c1(s)
    U_hat = C1 * (math.sqrt(n) * sig_hat + 2.0 * n ** (1.0 / s) * Ms)
    U_breve = max(U_hat, math.sqrt(n) * M2)
    if f is None:
        return RandomMajorant(S2, sig_hat, U_hat, U_breve, Ms, M2, n, s)
    sig = sigma_s(w, f, s)
    U = C1 * (math.sqrt(n) * sig + 2.0 * n ** (1.0 / s) * Ms)
    return RandomMajorant(S2, sig_hat, U_hat, U_breve, Ms, M2, n, s, "oracle", sig, U)


def xi_w2_norm(w: WeightFunction, X: np.ndarray, f: Density, s: float) -> float:
    """||xi_{w^2}||_{s/2} computed from the same sample."""
    counts = bin_sample(np.asarray(X, dtype=float), w.step)
    n = len(X)
    w2 = w.square()
    raw = WeightFunction(fftconvolve(counts.values, w2.values), w.step,
                         tuple(a + b for a, b in zip(counts.origin, w2.origin)))
    path = raw - w2.convolve(f.tabulate(w.step)).scale(float(n))
    return path.norm(s / 2.0)


def r1_sides(w: WeightFunction, X: np.ndarray, f: Density, s: float) -> tuple[float, float]:
    """(|Sigma_hat_s - Sigma_s|, sqrt(||xi_{w^2}||_{s/2} / n))."""
    maj = random_majorant(w, X, s, f)
    return abs(maj.Sigma_hat - maj.Sigma), math.sqrt(xi_w2_norm(w, X, f, s) / len(X))


def theorem3_constants(eps: float, q: float, N8: float, r: float, R: float, Lexp: float,
                       s: float) -> dict:
    """T_1 and T_2; log2(R/r) is floored at 1 so a single shell still counts once."""
    u = u_eps(eps)
    lg = max(1.0, math.log2(R / r))
    I = 2 ** (q * (eps + 1)) / (2 ** (q * eps) - 1) * math.exp(gammaln(q + 1)) + 1.0
    T1 = I * N8 * (2 * u * R) ** q * lg * (1 + Lexp)
    T2 = (c1(s) + 2.0) ** q * N8 * lg * (1 + Lexp)
    return {"T1": T1, "T2": T2, "log2_R_over_r": lg}


def event_A(w2_norms: Sequence[float], slices: SliceDecomposition, gamma: float, eps: float
            ) -> tuple[bool, list[bool]]:
    """A_j: max over shell j of ||xi_{w^2}||_{s/2} <= [2(1+eps) gamma delta_j]^2."""
    w2 = np.asarray(w2_norms, dtype=float)
    flags = []
    for j in slices.nonempty():
        delta = slices.levels[j]
        top = float(w2[list(slices.shell(j))].max())
        flags.append(top <= (2.0 * (1.0 + eps) * gamma * delta) ** 2)
    return all(flags), flags


def sandwich(U: np.ndarray, U_hat: np.ndarray, gamma: float, s: float, eps: float
             ) -> tuple[np.ndarray, np.ndarray]:
    """Per-member (lower holds, upper holds) for U[1 -+ 4 c1 (1+eps) gamma]."""
    lev = 4.0 * c1(s) * (1.0 + eps) * gamma
    U, U_hat = np.asarray(U, dtype=float), np.asarray(U_hat, dtype=float)
    tol = 1e-9 * np.maximum(U, 1e-300)
    return U_hat >= U * (1 - lev) - tol, U_hat <= U * (1 + lev) + tol


# ------------------------------------------------------------------ uniform bounds over classes

def assumption_L_factor(cls: WeightClass, p: float, space: FiniteSpace | None = None) -> float:
    """Smallest c >= 1 such that (L) holds in order p for the distance c * d."""
    space = cls.space if space is None else space
    norms = cls.norms(p)
    worst = 1.0
    for i in range(len(cls)):
        for j in range(i + 1, len(cls)):
            dist = space.dist[i, j]
            diff = (cls.weights[i] - cls.weights[j]).norm(p)
            if diff == 0:
                continue
            if dist <= 0:
                return math.inf
            worst = max(worst, diff / (dist * max(norms[i], norms[j])))
    return worst


def _check_L(cls: WeightClass, p: float, space: FiniteSpace):
    fac = assumption_L_factor(cls, p, space)
    if fac > 1.0 + 1e-12:
        raise PreconditionError(f"Assumption (L) fails in order {p:g}; scale the distance by {fac:.6g}",
                                rescale=fac)


@dataclass
class Theorem4Result:
    s: float
    eps: float
    q: float
    z: float
    y: float
    Lambda_A: float
    Lambda_B: float
    C_star: float
    N_eps8: int
    L_exp: float
    slice_count: int
    T: float
    tail: float
    probability: float
    majorant: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["majorant"] = [float(v) for v in self.majorant]
        return out


def theorem4_bound(cls: WeightClass, s: float, eps: float, z: float, f: Density | None = None,
                   q: float = 1.0, space: FiniteSpace | None = None, check: bool = True) -> Theorem4Result:
    """Majorants and tails of the non-random uniform bound for s in [1, 2]."""
    if not 1 <= s <= 2:
        raise RegimeError("the non-random uniform bound covers s in [1, 2]")
    space = cls.space if space is None else space
    if check:
        _check_L(cls, s if s < 2 else 2.0, space)
    n = cls.n
    u = u_eps(eps)
    N8 = space.covering_number(eps / 8.0)
    Lx = L_exp(covering_profile(space, eps))
    pref = 2 ** (q * (eps + 1)) * u ** q / (2 ** (q * eps) - 1) * math.exp(gammaln(q + 1)) * N8 * (1 + Lx)
    if s < 2:
        floor = math.sqrt(37.0) / 2.0 * n ** (0.5 - 1.0 / s)
        if z < floor * (1 - 1e-12):
            raise PreconditionError(f"z = {z:g} below the floor {floor:.6g}", floor=floor)
        LA, LB = math.sqrt(37.0) / 4.0 * n ** (0.5 - 1.0 / s), 0.0
        y = 4.0 / 37.0 * n ** (2.0 / s - 1.0) * z * z
        T = pref * (4.0 * cls.w_bar(s) * (1.0 + 4.0 * n ** (0.5 - 1.0 / s))) ** q
        tail = T * n ** (q / s) * math.exp(-2.0 * z * z / 37.0 * n ** (2.0 / s - 1.0))
        maj = 4.0 * u * (1.0 + z) * n ** (1.0 / s) * cls.norms(s)
        Uvals = 4.0 * n ** (1.0 / s) * cls.norms(s)
    else:
        _need_f(f, "the s = 2 uniform bound")
        c = f.f_inf ** 2 * cls.mu_star + 4.0 / math.sqrt(n)
        floor = math.sqrt(8.0 * c)
        if z < floor * (1 - 1e-12):
            raise PreconditionError(f"z = {z:g} below the floor {floor:.6g}", floor=floor)
        LA = math.sqrt(2.0 * f.f_inf ** 2 * cls.mu_star + 8.0 / math.sqrt(n))
        LB = 4.0 / 3.0 / math.sqrt(n)
        y = z * z / (8.0 * c)
        T = pref * cls.w_bar(2.0) ** q * (1.0 + 2.0 * math.sqrt(2.0 * cls.mu_star * f.f_inf ** 2
                                                               + 8.0 / math.sqrt(n))
                                          + 8.0 / 3.0 / math.sqrt(n)) ** q
        tail = T * n ** (q / 2.0) * math.exp(-z * z / (16.0 * c))
        maj = u * (1.0 + z + z * z / 12.0) * math.sqrt(n) * cls.norms(2.0)
        Uvals = math.sqrt(n) * cls.norms(2.0)
    C = 1.0 + 2.0 * math.sqrt(y) * LA + 2.0 * y * LB
    r, R = float(Uvals.min()), float(Uvals.max())
    count = int(math.floor(math.log2(R / r) / eps + 1e-12)) + 1
    prob = count * N8 * (1 + Lx) * math.exp(-y / 2.0)
    return Theorem4Result(s, eps, q, z, y, LA, LB, C, int(N8), Lx, count, T, tail, prob, maj)


def gamma_of_mu(mu: float, s: float) -> float:
    if mu <= 0:
        raise DomainError("mu must be positive")
    t = min(s, 4.0)
    return mu ** (1.0 / t - 0.5)


def C_p_default(p: float, alpha_star: float, mu: float) -> float:
    """C_p = (2 alpha_*)^{1 - 2/p} mu^{1/p - 1/2}, valid with m_p = 2/p."""
    return (2.0 * alpha_star) ** (1.0 - 2.0 / p) * mu ** (1.0 / p - 0.5)


def theta0(s: float, C_s: float, f_inf: float, alpha_star: float) -> float:
    return 5.0 * c1(s) * max(C_s, 1.0) * f_inf * alpha_star


def theta1(alpha_star: float) -> float:
    return 1.0 / (148.0 * alpha_star ** 4)


def theta2(s: float, f_inf: float, alpha_star: float, C_half: float) -> float:
    return 5.0 * math.sqrt(2.0) * c1(s / 2.0) * f_inf * alpha_star ** 2 * C_half


def k_star(s: float, alpha_star: float, C_s: float, C_half: float) -> float:
    return 8.0 * alpha_star ** 2 * c1(s) * max(C_s, C_half, 1.0)


def I_eps(q: float, eps: float) -> float:
    return 2 ** (q * (eps + 1)) / (2 ** (q * eps) - 1) * math.exp(gammaln(q + 1)) + 1.0


def L_star(eps: float, beta: float, m: float, kstar: float, kmax: int = 1000) -> float:
    """log of sum_k exp{2^{1 + k beta/m} (eps/k_*)^{-beta/m} - (9/16) 2^k k^-2}."""
    if not beta < m:
        raise PreconditionError("the entropy exponent must satisfy beta < m", beta=beta, m=m)
    r = beta / m
    k = np.arange(1, kmax + 1, dtype=float)
    ln2 = math.log(2.0)
    # exponents in log2 form to stay finite for large k
    with np.errstate(over="ignore"):
        a = np.exp((1 + k * r) * ln2 + r * math.log(kstar / eps)) - 9.0 / 16.0 * np.exp(k * ln2) / k ** 2
    top = int(np.argmax(a))
    tail_ok = np.isfinite(a) & (np.arange(kmax) > top) & (a < a[top] - 60.0)
    if not tail_ok.any():
        raise DivergenceError("L_* series did not converge (beta too close to m)")
    stop = int(np.flatnonzero(tail_ok)[0]) + 1
    return float(logsumexp(a[:stop]))


def d_star(dist: np.ndarray, kstar: float, m_s: float, m_half: float | None = None) -> np.ndarray:
    """k_* [d v d^{m_s} (v d^{m_{s/2}})] applied elementwise."""
    d = np.asarray(dist, dtype=float)
    out = np.maximum(d, d ** m_s)
    if m_half is not None:
        out = np.maximum(out, d ** m_half)
    return kstar * out


@dataclass
class DifferenceClassConstants:
    s: float
    n: int
    eps: float
    q: float
    alpha_star: float
    mu: float
    mu_star: float
    f_inf: float
    m_s: float
    m_half: float | None
    C_s: float
    C_half: float | None
    m: float
    beta: float
    gamma: float
    theta0: float
    theta1: float
    theta2: float | None
    y_star: float
    k_star: float
    C_star: float
    ubar_eps: float | None
    majorant_factor: float | None
    ln_L_star: float
    C_Z: float
    N_cover: int
    I_eps: float
    T5: float
    T6: float
    tail: float
    violations: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def C_star_xi(y: float, th0: float, mu_star: float, n: int, s: float) -> float:
    return 1.0 + 2.0 * th0 * (math.sqrt(y) * (mu_star ** (1 / s) + n ** (-1 / (2 * s))) + y * n ** (-1 / s))


def theorem5_assembly(cls: WeightClass, f: Density, s: float, eps: float, y: float, q: float = 1.0,
                      m_over: dict | None = None, C_over: dict | None = None, check: bool = True
                      ) -> DifferenceClassConstants:
    """Constants of the random uniform bound for s > 2; preconditions raise unless check=False.

    m_over / C_over replace the default m_p = 2/p and C_p for p in {s, s/2}.
    """
    if not s > 2:
        raise RegimeError("the random uniform bound is stated for s > 2")
    n, mu, mu_s, fi = cls.n, cls.mu, cls.mu_star, f.f_inf
    a_s = cls.alpha_star
    m_over = dict(m_over or {})
    C_over = dict(C_over or {})
    ms = m_over.get(s, 2.0 / s)
    Cs = C_over.get(s, C_p_default(s, a_s, mu))
    big = s >= 4
    mh = m_over.get(s / 2, 4.0 / s) if big else None
    Ch = C_over.get(s / 2, C_p_default(s / 2, a_s, mu)) if big else None
    m = min(1.0, ms) if not big else min(1.0, ms, mh)
    t = min(s, 4.0)
    gam = gamma_of_mu(mu, s)
    viol = []
    mu_floor = (64.0 * c1(s) ** 2) ** (t / (t - 1.0))
    if not mu > mu_floor:
        viol.append(f"mu = {mu:.6g} must exceed {mu_floor:.6g}")
    if not cls.beta < m:
        viol.append(f"beta = {cls.beta:g} must be below m = {m:g}")
    th0 = theta0(s, Cs, fi, a_s)
    th1 = theta1(a_s)
    th2 = theta2(s, fi, a_s, Ch) if big else None
    ys = th1 * n ** (4.0 / s - 1.0) if not big else th2 * mu ** -0.5 * (mu_s ** (2 / s) + n ** (-1 / s)) ** -2
    if not 1 <= y <= ys:
        viol.append(f"y = {y:g} outside [1, y_* = {ys:.6g}]")
    try:
        ub = ubar_eps(eps, gam, s)
    except PreconditionError as exc:
        ub = None
        viol.append(str(exc))
    if viol and check:
        raise PreconditionError("; ".join(viol), violations=viol)
    Cst = C_star_xi(y, th0, mu_s, n, s)
    ks = k_star(s, a_s, Cs, Ch if big else 0.0)
    try:
        lnL = L_star(eps, cls.beta, m, ks)
    except (PreconditionError, DivergenceError) as exc:
        if check:
            raise
        lnL = math.inf
        viol.append(str(exc))
    CZ = cls.C_Z()
    Ncov = cls.space.covering_number((eps / (8.0 * ks)) ** (1.0 / m))
    wb, wu = cls.w_bar(2.0), cls.w_under(2.0)
    lg = max(1.0, math.log2(ks * wb / wu))
    # log of [1 + L_* e^{2 C_Z}]
    ln_brack = float(np.logaddexp(0.0, lnL + 2.0 * CZ))
    I = I_eps(q, eps)
    u = u_eps(eps)
    ln_common = math.log(Ncov) + math.log(lg) + ln_brack
    T5 = math.exp(math.log(I) + q * math.log(2 * u * ks * wb) + ln_common)
    T6 = math.exp(q * math.log(c1(s) + 2.0) + q * math.log(a_s * wb) + ln_common)
    tail = T5 * n ** (q / 2.0) * Cst ** q * math.exp(-y / 2.0)
    return DifferenceClassConstants(s, n, eps, q, a_s, mu, mu_s, fi, ms, mh, Cs, Ch, m, cls.beta, gam,
                                    th0, th1, th2, ys, ks, Cst, ub, None if ub is None else ub * Cst,
                                    lnL, CZ, int(Ncov), I, T5, T6, tail, viol)


# ------------------------------------------------------------------ triples for the framework

def empirical_triple(weights: Sequence[WeightFunction], f: Density | None, s: float, n: int
                     ) -> BoundTriple:
    """(U_xi, A_xi, B_xi, exp) on class members and on pairwise differences."""
    ps = [empirical_params(w, f, s, n) for w in weights]

    def diff(i, j):
        p = empirical_params(weights[i] - weights[j], f, s, n)
        return p.U_xi, p.A_xi, p.B_xi

    return BoundTriple([p.U_xi for p in ps], [p.A_xi for p in ps], [p.B_xi for p in ps], EXP_TAIL, diff)
