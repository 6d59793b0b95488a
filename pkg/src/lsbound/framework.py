"""Generic uniform-bound machinery over a finite parameter space.

Given per-parameter values U, A, B (and their values on pairwise
differences), a tail function g and a metric space, this module builds the
peeling slices, the quantities kappa_U, Lambda_A, Lambda_B, C*(y), the
entropy series and the resulting probability and moment bounds.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from .errors import DivergenceError, DomainError, PreconditionError
from .params import FiniteSpace, SliceDecomposition, build_slices

SERIES_KMAX = 60
SERIES_RTOL = 1e-12
PAIR_ENUM_LIMIT = 1000
PAIR_SAMPLES = 10_000


def u_eps(eps: float) -> float:
    if not 0 < eps <= 1:
        raise DomainError("eps must lie in (0, 1]")
    return 2.0 ** eps * (1.0 + eps)


def c_star(y: float, lambda_A: float, lambda_B: float) -> float:
    """C*(y) = 1 + 2 sqrt(y) Lambda_A + 2 y Lambda_B."""
    if not y > 0:
        raise DomainError("y must be positive")
    return 1.0 + 2.0 * math.sqrt(y) * lambda_A + 2.0 * y * lambda_B


@dataclass(frozen=True)
class TailFunction:
    eval: Callable[[np.ndarray], np.ndarray]
    name: str = "g"

    def __call__(self, x):
        return self.eval(np.asarray(x, dtype=float))

    def check(self, grid: Sequence[float] | None = None, far: float = 1e6) -> bool:
        grid = np.linspace(0.0, 50.0, 501) if grid is None else np.asarray(grid)
        vals = self(grid)
        return bool(np.all(np.diff(vals) <= 1e-15) and float(self(far)) < 1e-6)


EXP_TAIL = TailFunction(lambda x: np.exp(-x), "exp")


@dataclass(eq=False)
class BoundTriple:
    """U, A, B on parameters, their values on pairwise differences, and the tail g."""

    U: np.ndarray
    A: np.ndarray
    B: np.ndarray
    g: TailFunction
    diff: Callable[[int, int], tuple[float, float, float]] | None = None
    _pairs: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.U = np.asarray(self.U, dtype=float)
        self.A = np.asarray(self.A, dtype=float)
        self.B = np.asarray(self.B, dtype=float)
        if not (self.U.shape == self.A.shape == self.B.shape):
            raise DomainError("U, A, B need one value per parameter")

    def pair(self, i: int, j: int) -> tuple[float, float, float]:
        key = (min(i, j), max(i, j))
        if key not in self._pairs:
            if self.diff is None:
                raise DomainError("difference values are required for pairs")
            self._pairs[key] = tuple(float(v) for v in self.diff(*key))
        return self._pairs[key]


def _pairs(members: Sequence[int], seed: int = 0) -> tuple[list[tuple[int, int]], bool]:
    m = len(members)
    if m <= PAIR_ENUM_LIMIT:
        return [(members[a], members[b]) for a in range(m) for b in range(a + 1, m)], False
    rng = np.random.Generator(np.random.Philox(key=seed))
    a = rng.integers(0, m, PAIR_SAMPLES)
    b = rng.integers(0, m - 1, PAIR_SAMPLES)
    b = b + (b >= a)
    return [(members[i], members[j]) for i, j in zip(a, b)], True


@dataclass(frozen=True)
class SupQuotient:
    quotient: float  # sup over pairs of value(diff)/d
    sup: float  # sup of the value over the members
    sampled: bool

    @property
    def value(self) -> float:
        return max(self.quotient, self.sup)


def _sup_quotients(space: FiniteSpace, triple: BoundTriple, members: Sequence[int],
                   seed: int = 0) -> tuple[SupQuotient, SupQuotient, SupQuotient]:
    members = list(members)
    if not members:
        raise DomainError("empty subset")
    pairs, sampled = _pairs(members, seed)
    q = np.zeros(3)
    for i, j in pairs:
        dist = space.dist[i, j]
        vals = np.asarray(triple.pair(i, j))
        if dist > 0:
            q = np.maximum(q, vals / dist)
        elif np.any(vals > 0):
            q = np.where(vals > 0, math.inf, q)
    idx = np.asarray(members)
    sups = (float(triple.U[idx].max()), float(triple.A[idx].max()), float(triple.B[idx].max()))
    return tuple(SupQuotient(float(q[k]), sups[k], sampled) for k in range(3))


def kappa_U(space: FiniteSpace, triple: BoundTriple, members: Sequence[int]) -> float:
    return _sup_quotients(space, triple, members)[0].value


def lambda_AB(space: FiniteSpace, triple: BoundTriple, slices: SliceDecomposition
              ) -> tuple[float, float, list[dict]]:
    """Lambda_A, Lambda_B as sup over slice levels a of a^-1 Lambda(Z_a)."""
    LA = LB = 0.0
    rows = []
    for j in slices.nonempty():
        a = slices.levels[j]
        _, qa, qb = _sup_quotients(space, triple, slices.shell(j))
        LA, LB = max(LA, qa.value / a), max(LB, qb.value / a)
        rows.append({"slice": j, "level": a, "Lambda_A": qa.value, "Lambda_B": qb.value})
    return LA, LB, rows


def covering_profile(space, eps: float, kmax: int = SERIES_KMAX) -> np.ndarray:
    """N(eps 2^-k) for k = 1..kmax."""
    return np.array([space.covering_number(eps * 2.0 ** (-k)) for k in range(1, kmax + 1)], dtype=float)


def _truncate(terms: np.ndarray, running: np.ndarray, what: str) -> int:
    """Index (exclusive) where 3 consecutive terms fall below the relative cutoff."""
    small = terms <= SERIES_RTOL * np.maximum(running, 1e-300)
    streak = 0
    for k, flag in enumerate(small):
        streak = streak + 1 if flag else 0
        if streak == 3:
            return k + 1
    if terms[-1] > 1e-6 * max(running[-1], 1e-300):
        raise DivergenceError(f"{what} did not converge by k={len(terms)}: the entropy grows too "
                              "fast for the tail (check Assumption (W4) / (K3))")
    return len(terms)


@dataclass(frozen=True)
class SeriesResult:
    value: float
    head: float
    terms_used: int


def L_eps_g(N: np.ndarray, g: TailFunction, y: float) -> SeriesResult:
    """g(y) + sum_k N(eps 2^-k)^2 g(9 y 2^{k-3} k^-2), given the covering profile N."""
    if not y > 0:
        raise DomainError("y must be positive")
    k = np.arange(1, len(N) + 1, dtype=float)
    terms = N ** 2 * g(9.0 * y * 2.0 ** (k - 3) / k ** 2)
    head = float(g(y))
    used = _truncate(terms, head + np.cumsum(terms), "L^(eps)_g series")
    return SeriesResult(head + float(terms[:used].sum()), head, used)


def L_g_constant(N: np.ndarray, g: TailFunction) -> SeriesResult:
    """sum_k N(eps 2^-k)^2 sqrt(g(9 * 2^{k-3} k^-2))."""
    k = np.arange(1, len(N) + 1, dtype=float)
    terms = N ** 2 * np.sqrt(g(9.0 * 2.0 ** (k - 3) / k ** 2))
    used = _truncate(terms, np.cumsum(terms), "L^(eps)_g constant")
    return SeriesResult(float(terms[:used].sum()), 0.0, used)


def L_exp(N: np.ndarray) -> float:
    """sum_k exp{2 E(eps 2^-k) - (9/16) 2^k k^-2}."""
    return L_g_constant(N, EXP_TAIL).value


def _series_vec(N: np.ndarray, g: TailFunction, y: np.ndarray) -> np.ndarray:
    k = np.arange(1, len(N) + 1, dtype=float)
    y = np.atleast_1d(y)
    return g(y) + (N ** 2 * g(9.0 * y[:, None] * 2.0 ** (k - 3) / k ** 2)).sum(axis=1)


def moment_integral(func: Callable[[float], float], z: float, q: float) -> tuple[float, float]:
    """q int_1^inf (x-1)^{q-1} func(z x) dx with its quadrature error estimate."""
    if q < 1:
        raise DomainError("q must be >= 1")
    val, err = integrate.quad(lambda x: q * (x - 1.0) ** (q - 1.0) * func(z * x), 1.0, np.inf,
                              epsabs=1e-14, epsrel=1e-10, limit=200)
    return float(val), float(err)


def J_exp_bound(z: float, q: float, Lexp: float) -> float:
    """Gamma(q+1)[1 + L_exp](2/z)^q e^{-z/2}."""
    return math.exp(gammaln(q + 1)) * (1.0 + Lexp) * (2.0 / z) ** q * math.exp(-z / 2)


@dataclass
class UniformBoundReport:
    y: float
    eps: float
    q: float
    u_eps: float
    Lambda_A: float
    Lambda_B: float
    C_star: float
    N_eps8: int
    slice_count: int
    probability_bound: float
    moment_bound: float
    corollary1_probability: float | None
    corollary1_moment: float | None
    theorem2_probability: float | None
    theorem2_moment: float | None
    L_g: float
    per_slice: list = field(default_factory=list)
    series_terms: int = 0
    sampled_pairs: bool = False

    @property
    def probability_capped(self) -> float:
        return min(self.probability_bound, 1.0)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["probability_capped"] = self.probability_capped
        return out


def check_slice_condition(space: FiniteSpace, triple: BoundTriple, slices: SliceDecomposition) -> float:
    """Raise unless kappa_U(a) <= a on every slice; returns the largest ratio kappa/a."""
    worst, worst_j, factor = 0.0, None, 1.0
    for j in slices.nonempty():
        a = slices.levels[j]
        qu = _sup_quotients(space, triple, slices.shell(j))[0]
        ratio = qu.value / a
        factor = max(factor, qu.quotient / a)
        if ratio > worst:
            worst, worst_j = ratio, j
    if worst > 1.0 + 1e-12:
        raise PreconditionError(
            f"kappa_U(a) > a on slice {worst_j} (ratio {worst:.4g}); multiply the distance by "
            f"{factor:.6g} to restore the condition", slice=worst_j, ratio=worst, rescale=factor)
    return worst


def required_rescaling(space: FiniteSpace, triple: BoundTriple, slices: SliceDecomposition) -> float:
    """Smallest factor c >= 1 such that the distance c*d satisfies kappa_U(a) <= a."""
    factor = 1.0
    for j in slices.nonempty():
        qu = _sup_quotients(space, triple, slices.shell(j))[0]
        factor = max(factor, qu.quotient / slices.levels[j])
    return factor


def uniform_bounds(space: FiniteSpace, triple: BoundTriple, eps: float, y: float, q: float = 1.0,
                   slices: SliceDecomposition | None = None) -> UniformBoundReport:
    """Slice-sum probability and moment bounds plus their simplified forms."""
    if not y > 0:
        raise DomainError("y must be positive")
    if q < 1:
        raise DomainError("q must be >= 1")
    u = u_eps(eps)
    slices = build_slices(triple.U, eps) if slices is None else slices
    check_slice_condition(space, triple, slices)
    LA, LB, lam_rows = lambda_AB(space, triple, slices)
    C = c_star(y, LA, LB)
    N8 = space.covering_number(eps / 8.0)
    g = triple.g
    prob_sum = mom_sum = 0.0
    terms_used = 0
    per_slice = []
    for row, j in zip(lam_rows, slices.nonempty()):
        a = slices.levels[j]
        sub = space.subset(slices.shell(j))
        N = covering_profile(sub, eps)
        L = L_eps_g(N, g, y)
        J, Jerr = moment_integral(lambda v, N=N: float(_series_vec(N, g, np.array([v]))[0]), y, q)
        prob_sum += L.value
        mom_sum += a ** q * J
        terms_used = max(terms_used, L.terms_used)
        per_slice.append({**row, "members": len(slices.members[j]), "shell": len(sub),
                          "L": L.value, "J": J, "J_err": Jerr})
    prob = N8 * prob_sum
    mom = N8 * (u * C) ** q * mom_sum
    Nfull = covering_profile(space, eps)
    Lg = L_g_constant(Nfull, g).value
    c1p = c1m = t2p = t2m = None
    if y >= 1:
        gy = float(g(y))
        c1p = N8 * slices.count * (gy + Lg * math.sqrt(gy))
        Jg, _ = moment_integral(lambda v: float(g(v) + Lg * math.sqrt(g(v))), y, q)
        c1m = N8 * (2 ** (2 * eps) * slices.R * (1 + eps) * C) ** q / (2 ** (q * eps) - 1) * Jg
        if g.name == "exp":
            t2p = slices.count * N8 * (1 + Lg) * math.exp(-y / 2)
            t2m = theorem2_moment(eps, q, N8, slices.R, c_star(1.0, LA, LB), Lg, y)
    return UniformBoundReport(y, eps, q, u, LA, LB, C, int(N8), slices.count, prob, mom,
                              c1p, c1m, t2p, t2m, Lg, per_slice, terms_used,
                              any(len(slices.shell(j)) > PAIR_ENUM_LIMIT for j in slices.nonempty()))


def theorem2_prefactor(eps: float, q: float) -> float:
    """2^{q(eps+1)} u_eps^q / (2^{q eps} - 1) * Gamma(q+1)."""
    return 2 ** (q * (eps + 1)) * u_eps(eps) ** q / (2 ** (q * eps) - 1) * math.exp(gammaln(q + 1))


def theorem2_probability(eps: float, N8: float, slice_count: float, Lexp: float, y: float) -> float:
    return slice_count * N8 * (1 + Lexp) * math.exp(-y / 2)


def theorem2_moment(eps: float, q: float, N8: float, R: float, C1: float, Lexp: float, y: float) -> float:
    return theorem2_prefactor(eps, q) * N8 * (R * C1) ** q * (1 + Lexp) * math.exp(-y / 2)
