"""Kernels, test densities, tabulated weights and their norm functionals.

Every weight lives on the lattice {k * step}: node k carries the value at
k * step and stands for the cell of width `step` around it, so integrals are
midpoint sums.  Densities are tabulated by their hat-function averages
(the integral of f against the linear B-spline at each node, divided by the
cell volume).  That is exactly the law of a linearly binned sample, which
keeps simulated processes and quadrature constants on the same footing.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy import stats
from scipy.interpolate import RegularGridInterpolator
from scipy.signal import fftconvolve

from .errors import DomainError, GridError
from .params import FiniteSpace

MIN_NODES_PER_BANDWIDTH = 4
DEFAULT_RAMP = 1.0 / 16


# --------------------------------------------------------------------------- weights

@dataclass(frozen=True, eq=False)
class WeightFunction:
    """Difference-form weight w(t - x) tabulated on a uniform lattice."""

    values: np.ndarray
    step: float
    origin: tuple[int, ...]
    label: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim == 0:
            v = v.reshape(1)
        v = np.array(v, copy=True)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        org = tuple(int(o) for o in np.atleast_1d(self.origin))
        if len(org) != v.ndim:
            raise GridError("origin must give one index per axis")
        object.__setattr__(self, "origin", org)
        if not self.step > 0:
            raise GridError("grid step must be positive")

    @property
    def d(self) -> int:
        return self.values.ndim

    @property
    def cell(self) -> float:
        return self.step ** self.d

    def coords(self, axis: int = 0) -> np.ndarray:
        return (np.arange(self.values.shape[axis]) - self.origin[axis]) * self.step

    def norm(self, p: float) -> float:
        if p < 1:
            raise DomainError("norm order must be >= 1")
        a = np.abs(self.values)
        if math.isinf(p):
            return float(a.max(initial=0.0))
        if p == 1:
            return float(a.sum() * self.cell)
        if p == 2:
            return float(math.sqrt(np.sum(a * a) * self.cell))
        return float((np.sum(a ** p) * self.cell) ** (1.0 / p))

    @property
    def sup(self) -> float:
        return self.norm(math.inf)

    @property
    def support_measure(self) -> float:
        return float(np.count_nonzero(self.values) * self.cell)

    def level_set_measure(self, level: float) -> float:
        return float(np.count_nonzero(np.abs(self.values) >= level) * self.cell)

    def with_values(self, values: np.ndarray, label: str | None = None) -> "WeightFunction":
        return WeightFunction(values, self.step, self.origin, self.label if label is None else label)

    def scale(self, c: float) -> "WeightFunction":
        return self.with_values(c * self.values)

    def square(self) -> "WeightFunction":
        return self.with_values(self.values ** 2, f"{self.label}^2")

    def abs_pow(self, p: float) -> "WeightFunction":
        return self.with_values(np.abs(self.values) ** p)

    def _check_step(self, other: "WeightFunction"):
        if not math.isclose(self.step, other.step, rel_tol=1e-12) or self.d != other.d:
            raise GridError("weights live on incompatible grids")

    def align(self, other: "WeightFunction") -> tuple[np.ndarray, np.ndarray, tuple[int, ...]]:
        self._check_step(other)
        pads_a, pads_b, origin = [], [], []
        for ax in range(self.d):
            sa, sb = -self.origin[ax], -other.origin[ax]
            ea, eb = sa + self.values.shape[ax], sb + other.values.shape[ax]
            s, e = min(sa, sb), max(ea, eb)
            pads_a.append((sa - s, e - ea))
            pads_b.append((sb - s, e - eb))
            origin.append(-s)
        return np.pad(self.values, pads_a), np.pad(other.values, pads_b), tuple(origin)

    def __add__(self, other: "WeightFunction") -> "WeightFunction":
        a, b, org = self.align(other)
        return WeightFunction(a + b, self.step, org)

    def __sub__(self, other: "WeightFunction") -> "WeightFunction":
        a, b, org = self.align(other)
        return WeightFunction(a - b, self.step, org, f"{self.label}-{other.label}")

    def convolve(self, other: "WeightFunction") -> "WeightFunction":
        self._check_step(other)
        out = fftconvolve(self.values, other.values) * self.cell
        # FFT round-off leaves dust where the exact convolution vanishes
        out[np.abs(out) < 1e-13 * max(np.abs(out).max(initial=0.0), 1e-300)] = 0.0
        org = tuple(a + b for a, b in zip(self.origin, other.origin))
        return WeightFunction(out, self.step, org, f"{self.label}*{other.label}")

    def argmax(self) -> np.ndarray:
        idx = np.unravel_index(int(np.argmax(np.abs(self.values))), self.values.shape)
        return (np.asarray(idx) - np.asarray(self.origin)) * self.step


def zero_weight(step: float, d: int = 1) -> WeightFunction:
    return WeightFunction(np.zeros((1,) * d), step, (0,) * d, "0")


# --------------------------------------------------------------------------- kernels

def _box_profile(r: float) -> Callable[[np.ndarray], np.ndarray]:
    if r == 0:
        def prof(x):
            a = np.abs(x)
            return np.where(a < 0.5, 1.0, np.where(np.isclose(a, 0.5, rtol=0, atol=1e-12), 0.5, 0.0))
        return prof
    height = 1.0 / (1.0 - r)

    def prof(x):
        return height * np.clip((0.5 - np.abs(x)) / r, 0.0, 1.0)
    return prof


def _triangle(x):
    return 2.0 * np.clip(1.0 - 2.0 * np.abs(x), 0.0, None)


def _epanechnikov(x):
    return 1.5 * np.clip(1.0 - 4.0 * x * x, 0.0, None)


def _cosine(x):
    return np.where(np.abs(x) <= 0.5, 0.5 * np.pi * np.cos(np.pi * np.clip(x, -0.5, 0.5)), 0.0)


# name -> (profile factory, sup, Lipschitz constant) for unit-integral 1-d profiles
def _profile_table(name: str, ramp: float):
    if name == "box":
        if not 0 <= ramp < 0.5:
            raise DomainError("box ramp must lie in [0, 1/2)")
        lip = math.inf if ramp == 0 else 1.0 / (ramp * (1.0 - ramp))
        return _box_profile(ramp), 1.0 / (1.0 - ramp), lip
    if name == "triangle":
        return _triangle, 2.0, 4.0
    if name == "epanechnikov-lipschitz-clipped":
        return _epanechnikov, 1.5, 6.0
    if name == "cosine":
        return _cosine, 0.5 * math.pi, 0.5 * math.pi ** 2
    raise DomainError(f"unknown kernel {name!r}")


KERNEL_NAMES = ("box", "triangle", "epanechnikov-lipschitz-clipped", "cosine")


@dataclass(frozen=True, eq=False)
class Kernel:
    """Kernel on R^d supported in [-1/2, 1/2]^d with Lipschitz and size constants."""

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    d: int
    lipschitz: float
    k_inf: float
    k1: float
    halfwidth: float = 0.5
    params: dict = field(default_factory=dict)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.d == 1 and (x.ndim == 0 or x.shape[-1] != 1):
            x = x[..., None]
        return self.func(x)

    @property
    def label(self) -> str:
        extra = ",".join(f"{k}={v:g}" for k, v in sorted(self.params.items()))
        return f"{self.name}({extra})" if extra else self.name

    def tabulate(self, step: float, h=1.0, n: float = 1.0) -> WeightFunction:
        """n^-1 V_h^-1 K(u / h) on the lattice u = k * step."""
        h = np.broadcast_to(np.atleast_1d(np.asarray(h, dtype=float)), (self.d,))
        if np.any(h <= 0):
            raise DomainError("bandwidth must be positive")
        if np.any(h / step < MIN_NODES_PER_BANDWIDTH):
            raise GridError(f"grid step {step:g} too coarse for bandwidth {h.min():g}")
        axes = []
        for hi in h:
            m = int(math.ceil(self.halfwidth * hi / step)) + 1
            axes.append(np.arange(-m, m + 1) * (step / hi))
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack(mesh, axis=-1)
        vals = self.func(pts) / (n * float(np.prod(h)))
        org = tuple(len(a) // 2 for a in axes)
        hl = ",".join(f"{v:.4g}" for v in h)
        return WeightFunction(vals, step, org, f"{self.label}[h={hl}]")


def make_kernel(name: str, d: int = 1, ramp: float = DEFAULT_RAMP) -> Kernel:
    """Product kernel built from a unit-integral 1-d profile."""
    if d < 1:
        raise DomainError("dimension must be >= 1")
    prof, sup1, lip1 = _profile_table(name, ramp)

    def func(x, prof=prof):
        x = np.asarray(x, dtype=float)
        out = prof(x[..., 0])
        for i in range(1, x.shape[-1]):
            out = out * prof(x[..., i])
        return out

    lip = math.sqrt(d) * lip1 * sup1 ** (d - 1)
    params = {"ramp": ramp} if name == "box" else {}
    return Kernel(name, func, d, lip, max(1.0, sup1 ** d), 1.0, 0.5, params)


def load_kernel_csv(path: str | Path) -> Kernel:
    """Tabulated kernel from rows x_1..x_d,value on a rectangular grid."""
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                continue  # header
    if not rows:
        raise DomainError(f"no numeric rows in {path}")
    arr = np.asarray(rows)
    d = arr.shape[1] - 1
    if d < 1:
        raise DomainError("kernel CSV needs at least one coordinate column")
    axes = [np.unique(arr[:, i]) for i in range(d)]
    if np.any(np.abs(arr[:, :d]) > 0.5 + 1e-12):
        nz = arr[:, d] != 0
        if np.any(np.abs(arr[nz, :d]) > 0.5 + 1e-12):
            raise DomainError("tabulated kernel must vanish outside [-1/2, 1/2]^d")
    grid = np.zeros([len(a) for a in axes])
    index = tuple(np.searchsorted(axes[i], arr[:, i]) for i in range(d))
    grid[index] = arr[:, d]
    interp = RegularGridInterpolator(tuple(axes), grid, bounds_error=False, fill_value=0.0)

    def func(x):
        x = np.asarray(x, dtype=float)
        return interp(x.reshape(-1, d)).reshape(x.shape[:-1])

    lip = 0.0
    for i in range(d):
        diff = np.abs(np.diff(grid, axis=i)) / np.diff(axes[i]).reshape(
            [-1 if j == i else 1 for j in range(d)])
        lip = max(lip, float(diff.max(initial=0.0)))
    lip *= math.sqrt(d)
    integral = float(np.trapezoid(grid, axes[0])) if d == 1 else float(
        np.sum(grid) * np.prod([np.mean(np.diff(a)) for a in axes]))
    k_inf = max(1.0, float(np.abs(grid).max()))
    k1 = min(1.0, abs(integral))
    return Kernel(Path(path).stem, func, d, lip, k_inf, k1, 0.5, {})


# --------------------------------------------------------------------------- densities

@dataclass(frozen=True, eq=False)
class Density:
    """Product density with identical compactly supported 1-d marginals."""

    name: str
    lower: float
    upper: float
    pdf1: Callable[[np.ndarray], np.ndarray]
    cdf1: Callable[[np.ndarray], np.ndarray]
    mom1: Callable[[np.ndarray], np.ndarray]  # x -> int_{-inf}^x t f(t) dt
    sup1: float
    sampler1: Callable[[np.random.Generator, int], np.ndarray]
    d: int = 1
    params: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def sup(self) -> float:
        return self.sup1 ** self.d

    @property
    def f_inf(self) -> float:
        return max(1.0, self.sup)

    def pdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.d == 1:
            return self.pdf1(x)
        out = self.pdf1(x[..., 0])
        for i in range(1, self.d):
            out = out * self.pdf1(x[..., i])
        return out

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if n < 1:
            raise DomainError("sample size must be >= 1")
        return np.stack([self.sampler1(rng, n) for _ in range(self.d)], axis=-1)

    def hat_masses1(self, step: float) -> tuple[np.ndarray, int]:
        """Masses int hat_k f of the 1-d marginal and the lattice index of the first node."""
        kmin = int(math.floor(self.lower / step)) - 1
        kmax = int(math.ceil(self.upper / step)) + 1
        k = np.arange(kmin, kmax + 1)
        x = k * step
        F, G = self.cdf1(x), self.mom1(x)
        xm, xp = x - step, x + step
        Fm, Gm, Fp, Gp = self.cdf1(xm), self.mom1(xm), self.cdf1(xp), self.mom1(xp)
        left = (G - Gm) - xm * (F - Fm)
        right = xp * (Fp - F) - (Gp - G)
        mass = np.clip((left + right) / step, 0.0, None)
        nz = np.flatnonzero(mass > 0)
        mass = mass[nz[0]:nz[-1] + 1]
        return mass / mass.sum(), kmin + int(nz[0])

    def tabulate(self, step: float) -> WeightFunction:
        """Hat-averaged density values on the lattice (masses / cell volume)."""
        key = round(step, 15)
        if key not in self._cache:
            m1, k0 = self.hat_masses1(step)
            vals = m1
            for _ in range(1, self.d):
                vals = np.multiply.outer(vals, m1)
            vals = vals / step ** self.d
            self._cache[key] = WeightFunction(vals, step, (-k0,) * self.d, self.name)
        return self._cache[key]

    def sqrt_norm(self, s: float, step: float) -> float:
        """||sqrt f||_s on the lattice."""
        tab = self.tabulate(step)
        return float((np.sum(tab.values ** (s / 2)) * tab.cell) ** (1.0 / s))


def uniform_density(lower: float = 0.0, upper: float = 1.0, d: int = 1) -> Density:
    if not upper > lower:
        raise DomainError("empty support")
    L = upper - lower

    def pdf(x):
        return np.where((x >= lower) & (x <= upper), 1.0 / L, 0.0)

    def cdf(x):
        return np.clip((x - lower) / L, 0.0, 1.0)

    def mom(x):
        c = np.clip(x, lower, upper)
        return (c * c - lower * lower) / (2 * L)

    def sampler(rng, n):
        return lower + L * rng.random(n)

    return Density("uniform", lower, upper, pdf, cdf, mom, 1.0 / L, sampler, d,
                   {"lower": lower, "upper": upper})


def histogram_density(edges: Sequence[float] = (0.0, 0.25, 0.5, 0.75, 1.0),
                      heights: Sequence[float] = (0.5, 1.5, 1.0, 1.0), d: int = 1) -> Density:
    e = np.asarray(edges, dtype=float)
    h = np.asarray(heights, dtype=float)
    if e.ndim != 1 or len(e) != len(h) + 1 or np.any(np.diff(e) <= 0) or np.any(h < 0):
        raise DomainError("histogram needs increasing edges and nonnegative heights")
    h = h / np.sum(h * np.diff(e))
    Fk = np.concatenate([[0.0], np.cumsum(h * np.diff(e))])
    Gk = np.concatenate([[0.0], np.cumsum(h * (e[1:] ** 2 - e[:-1] ** 2) / 2)])

    def pdf(x):
        j = np.searchsorted(e, x, side="right") - 1
        inside = (x >= e[0]) & (x < e[-1])
        return np.where(inside, h[np.clip(j, 0, len(h) - 1)], 0.0)

    def cdf(x):
        return np.interp(x, e, Fk)

    def mom(x):
        c = np.clip(x, e[0], e[-1])
        j = np.clip(np.searchsorted(e, c, side="right") - 1, 0, len(h) - 1)
        return Gk[j] + h[j] * (c * c - e[j] ** 2) / 2

    def sampler(rng, n):
        return np.interp(rng.random(n), Fk, e)

    return Density("histogram", float(e[0]), float(e[-1]), pdf, cdf, mom, float(h.max()), sampler, d,
                   {"edges": e.tolist(), "heights": h.tolist()})


def trunc_gauss_mix_density(weights: Sequence[float] = (0.5, 0.5), means: Sequence[float] = (0.3, 0.7),
                            sds: Sequence[float] = (0.1, 0.15), lower: float = 0.0, upper: float = 1.0,
                            d: int = 1) -> Density:
    w = np.asarray(weights, float)
    m = np.asarray(means, float)
    sd = np.asarray(sds, float)
    if not (w.shape == m.shape == sd.shape) or np.any(w < 0) or np.any(sd <= 0):
        raise DomainError("mixture needs matching nonnegative weights and positive sds")
    za, zb = (lower - m) / sd, (upper - m) / sd
    comp_mass = stats.norm.cdf(zb) - stats.norm.cdf(za)
    Z = float(np.sum(w * comp_mass))
    probs = w * comp_mass / Z

    def pdf(x):
        x = np.asarray(x, float)
        val = np.sum(w * stats.norm.pdf((x[..., None] - m) / sd) / sd, axis=-1) / Z
        return np.where((x >= lower) & (x <= upper), val, 0.0)

    def cdf(x):
        c = np.clip(np.asarray(x, float), lower, upper)
        z = (c[..., None] - m) / sd
        return np.sum(w * (stats.norm.cdf(z) - stats.norm.cdf(za)), axis=-1) / Z

    def mom(x):
        c = np.clip(np.asarray(x, float), lower, upper)
        z = (c[..., None] - m) / sd
        part = m * (stats.norm.cdf(z) - stats.norm.cdf(za)) - sd * (stats.norm.pdf(z) - stats.norm.pdf(za))
        return np.sum(w * part, axis=-1) / Z

    grid = np.linspace(lower, upper, 20001)
    lip = float(np.sum(w / sd ** 2) * stats.norm.pdf(1.0) / Z)
    sup = float(pdf(grid).max()) + lip * (grid[1] - grid[0]) / 2

    def sampler(rng, n):
        comp = np.searchsorted(np.cumsum(probs), rng.random(n), side="right")
        comp = np.minimum(comp, len(probs) - 1)
        u = rng.random(n)
        a, b = stats.norm.cdf(za[comp]), stats.norm.cdf(zb[comp])
        return np.clip(m[comp] + sd[comp] * stats.norm.ppf(a + u * (b - a)), lower, upper)

    return Density("trunc-gauss-mix", lower, upper, pdf, cdf, mom, sup, sampler, d,
                   {"weights": w.tolist(), "means": m.tolist(), "sds": sd.tolist(),
                    "lower": lower, "upper": upper})


DENSITY_NAMES = ("uniform", "trunc-gauss-mix", "histogram")


def make_density(name: str, d: int = 1, **params) -> Density:
    if name == "uniform":
        return uniform_density(params.get("lower", 0.0), params.get("upper", 1.0), d)
    if name == "histogram":
        return histogram_density(params.get("edges", (0.0, 0.25, 0.5, 0.75, 1.0)),
                                 params.get("heights", (0.5, 1.5, 1.0, 1.0)), d)
    if name == "trunc-gauss-mix":
        keys = ("weights", "means", "sds", "lower", "upper")
        return trunc_gauss_mix_density(**{k: params[k] for k in keys if k in params}, d=d)
    raise DomainError(f"unknown density {name!r}")


# --------------------------------------------------------------------------- functionals

def _inner_f(w: WeightFunction, f: Density, p: float) -> WeightFunction:
    """t -> int |w(t - x)|^p f(x) dx on the lattice."""
    tab = f.tabulate(w.step)
    out = w.abs_pow(p).convolve(tab)
    return out.with_values(np.clip(out.values, 0.0, None))


def m_p(w: WeightFunction, p: float, f: Density | None = None) -> float:
    """M_p(w) = ||w||_p, or M_{p,tau,nu'}(w) when a design density is given."""
    if p < 1:
        raise DomainError("p must be >= 1")
    base = w.norm(p)
    if f is None or math.isinf(p):
        return base
    inner = _inner_f(w, f, p).sup ** (1.0 / p)
    return max(base, inner)


def sigma_s(w: WeightFunction, f: Density, s: float) -> float:
    """[int (int w^2(t - x) f(x) dx)^{s/2} dt]^{1/s}."""
    if s < 1:
        raise DomainError("s must be >= 1")
    inner = _inner_f(w, f, 2.0)
    edge = np.concatenate([inner.values.reshape(-1)[:1], inner.values.reshape(-1)[-1:]])
    if np.any(edge > 1e-12 * max(inner.sup, 1e-300)):
        raise GridError("outer integrand does not vanish at the grid edge")
    return float((np.sum(inner.values ** (s / 2)) * inner.cell) ** (1.0 / s))


@dataclass(frozen=True)
class W2Check:
    passed: bool
    ratio: float


def verify_W2(w: WeightFunction, alpha1: float, alpha2: float) -> W2Check:
    """Level-set condition mes{|w| >= alpha1 ||w||_inf} >= alpha2 mes{supp w}."""
    if not 0 < alpha1 < 1 or not 0 < alpha2 <= 1:
        raise DomainError("alpha1 in (0,1) and alpha2 in (0,1] required")
    top = w.sup
    if top == 0:
        raise DomainError("degenerate weight: ||w||_inf = 0")
    ratio = w.level_set_measure(alpha1 * top) / w.support_measure
    return W2Check(ratio >= alpha2, ratio)


@dataclass(frozen=True)
class YoungCheck:
    passed: bool
    lhs: float
    rhs: float


def young_check(K: WeightFunction, Q: WeightFunction, p: float) -> YoungCheck:
    """||K * Q||_p <= ||K||_1 ||Q||_p."""
    lhs = K.convolve(Q).norm(p)
    rhs = K.norm(1) * Q.norm(p)
    return YoungCheck(lhs <= rhs * (1 + 1e-9) + 1e-300, lhs, rhs)


def centered_norm(w: WeightFunction, f: Density, p: float) -> float:
    """M_{p,tau,nu'} of the centered weight w(t - x) - E w(t - X), x ranging over supp f (d = 1)."""
    if w.d != 1:
        raise DomainError("centered weights are tabulated in dimension one only")
    tab = f.tabulate(w.step)
    mean = w.convolve(tab)  # t -> E w(t - X)
    xk = tab.coords(0)
    fm = tab.values * tab.cell
    tk = mean.coords(0)
    # w(t_j - x_k) by index arithmetic on the shared lattice
    ti = np.arange(len(tk)) - mean.origin[0]
    xi = np.arange(len(xk)) - tab.origin[0]
    idx = ti[:, None] - xi[None, :] + w.origin[0]
    inside = (idx >= 0) & (idx < len(w.values))
    W = np.where(inside, w.values[np.clip(idx, 0, len(w.values) - 1)], 0.0)
    Wbar = np.abs(W - mean.values[:, None])
    if math.isinf(p):
        return float(Wbar.max())
    x_part = (np.sum(Wbar ** p, axis=0) * w.step) ** (1 / p)
    t_part = (np.sum(Wbar ** p * fm[None, :], axis=1)) ** (1 / p)
    return float(max(x_part.max(), t_part.max()))


def interpolation_sides(w: WeightFunction, n: int, alpha1: float, alpha2: float, mu: float,
                        p: float, q: float) -> tuple[float, float]:
    """Both sides of n^{1/q} M_q <= alpha1^-1 alpha2^{-1/p} mu^{1/q - 1/p} n^{1/p} M_p."""
    if not 1 <= p < q:
        raise DomainError("need 1 <= p < q")
    inv_q = 0.0 if math.isinf(q) else 1.0 / q
    lhs = n ** inv_q * w.norm(q)
    rhs = alpha2 ** (-1.0 / p) / alpha1 * mu ** (inv_q - 1.0 / p) * n ** (1.0 / p) * w.norm(p)
    return lhs, rhs


# --------------------------------------------------------------------------- classes

@dataclass(frozen=True, eq=False)
class WeightClass:
    """Finite class of difference weights indexed by a parameter space."""

    weights: tuple[WeightFunction, ...]
    space: FiniteSpace
    n: int
    alpha1: float = 0.5
    beta: float = 0.5
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.weights:
            raise DomainError("empty weight class")
        if len(self.space) != len(self.weights):
            raise DomainError("one parameter per weight required")

    def __len__(self) -> int:
        return len(self.weights)

    @cached_property
    def mu_star(self) -> float:
        return max(w.support_measure for w in self.weights)

    @cached_property
    def mu(self) -> float:
        return self.n * min(w.support_measure for w in self.weights)

    @cached_property
    def alpha2(self) -> float:
        return min(verify_W2(w, self.alpha1, 1.0).ratio for w in self.weights)

    @property
    def alpha_star(self) -> float:
        return 1.0 / (self.alpha1 * math.sqrt(self.alpha2))

    def norms(self, p: float) -> np.ndarray:
        key = ("norm", p)
        if key not in self._cache:
            self._cache[key] = np.array([w.norm(p) for w in self.weights])
        return self._cache[key]

    def w_bar(self, p: float) -> float:
        inv = 0.0 if math.isinf(p) else 1.0 / p
        return float(self.n ** inv * self.norms(p).max())

    def w_under(self, p: float) -> float:
        inv = 0.0 if math.isinf(p) else 1.0 / p
        return float(self.n ** inv * self.norms(p).min())

    def C_Z(self, beta: float | None = None, deltas: Sequence[float] | None = None) -> float:
        """sup over a delta grid in (0,1) of ln N(delta) - delta^-beta."""
        beta = self.beta if beta is None else beta
        deltas = np.geomspace(1e-4, 1.0, 200) if deltas is None else deltas
        return float(max(math.log(self.space.covering_number(dl)) - dl ** (-beta) for dl in deltas))

    def check_assumptions(self) -> dict:
        return {
            "W1_mu_star": self.mu_star,
            "W2_alpha2": self.alpha2,
            "W3_mu": self.mu,
            "W3_holds": self.mu >= 1,
            "W4_C_Z": self.C_Z(),
        }
