"""Seeded samples, linear binning and process paths on the weight lattice.

A sample point X between lattice nodes k and k+1 is split between them in
proportion to its position (linear binning), so sum_i w(t - X_i) becomes the
piecewise-linear interpolant of w evaluated at t - X_i.  The expected binned
mass at node k is the hat-function mass used by Density.tabulate, hence the
simulated process is exactly centered on the lattice.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from .errors import DomainError, GridError
from .weights import Density, WeightFunction


def rng_for(seed: int, index: int = 0) -> np.random.Generator:
    """Counter-based stream keyed by (seed, index); no sequential dependence."""
    if seed < 0 or index < 0:
        raise DomainError("seed and index must be nonnegative")
    return np.random.Generator(np.random.Philox(key=int(seed) * 2 ** 64 + int(index)))


def bin_sample(X: np.ndarray, step: float) -> WeightFunction:
    """Linear binning of an (n, d) sample into node counts (total mass n)."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n, d = X.shape
    if n == 0:
        raise DomainError("empty sample")
    pos = X / step
    k = np.floor(pos).astype(np.int64)
    frac = pos - k
    lo = k.min(axis=0)
    shape = tuple(int(v) for v in (k.max(axis=0) - lo + 2))
    out = np.zeros(shape)
    for corner in range(2 ** d):
        bits = [(corner >> a) & 1 for a in range(d)]
        wt = np.ones(n)
        idx = []
        for a, b in enumerate(bits):
            wt = wt * (frac[:, a] if b else 1.0 - frac[:, a])
            idx.append(k[:, a] - lo[a] + b)
        np.add.at(out, tuple(idx), wt)
    return WeightFunction(out, step, tuple(int(-v) for v in lo), "counts")


def interp_weight(w: WeightFunction, u: np.ndarray) -> np.ndarray:
    """Piecewise-linear interpolant of a 1-d lattice weight at points u."""
    if w.d != 1:
        raise DomainError("interpolation is implemented in dimension one")
    return np.interp(u, w.coords(0), w.values, left=0.0, right=0.0)


@dataclass(frozen=True, eq=False)
class ProcessRealization:
    """One path of xi_w (eps is None) or eta_w on the lattice."""

    X: np.ndarray
    eps: np.ndarray | None
    path: WeightFunction
    norms: dict = field(default_factory=dict)

    def norm(self, s: float) -> float:
        if s not in self.norms:
            self.norms[s] = self.path.norm(s)
        return self.norms[s]


def mean_path(w: WeightFunction, f: Density, n: int) -> WeightFunction:
    """t -> n E w(t - X) on the lattice."""
    return w.convolve(f.tabulate(w.step)).scale(float(n))


def xi_path(w: WeightFunction, X: np.ndarray, f: Density, mean: WeightFunction | None = None
            ) -> WeightFunction:
    counts = bin_sample(X, w.step)
    raw = WeightFunction(fftconvolve(counts.values, w.values), w.step,
                         tuple(a + b for a, b in zip(counts.origin, w.origin)))
    mean = mean_path(w, f, len(X)) if mean is None else mean
    return raw - mean


def eta_path(w: WeightFunction, X: np.ndarray, eps: np.ndarray) -> WeightFunction:
    """sum_i w(t - X_i) eps_i, with eps carried through the binning weights."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if w.d != 1 or X.shape[1] != 1:
        raise DomainError("regression paths are implemented in dimension one")
    pos = X[:, 0] / w.step
    k = np.floor(pos).astype(np.int64)
    frac = pos - k
    lo = int(k.min())
    out = np.zeros(int(k.max()) - lo + 2)
    np.add.at(out, k - lo, (1.0 - frac) * eps)
    np.add.at(out, k - lo + 1, frac * eps)
    vals = fftconvolve(out, w.values)
    return WeightFunction(vals, w.step, (w.origin[0] - lo,), "eta")


def simulate_xi(w: WeightFunction, f: Density, n: int, rng: np.random.Generator,
                mean: WeightFunction | None = None) -> ProcessRealization:
    X = f.sample(rng, n)
    return ProcessRealization(X, None, xi_path(w, X, f, mean))


def spot_check(real: ProcessRealization, w: WeightFunction, f: Density, frac: float = 0.01,
               rng: np.random.Generator | None = None) -> float:
    """Max abs error of the lattice path against direct summation on a fraction of nodes (d = 1)."""
    path = real.path
    rng = np.random.default_rng(0) if rng is None else rng
    m = max(1, int(math.ceil(frac * len(path.values))))
    nodes = rng.choice(len(path.values), size=m, replace=False)
    t = path.coords(0)[nodes]
    X = real.X[:, 0]
    eps = np.ones(len(X)) if real.eps is None else real.eps
    direct = np.array([np.sum(interp_weight(w, ti - X) * eps) for ti in t])
    if real.eps is None:
        mean = mean_path(w, f, len(X))
        direct = direct - np.interp(t, mean.coords(0), mean.values, left=0.0, right=0.0)
    return float(np.max(np.abs(direct - path.values[nodes])))


# ---------------------------------------------------------------- batched 1-d engine

@dataclass(frozen=True, eq=False)
class Window:
    """Fixed 1-d node window [k0, k0 + size) holding every binned sample."""

    k0: int
    size: int
    step: float

    @classmethod
    def for_density(cls, f: Density, step: float) -> "Window":
        if f.d != 1:
            raise DomainError("batched engine is one-dimensional")
        k0 = int(math.floor(f.lower / step))
        k1 = int(math.floor(f.upper / step)) + 1
        return cls(k0, k1 - k0 + 1, step)

    def bin(self, X: np.ndarray, weights: np.ndarray | None = None) -> np.ndarray:
        """Rows of binned counts for an (R, n) sample array."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        R, n = X.shape
        pos = X / self.step
        k = np.floor(pos).astype(np.int64)
        frac = pos - k
        k = k - self.k0
        if k.min() < 0 or k.max() + 1 >= self.size:
            raise GridError("sample falls outside the binning window")
        wt = np.ones_like(frac) if weights is None else np.asarray(weights, dtype=float)
        rows = np.repeat(np.arange(R), n).reshape(R, n) * self.size
        out = np.bincount((rows + k).ravel(), ((1.0 - frac) * wt).ravel(), R * self.size)
        out += np.bincount((rows + k + 1).ravel(), (frac * wt).ravel(), R * self.size)
        return out.reshape(R, self.size)

    def paths(self, counts: np.ndarray, w: WeightFunction) -> tuple[np.ndarray, int]:
        """Rows of sum_k counts_k w(t - x_k) and the lattice index of the first column."""
        vals = fftconvolve(counts, w.values[None, :], axes=1)
        return vals, self.k0 - w.origin[0]

    def mean_row(self, w: WeightFunction, f: Density, n: int) -> np.ndarray:
        """n E w(t - X) on the same columns as `paths`."""
        m1, kf = f.hat_masses1(self.step)
        counts = np.zeros(self.size)
        lo = kf - self.k0
        if lo < 0 or lo + len(m1) > self.size:
            raise GridError("density support exceeds the binning window")
        counts[lo:lo + len(m1)] = m1 * n
        return np.convolve(counts, w.values)


def lattice_norms(rows: np.ndarray, step: float, s: float) -> np.ndarray:
    a = np.abs(rows)
    if math.isinf(s):
        return a.max(axis=1)
    return (np.sum(a ** s, axis=1) * step) ** (1.0 / s)
