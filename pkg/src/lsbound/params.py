"""Parameter spaces: distances, covering numbers, entropy and slicing.

A parameter space here is always enumerable (a finite dictionary) or the
continuous bandwidth box, whose covering numbers under the log-ratio
distance have a closed form.  Finite coverings use centers taken from the
set itself, which can only overstate the covering number.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Sequence

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

from .errors import DomainError, UnsupportedSpaceError

EXACT_COVER_LIMIT = 64
_REL = 1e-12


@dataclass(frozen=True)
class Metric:
    eval: Callable[[Any, Any], float]
    name: str = "metric"

    def __call__(self, a, b) -> float:
        return float(self.eval(a, b))

    def scaled(self, factor: float) -> "Metric":
        if factor <= 0:
            raise DomainError("metric scale must be positive")
        base = self.eval
        return Metric(lambda a, b: factor * base(a, b), f"{factor:g}*{self.name}")


def _as_bandwidth(h) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(h, dtype=float))
    if arr.ndim != 1 or not np.all(arr > 0) or not np.all(np.isfinite(arr)):
        raise DomainError(f"bandwidth coordinates must be positive and finite, got {h!r}")
    return arr


def _coords(h) -> tuple[float, ...]:
    vals = tuple(float(v) for v in np.atleast_1d(h)) if not isinstance(h, tuple) else tuple(map(float, h))
    if not vals or not all(0 < v < math.inf for v in vals):
        raise DomainError(f"bandwidth coordinates must be positive and finite, got {h!r}")
    return vals


def delta_H(h, h2) -> float:
    """max_i ln((h_i v h'_i)/(h_i ^ h'_i)), computed as a difference of logs."""
    a, b = _coords(h), _coords(h2)
    if len(a) != len(b):
        raise DomainError("bandwidths of different dimension")
    return max(abs(math.log(x) - math.log(y)) for x, y in zip(a, b))


DELTA_H = Metric(delta_H, "Delta_H")


@dataclass(frozen=True)
class BandwidthSet:
    """Product box of bandwidths, h_min_i <= h_i <= h_max_i <= 1."""

    h_min: tuple[float, ...]
    h_max: tuple[float, ...]

    def __post_init__(self):
        lo, hi = _as_bandwidth(self.h_min), _as_bandwidth(self.h_max)
        if lo.shape != hi.shape:
            raise DomainError("h_min and h_max differ in dimension")
        if np.any(lo > hi) or np.any(hi > 1.0):
            raise DomainError("need 0 < h_min <= h_max <= 1 coordinatewise")
        object.__setattr__(self, "h_min", tuple(float(v) for v in lo))
        object.__setattr__(self, "h_max", tuple(float(v) for v in hi))

    @property
    def d(self) -> int:
        return len(self.h_min)

    @property
    def metric(self) -> Metric:
        return DELTA_H

    @property
    def log_lengths(self) -> np.ndarray:
        return np.log(np.asarray(self.h_max)) - np.log(np.asarray(self.h_min))

    def contains(self, h) -> bool:
        a = _as_bandwidth(h)
        return bool(np.all(a >= np.asarray(self.h_min) * (1 - _REL))
                    and np.all(a <= np.asarray(self.h_max) * (1 + _REL)))

    def covering_number(self, delta: float) -> int:
        # log-scale interval of length l needs ceil(l / 2delta) balls; the sup-metric
        # product of boxes is covered exactly by the product grid
        if not delta > 0:
            raise DomainError("covering radius must be positive")
        counts = [max(1, math.ceil(l / (2.0 * delta) - 1e-9)) for l in self.log_lengths]
        return int(np.prod(counts))

    def grid(self, counts: int | Sequence[int]) -> list[tuple[float, ...]]:
        """Geometric grid, equally spaced in log scale in every coordinate."""
        if isinstance(counts, (int, np.integer)):
            counts = [int(counts)] * self.d
        axes = []
        for lo, hi, m in zip(self.h_min, self.h_max, counts):
            if m < 1:
                raise DomainError("grid counts must be >= 1")
            axes.append(np.array([lo]) if m == 1 or lo == hi else np.geomspace(lo, hi, m))
        mesh = np.meshgrid(*axes, indexing="ij")
        return [tuple(float(v) for v in pt) for pt in np.stack([m.ravel() for m in mesh], 1)]

    def to_dict(self) -> dict:
        return {"h_min": list(self.h_min), "h_max": list(self.h_max)}


def entropy_bound_H(bw: BandwidthSet, delta: float) -> float:
    """d ln(3/delta) + sum_i (ln ln[h_max_i/h_min_i])_+."""
    if not 0 < delta <= 1:
        raise DomainError("delta must lie in (0, 1]")
    extra = 0.0
    for l in bw.log_lengths:
        if l > 1.0:
            extra += math.log(l)
    return bw.d * math.log(3.0 / delta) + extra


@dataclass(frozen=True)
class Covering:
    count: int
    centers: tuple[int, ...]
    lower: int
    exact: bool


def _greedy_packing(D: np.ndarray, sep: float) -> int:
    """Size of a greedily built set with pairwise distances > sep."""
    chosen: list[int] = []
    for i in range(len(D)):
        if all(D[i, j] > sep for j in chosen):
            chosen.append(i)
    return len(chosen)


def _greedy_cover(adj: np.ndarray) -> list[int]:
    uncovered = np.ones(adj.shape[0], dtype=bool)
    centers: list[int] = []
    while uncovered.any():
        gain = adj[:, uncovered].sum(axis=1)
        j = int(np.argmax(gain))
        centers.append(j)
        uncovered &= ~adj[j]
    return centers


def _exact_cover(adj: np.ndarray) -> list[int]:
    m = adj.shape[0]
    res = milp(c=np.ones(m), constraints=LinearConstraint(adj.T.astype(float), lb=1.0),
               integrality=np.ones(m), bounds=Bounds(0, 1))
    if not res.success:  # pragma: no cover - HiGHS solves these tiny problems
        raise RuntimeError(f"set-cover solver failed: {res.message}")
    return [int(j) for j in np.flatnonzero(res.x > 0.5)]


def cover_matrix(D: np.ndarray, delta: float) -> Covering:
    """Minimal internal covering of a finite metric space given by its distance matrix."""
    if not delta > 0:
        raise DomainError("covering radius must be positive")
    m = len(D)
    if m == 0:
        raise DomainError("empty space")
    tol = delta * (1 + 1e-12)
    adj = D <= tol  # adj[j, i]: ball at j covers i
    lower = _greedy_packing(D, 2 * tol)
    if lower == m:
        return Covering(m, tuple(range(m)), lower, True)
    greedy = _greedy_cover(adj)
    if len(greedy) == lower:
        return Covering(lower, tuple(greedy), lower, True)
    if m <= EXACT_COVER_LIMIT:
        best = _exact_cover(adj)
        return Covering(len(best), tuple(best), lower, True)
    return Covering(len(greedy), tuple(greedy), lower, False)


@dataclass(frozen=True, eq=False)
class FiniteSpace:
    """Finite parameter set with a precomputed distance matrix."""

    dist: np.ndarray
    labels: tuple[str, ...] = ()
    name: str = "finite"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        D = np.asarray(self.dist, dtype=float)
        if D.ndim != 2 or D.shape[0] != D.shape[1]:
            raise DomainError("distance matrix must be square")
        D = D.copy()
        D.setflags(write=False)
        object.__setattr__(self, "dist", D)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(len(D))))

    @classmethod
    def from_points(cls, points: Sequence, metric: Metric, labels: Sequence[str] = (), name="finite"):
        m = len(points)
        D = np.zeros((m, m))
        for i in range(m):
            for j in range(i + 1, m):
                D[i, j] = D[j, i] = metric(points[i], points[j])
        return cls(D, tuple(labels), name)

    def __len__(self) -> int:
        return self.dist.shape[0]

    @property
    def size(self) -> int:
        return len(self)

    def scaled(self, factor: float) -> "FiniteSpace":
        if factor <= 0:
            raise DomainError("metric scale must be positive")
        return FiniteSpace(self.dist * factor, self.labels, f"{factor:g}*{self.name}")

    def subset(self, idx: Sequence[int]) -> "FiniteSpace":
        idx = list(idx)
        if not idx:
            raise DomainError("empty subset")
        return FiniteSpace(self.dist[np.ix_(idx, idx)], tuple(self.labels[i] for i in idx), self.name)

    @cached_property
    def min_separation(self) -> float:
        if len(self) < 2:
            return math.inf
        off = self.dist[~np.eye(len(self), dtype=bool)]
        return float(off.min())

    def covering(self, delta: float) -> Covering:
        key = float(delta)
        if key not in self._cache:
            if delta > 0 and delta * (1 + 1e-12) < self.min_separation:
                m = len(self)
                self._cache[key] = Covering(m, tuple(range(m)), m, True)
            else:
                self._cache[key] = cover_matrix(self.dist, delta)
        return self._cache[key]

    def covering_number(self, delta: float) -> int:
        return self.covering(delta).count


@dataclass(frozen=True, eq=False)
class ProductSpace:
    """Kernel dictionary x bandwidth box with d = theta * max(||K - K'||_inf, Delta_H).

    Covering numbers are products of per-factor coverings, an upper bound on the
    optimal covering of the product.
    """

    kernels: FiniteSpace
    bandwidths: BandwidthSet
    theta: float = 1.0
    copies: int = 1  # 2 for the convolution parameter pairs

    def covering_number(self, delta: float) -> int:
        if not delta > 0:
            raise DomainError("covering radius must be positive")
        r = delta / self.theta
        return (self.kernels.covering_number(r) * self.bandwidths.covering_number(r)) ** self.copies


def covering_number(space, delta: float) -> int:
    if not delta > 0:
        raise DomainError("covering radius must be positive")
    if hasattr(space, "covering_number"):
        return int(space.covering_number(delta))
    raise UnsupportedSpaceError(f"no covering rule for {type(space).__name__}")


@dataclass(frozen=True)
class SliceDecomposition:
    """Peeling shells: member i sits in slice j iff a_j 2^-eps <= U_i < a_j."""

    r: float
    R: float
    eps: float
    levels: tuple[float, ...]
    members: tuple[tuple[int, ...], ...]
    U: tuple[float, ...]

    @property
    def count(self) -> int:
        return len(self.levels)

    def slice_of(self, i: int) -> int:
        for j, mem in enumerate(self.members):
            if i in mem:
                return j
        raise DomainError(f"parameter {i} not in any slice")

    def shell(self, j: int) -> tuple[int, ...]:
        """Closed shell {a/2 <= U <= a} at the level of slice j (a superset of the slice)."""
        a = self.levels[j]
        U = np.asarray(self.U)
        return tuple(int(i) for i in np.flatnonzero((U >= a / 2 * (1 - _REL)) & (U <= a * (1 + _REL))))

    def nonempty(self) -> list[int]:
        return [j for j, m in enumerate(self.members) if m]


def build_slices(U_values: Sequence[float], eps: float = 1.0, space=None) -> SliceDecomposition:
    U = np.asarray(U_values, dtype=float)
    if U.size == 0:
        raise DomainError("empty space")
    if space is not None and len(space) != U.size:
        raise DomainError("one U value per parameter required")
    if not np.all(U > 0) or not np.all(np.isfinite(U)):
        raise DomainError("U values must be positive and finite")
    if not 0 < eps <= 1:
        raise DomainError("eps must lie in (0, 1]")
    r, R = float(U.min()), float(U.max())
    ratio = math.log2(R / r) / eps
    count = int(math.floor(ratio + 1e-12)) + 1
    levels = tuple(r * 2.0 ** (eps * (j + 1)) for j in range(count))
    idx = np.floor(np.log2(U / r) / eps + 1e-12).astype(int)
    idx = np.clip(idx, 0, count - 1)
    members = tuple(tuple(int(i) for i in np.flatnonzero(idx == j)) for j in range(count))
    return SliceDecomposition(r, R, float(eps), levels, members, tuple(float(u) for u in U))


@dataclass(frozen=True)
class SpaceSpec:
    """JSON description of a kernel-dictionary x bandwidth-grid parameter space."""

    kernels: tuple[dict, ...]
    h_min: tuple[float, ...]
    h_max: tuple[float, ...]
    counts: tuple[int, ...]
    theta: float = 1.0

    @property
    def bandwidths(self) -> BandwidthSet:
        return BandwidthSet(self.h_min, self.h_max)

    def to_json(self) -> str:
        return json.dumps({"kernels": list(self.kernels), "h_min": list(self.h_min),
                           "h_max": list(self.h_max), "counts": list(self.counts),
                           "theta": self.theta}, indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, obj: dict) -> "SpaceSpec":
        kernels = tuple(k if isinstance(k, dict) else {"name": k} for k in obj.get("kernels", []))
        h_min = tuple(float(v) for v in np.atleast_1d(obj["h_min"]))
        h_max = tuple(float(v) for v in np.atleast_1d(obj.get("h_max", obj["h_min"])))
        counts = obj.get("counts", 1)
        counts = tuple(int(c) for c in np.atleast_1d(counts))
        if len(counts) == 1 and len(h_min) > 1:
            counts = counts * len(h_min)
        return cls(kernels, h_min, h_max, counts, float(obj.get("theta", 1.0)))

    @classmethod
    def from_json(cls, text: str) -> "SpaceSpec":
        return cls.from_dict(json.loads(text))
