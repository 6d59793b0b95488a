"""Seeded sampling, linear binning and process paths."""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lsbound.errors import DomainError
from lsbound.sampling import Window, bin_sample, lattice_norms, rng_for, simulate_xi, spot_check, xi_path
from lsbound.weights import make_density, make_kernel


@pytest.fixture(scope="module")
def tri_w():
    return make_kernel("triangle").tabulate(0.1 / 32, 0.1, 1)


def test_rng_determinism():
    a = rng_for(7, 3).uniform(size=5)
    b = rng_for(7, 3).uniform(size=5)
    c = rng_for(7, 4).uniform(size=5)
    assert np.array_equal(a, b) and not np.array_equal(a, c)


def test_rng_negative():
    with pytest.raises(DomainError):
        rng_for(-1)


@given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=50))
def test_binning_preserves_mass_and_mean(xs):
    X = np.array(xs)
    c = bin_sample(X, 0.01)
    assert c.values.sum() == pytest.approx(len(xs))
    assert (c.values * c.coords(0)).sum() == pytest.approx(X.sum(), abs=1e-9)


def test_single_sample_path(tri_w, uniform):
    real = simulate_xi(tri_w, uniform, 1, rng_for(1))
    assert spot_check(real, tri_w, uniform, frac=0.2) < 1e-12


def test_same_seed_identical(tri_w, uniform):
    a = simulate_xi(tri_w, uniform, 50, rng_for(11, 2)).path.values
    b = simulate_xi(tri_w, uniform, 50, rng_for(11, 2)).path.values
    assert np.array_equal(a, b)


def test_centering(tri_w, uniform):
    win = Window.for_density(uniform, tri_w.step)
    X = uniform.sample(rng_for(3), 10 ** 4 * 5).reshape(10 ** 4, 5)
    rows, _ = win.paths(win.bin(X), tri_w)
    rows = rows - win.mean_row(tri_w, uniform, 5)[None, :]
    col = rows.shape[1] // 2
    v = rows[:, col]
    assert abs(v.mean()) <= 4 * v.std(ddof=1) / math.sqrt(len(v))


def test_window_matches_direct(tri_w):
    f = make_density("trunc-gauss-mix")
    X = f.sample(rng_for(5), 40)
    win = Window.for_density(f, tri_w.step)
    rows, k0 = win.paths(win.bin(X[None, :, 0]), tri_w)
    rows = rows - win.mean_row(tri_w, f, 40)[None, :]
    direct = xi_path(tri_w, X, f)
    for s in (1.5, 2.0, 3.0):
        assert lattice_norms(rows, tri_w.step, s)[0] == pytest.approx(direct.norm(s), rel=1e-9)


def test_deterministic_ceiling(tri_w, uniform):
    n = 30
    w = make_kernel("triangle").tabulate(0.1 / 32, 0.1, n)
    for i in range(20):
        p = simulate_xi(w, uniform, n, rng_for(9, i)).path
        assert p.norm(3.0) <= 2 * n * w.norm(3.0)
