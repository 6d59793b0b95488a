"""Regression-type process: noise presets, tail functions, fixed and uniform bounds."""
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lsbound import kde as K
from lsbound import regression as RG
from lsbound.empirical import c1
from lsbound.errors import DomainError, PreconditionError
from lsbound.sampling import eta_path, rng_for
from lsbound.weights import m_p, make_kernel

LN2 = math.log(2.0)


class TestTailFunctions:
    def test_g_at_zero(self):
        assert RG.g_alpha_b(0.0, 1.3, 0.7, 3.0) == 1.0

    def test_g_s_ge_2(self):
        assert RG.g_alpha_b(4.0, 1.0, 1.0, 2.0) == pytest.approx(math.exp(-2), abs=1e-15)

    def test_g_s_lt_2(self):
        # exponent alpha/(2+alpha) = 1/2, so exp{-min(8, sqrt 8)}
        assert RG.g_alpha_b(8.0, 2.0, 1.0, 1.5) == pytest.approx(math.exp(-2 * math.sqrt(2)), abs=1e-15)
        assert RG.g_alpha_b(8.0, 2.0, 1.0, 1.5) == pytest.approx(0.0591057, abs=1e-7)

    @given(st.floats(0, 50), st.floats(0, 50), st.floats(0.5, 3), st.floats(0.1, 3))
    def test_g_decreasing(self, x, y, a, b):
        lo, hi = min(x, y), max(x, y)
        assert RG.g_alpha_b(hi, a, b, 3.0) <= RG.g_alpha_b(lo, a, b, 3.0)

    def test_G2(self):
        assert RG.G2(4.0, 4.0, 1.0, 1, 2.0) == pytest.approx(2 * LN2 ** 4, abs=1e-12)
        assert RG.G2(4.0, 4.0, 1.0, 1, 1.5) == pytest.approx(2 * LN2 ** 2, abs=1e-12)
        assert RG.G2(1e12, 4.0, 1.0, 1, 2.0) < 1e-30

    def test_G2_domain(self):
        with pytest.raises(DomainError):
            RG.G2(1.0, 2.0, 1.0, 1, 3.0)

    def test_G1_small_z(self):
        noise = RG.make_noise("gaussian")
        assert RG.G1(0.0, noise, 200, 3.0) == pytest.approx(1 + 200 * noise.v)


class TestNoise:
    @pytest.mark.parametrize("name", ["gaussian", "laplace", "uniform"])
    def test_unit_variance_and_tail(self, name):
        noise = RG.make_noise(name)
        assert noise.sigma == pytest.approx(1.0, rel=1e-9)
        assert RG.check_noise(noise, seed=1)["ok"]

    def test_student_moment(self):
        noise = RG.make_noise("student-t")
        assert noise.kind == "E2" and noise.p == 4.0
        assert RG.check_noise(noise, seed=2)["ok"]

    def test_symmetric(self):
        e = RG.make_noise("laplace").sample(rng_for(0), 10 ** 5)
        assert abs(e.mean()) < 4 * e.std() / math.sqrt(e.size)

    def test_unknown(self):
        with pytest.raises(DomainError):
            RG.make_noise("cauchy")

    def test_moment_cache(self, tmp_path):
        cache = RG.MomentCache(tmp_path / "m.json")
        noise = RG.make_noise("gaussian")
        a = cache.get(noise, 3.0, 0, size=10 ** 4)
        assert RG.MomentCache(tmp_path / "m.json").get(noise, 3.0, 0, size=10 ** 4) == a


class TestFixedWeight:
    def test_rho_s2(self, box_w, uniform):
        prm = RG.regression_params(box_w, uniform, RG.make_noise("gaussian"), 2.0, 100)
        assert prm.rho_s == pytest.approx(10 * m_p(box_w, 2.0), rel=1e-12)
        assert prm.rho_s == pytest.approx(0.316228, rel=1e-3)

    def test_tail_decreasing(self, uniform):
        w = make_kernel("box").tabulate(0.1 / 64, 0.1, 200)
        _, t = RG.theorem8_tail(w, uniform, RG.make_noise("laplace"), 3.0, 200, np.linspace(0.5, 50, 30))
        assert np.all(np.diff(t) <= 0)

    def test_pathwise_eta(self, uniform):
        n = 100
        w = make_kernel("box").tabulate(0.1 / 64, 0.1, n)
        noise = RG.make_noise("laplace")
        for i in range(10):
            rng = rng_for(8, i)
            X, e = uniform.sample(rng, n), noise.sample(rng, n)
            for s in (1.5, 3.0):
                assert eta_path(w, X, e).norm(s) <= m_p(w, s) * np.abs(e).sum() * (1 + 1e-12)


class TestUniform:
    def test_c_n(self):
        assert RG.c_n(3.0, 2.0, 1000) == pytest.approx(4 / 3 * c1(3.0) * 2 * 0.1, rel=1e-12)
        assert RG.c_n(3.0, 2.0, 1000) == pytest.approx(10.923, abs=1e-3)

    def test_b_n_sq(self):
        assert RG.b_n_sq(RG.make_noise("gaussian"), 2.0, 100, 1.0, 0.1, 2.0) == pytest.approx(1.0, abs=1e-12)

    def test_L_precondition(self):
        with pytest.raises(PreconditionError, match="alpha/"):
            RG.L_alpha_b(1.0, 0.6, 1.0, 1.0, 3.0)
        assert math.isfinite(RG.L_alpha_b(1.0, 0.2, 1.0, 1.0, 3.0))

    def test_theorem9_tail_vanishes(self):
        D = K.KernelDictionary([make_kernel("triangle")])
        cls, _ = K.kde_class(D, [(0.1,), (0.2,)], 200, 0.1 / 32, 1, beta=0.2)
        noise = RG.make_noise("laplace")
        tails = [RG.theorem9_bound(cls, noise, 3.0, 200, 1.0, y).tail for y in (10.0, 1e3, 1e5)]
        assert tails[2] < tails[1] < tails[0] and tails[2] < 1e-10

    def test_theorem9_noise_family(self):
        D = K.KernelDictionary([make_kernel("triangle")])
        cls, _ = K.kde_class(D, [(0.1,)], 200, 0.1 / 32, 1, beta=0.2)
        with pytest.raises(DomainError):
            RG.theorem9_bound(cls, RG.make_noise("student-t"), 3.0, 200, 1.0, 10.0)
