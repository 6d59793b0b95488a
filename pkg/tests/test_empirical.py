"""Empirical-process constants, fixed-weight tails, random majorant, uniform bounds."""
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lsbound import empirical as E
from lsbound import kde as K
from lsbound.errors import DomainError, PreconditionError, RegimeError
from lsbound.framework import u_eps
from lsbound.sampling import rng_for
from lsbound.weights import m_p, make_kernel, sigma_s, zero_weight


class TestConstants:
    def test_c1(self):
        assert E.c1(math.e) == pytest.approx(15 * math.e, abs=1e-12)
        assert E.c1(4.0) == pytest.approx(60 / math.log(4), abs=1e-12)
        assert E.c1(1.5) == 1.0

    def test_u_and_ubar(self):
        assert u_eps(0.5) == pytest.approx(2 ** 0.5 * 1.5, abs=1e-12)
        assert E.ubar_eps(0.7, 0.0, 3.0) == u_eps(0.7)

    def test_ubar_precondition(self):
        lim = 1 / (4 * E.c1(3.0) * 2)
        assert E.ubar_eps(1.0, 0.5 * lim, 3.0) == pytest.approx(8.0)
        with pytest.raises(PreconditionError):
            E.ubar_eps(1.0, lim, 3.0)

    @pytest.mark.parametrize("la,lb,g,want", [(0.0, 0.01, 0.5, 25.0), (1.0, 1.0, math.sqrt(2), 1.0),
                                              (0.1, 0.0, 0.5, 6.25)])
    def test_y_gamma(self, la, lb, g, want):
        assert E.y_gamma(la, lb, g) == pytest.approx(want, abs=1e-12)

    def test_y_gamma_undefined(self):
        with pytest.raises(DomainError):
            E.y_gamma(0.0, 0.0, 1.0)
        with pytest.raises(DomainError):
            E.y_gamma(1e-200, 0.0, 1.0)

    @given(st.one_of(st.just(0.0), st.floats(1e-6, 5)), st.one_of(st.just(0.0), st.floats(1e-6, 5)),
           st.floats(0.01, 3))
    def test_y_gamma_root(self, la, lb, g):
        if la == 0 and lb == 0:
            return
        y = E.y_gamma(la, lb, g)
        assert math.sqrt(y) * la + y * lb == pytest.approx(g * g, rel=1e-9)

    def test_gamma_theta(self):
        assert E.gamma_of_mu(1e4, 4.0) == pytest.approx(0.1, abs=1e-12)
        assert E.theta0(4.0, 1.0, 1.0, 2.0) == pytest.approx(10 * E.c1(4.0), abs=1e-12)
        assert E.theta1(2.0) == pytest.approx(1 / (148 * 16), abs=1e-15)


class TestFixedWeight:
    def test_rho_s2(self, box_w, uniform):
        assert E.rho_s(box_w, uniform, 2.0, 100) == pytest.approx(10 * m_p(box_w, 2.0), rel=1e-12)
        assert E.rho_s(box_w, uniform, 2.0, 100) == pytest.approx(0.316228, rel=1e-3)

    def test_rho_min_branch(self, box_w, uniform):
        n, s = 100, 1.5
        a, b = math.sqrt(n) * sigma_s(box_w, uniform, s), 4 * n ** (1 / s) * m_p(box_w, s)
        assert E.rho_s(box_w, uniform, s, n) == pytest.approx(min(a, b), rel=1e-12)

    def test_zero_weight(self, uniform):
        z = zero_weight(0.01)
        assert E.rho_s(z, uniform, 2.0, 10) == 0.0 and E.omega_sq(z, uniform, 2.0, 10) == 0.0

    def test_omega_s2_refinement(self, uniform):
        K = make_kernel("triangle")
        a = E.omega_sq(K.tabulate(0.1 / 256, 0.1, 100), uniform, 2.0, 100)
        b = E.omega_sq(K.tabulate(0.1 / 512, 0.1, 100), uniform, 2.0, 100)
        assert abs(a - b) / b < 1e-4

    def test_tail_small_z(self, box_w, uniform):
        prm = E.empirical_params(box_w, uniform, 3.0, 100)
        assert E.theorem1_tail(prm, 1e-12) == pytest.approx(1.0)

    def test_corollary2_identity(self, box_w):
        Ms, n = m_p(box_w, 1.5), 100
        _, tail = E.corollary2_tail(Ms, n, 1.5, math.sqrt(37 * n) * Ms)
        assert tail == pytest.approx(math.exp(-1), rel=1e-12)

    def test_corollary2_regime(self):
        with pytest.raises(RegimeError):
            E.corollary2_tail(1.0, 10, 2.5, 1.0)


class TestRandomMajorant:
    def test_single_sample(self, uniform):
        w = make_kernel("triangle").tabulate(0.1 / 64, 0.1, 1)
        rm = E.random_majorant(w, np.array([[0.37]]), 3.0)
        assert rm.Sigma_hat == pytest.approx(rm.M_s, rel=2e-3)

    def test_pathwise(self, uniform):
        n, s = 200, 3.0
        w = make_kernel("box").tabulate(0.1 / 32, 0.1, n)
        for i in range(20):
            X = uniform.sample(rng_for(4, i), n)
            rm = E.random_majorant(w, X, s, uniform)
            assert rm.Sigma_hat <= rm.M_s * (1 + 1e-12)
            assert rm.U_hat <= E.c1(s) * (math.sqrt(n) + 2 * n ** (1 / s)) * rm.M_s * (1 + 1e-12)
            lhs, rhs = E.r1_sides(w, X, uniform, s)
            assert lhs <= rhs * (1 + 1e-9) + 1e-15

    def test_errors(self):
        w = make_kernel("box").tabulate(0.01, 0.1, 1)
        with pytest.raises(RegimeError):
            E.random_majorant(w, np.array([[0.5]]), 2.0)
        with pytest.raises(DomainError):
            E.random_majorant(w, np.zeros((0, 1)), 3.0)


@pytest.fixture(scope="module")
def small_class():
    D = K.KernelDictionary([make_kernel("triangle"), make_kernel("cosine")])
    cls, _ = K.kde_class(D, [(0.1,), (0.2,)], 100, 0.1 / 32, 1, theta=K.theta_1(1, D.lipschitz, D.k_inf, D.k1))
    return cls


class TestTheorem4:
    def test_floor_identity(self, small_class, uniform):
        n, s = small_class.n, 1.5
        z = math.sqrt(37.0) / 2 * n ** (0.5 - 1 / s)
        r = E.theorem4_bound(small_class, s, 1.0, z, uniform, check=False)
        assert r.tail / (r.T * n ** (1 / s)) == pytest.approx(math.exp(-0.5), rel=1e-12)

    def test_below_floor(self, small_class, uniform):
        with pytest.raises(PreconditionError):
            E.theorem4_bound(small_class, 1.5, 1.0, 1e-3, uniform, check=False)

    def test_s2_majorant(self, small_class, uniform):
        r = E.theorem4_bound(small_class, 2.0, 1.0, 100.0, uniform, check=False)
        want = u_eps(1.0) * (1 + 100 + 100 ** 2 / 12) * 10 * small_class.norms(2.0)
        assert np.allclose(r.majorant, want, rtol=1e-12)

    def test_regime(self, small_class, uniform):
        with pytest.raises(RegimeError):
            E.theorem4_bound(small_class, 3.0, 1.0, 10.0, uniform)

    def test_monotone_probability(self, small_class, uniform):
        ps = [E.theorem4_bound(small_class, 1.5, 1.0, z, uniform, check=False).probability
              for z in (10.0, 20.0, 40.0)]
        assert ps[0] >= ps[1] >= ps[2]


def test_d_star_metric():
    d = np.array([0.0, 0.5, 2.0])
    out = E.d_star(d, 3.0, 0.5, 0.25)
    assert out[0] == 0.0 and np.all(out >= 3.0 * d)
