"""Kernel-class instantiation: maps, distances, constants and the assembled bound."""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lsbound import kde as K
from lsbound.empirical import c1, gamma_of_mu
from lsbound.errors import DomainError, PreconditionError, RegimeError
from lsbound.params import BandwidthSet
from lsbound.weights import Kernel, make_kernel

LN2 = math.log(2.0)


@pytest.fixture(scope="module")
def D():
    return K.KernelDictionary([make_kernel("box", 1, 0.0), make_kernel("triangle"), make_kernel("cosine")])


@pytest.fixture(scope="module")
def unit_D():
    base = make_kernel("box", 1, 0.25)
    return K.KernelDictionary([Kernel("unit", base.func, 1, 1.0, 1.0, 1.0)])


class TestMaps:
    def test_phi1_mass(self, D):
        assert K.phi1(D, 0, (0.1,), 100, 0.1 / 64).norm(1.0) == pytest.approx(0.01, rel=1e-12)

    def test_phi2_mass(self, D):
        assert K.phi2(D, 0, (0.1,), 0, (0.1,), 100, 0.1 / 64).norm(1.0) == pytest.approx(0.01, rel=1e-9)

    @pytest.mark.parametrize("k,q,h,hh", [(0, 1, 0.1, 0.2), (1, 2, 0.05, 0.05), (2, 0, 0.3, 0.1)])
    def test_phi2_sup(self, D, k, q, h, hh):
        w = K.phi2(D, k, (h,), q, (hh,), 1, min(h, hh) / 64)
        assert w.sup <= 2 * D.k_inf ** 2 / max(h, hh) * (1 + 1e-9)


class TestDistances:
    def test_identity(self, D):
        assert K.d1(D, (1, (0.1,)), (1, (0.1,))) == 0.0

    def test_bandwidth_term(self, D):
        assert K.d1(D, (1, (0.1,)), (1, (0.2,))) == pytest.approx(LN2, abs=1e-15)

    def test_theta_scaling(self, D):
        th = K.theta_1(1, D.lipschitz, D.k_inf, D.k1)
        assert K.d1(D, (1, (0.1,)), (1, (0.2,)), th) == pytest.approx(th * LN2, rel=1e-14)

    def test_sup_distance_symmetric(self, D):
        assert np.array_equal(D.sup_dist, D.sup_dist.T) and np.all(np.diag(D.sup_dist) == 0)

    def test_bad_theta(self, D):
        with pytest.raises(DomainError):
            K.d2(D, (0, (0.1,), 0, (0.1,)), (0, (0.1,), 0, (0.1,)), 0.0)


class TestConstants:
    def test_D(self):
        assert K.D_func(LN2, 1, 1.0, 1.0) == pytest.approx(2 * (LN2 + 0.5 + 1.0), abs=1e-12)
        assert K.D_func(LN2, 1, 1.0, 1.0) == pytest.approx(4.38629, abs=1e-5)
        assert K.D_func(0.0, 2, 3.0, 2.0) == 0.0

    @given(st.floats(0.0, 3.0), st.integers(1, 2), st.floats(0.5, 10), st.floats(1.0, 3.0))
    def test_D_prime_matches_difference(self, x, d, L, ki):
        h = 1e-6
        num = (K.D_func(x + h, d, L, ki) - K.D_func(max(x - h, 0.0), d, L, ki)) / (x + h - max(x - h, 0.0))
        assert K.D_prime(x, d, L, ki) == pytest.approx(num, rel=1e-5)

    def test_vartheta0(self):
        want = 10 * 60 / math.log(4)
        assert K.vartheta0_i(1, 4.0, 1.0, 1, 1.0, 1.0, 1.0) == pytest.approx(want, abs=1e-9)
        assert want == pytest.approx(432.809, abs=1e-3)

    def test_AH_BH(self):
        bw = BandwidthSet((0.1, 0.1), (0.4, 0.4))
        assert K.A_H(bw) == pytest.approx(math.log(4) ** 2, abs=1e-12)
        assert K.B_H(bw) == pytest.approx(4.0, abs=1e-12)

    def test_gamma(self):
        assert gamma_of_mu(1000.0, 3.0) == pytest.approx(0.316228, abs=1e-6)

    def test_C_beta_d_finite(self):
        assert math.isfinite(K.C_beta_d(0.5, 0.25, 1)) and math.isfinite(K.C_beta_d(0.5, 0.0, 2))


class TestMajorants:
    def test_s2(self, uniform):
        w = make_kernel("box", 1, 0.0).tabulate(0.1 / 1024, 0.1, 100)
        assert K.majorants_i(w, 2.0, 100, uniform)["U"] == pytest.approx(10 ** -0.5, rel=1e-3)

    def test_s15(self, uniform):
        w = make_kernel("box", 1, 0.0).tabulate(0.1 / 1024, 0.1, 100)
        assert K.majorants_i(w, 1.5, 100, uniform)["U"] == pytest.approx(4 * 10 ** (-1 / 3), rel=1e-3)

    def test_breve_dominates(self, uniform):
        w = make_kernel("triangle").tabulate(0.1 / 64, 0.1, 200)
        X = uniform.sample(np.random.default_rng(0), 200)
        m = K.majorants_i(w, 3.0, 200, uniform, X)
        assert m["U_breve"] >= m["U_hat"] and m["U_breve"] >= math.sqrt(200) * w.norm(2.0)

    def test_csv(self, D, tmp_path, uniform):
        rows = K.export_majorants_csv(tmp_path / "m.csv", D, [(0.1,), (0.2,)], 100, 0.1 / 32, 3.0, uniform)
        text = (tmp_path / "m.csv").read_text().splitlines()
        assert rows == 6 and len(text) == 7


class TestLemmas:
    def test_tech1(self, D):
        for p in (1.0, 2.0, 3.0, math.inf):
            lhs, rhs = K.tech1_sides(D, (1, (0.1,)), (2, (0.15,)), 100, 0.1 / 64, p)
            assert lhs <= rhs

    def test_tech204(self, D):
        for p in (1.0, 2.0, math.inf):
            for key, (lhs, rhs) in K.tech204_sides(D, (1, (0.1,), 2, (0.2,)), 50, 0.1 / 64, p).items():
                assert lhs <= rhs * (1 + 1e-3), key

    def test_tech2(self, D):
        w = K.phi1(D, 1, (0.1,), 100, 0.1 / 64)
        ok, frac = K.tech2_check(w, D.kernels[1].lipschitz / (100 * 0.01))
        assert ok and frac >= 0.5


class TestTheorem7:
    def test_examples_unit_dictionary(self, unit_D):
        r = K.theorem7_assembly(1, unit_D, BandwidthSet((0.001,), (0.5,)), 1000, 1.0, 3.0, 1.0, 1.0, check=False)
        assert r.alpha_star == pytest.approx(2.0, abs=1e-12)
        assert r.y_star == pytest.approx(1000 ** (1 / 3) / (148 * 16), rel=1e-12)
        th0 = 10 * c1(3.0)
        assert r.C_star == pytest.approx(1 + 2 * th0 * (1 + 1000 ** (-1 / 6) + 1000 ** (-1 / 3)), rel=1e-12)

    def test_violations_recorded(self):
        D = K.KernelDictionary([make_kernel("triangle"), make_kernel("cosine")])
        bw = BandwidthSet((0.05,), (0.5,))
        r = K.theorem7_assembly(1, D, bw, 10 ** 6, 1.0, 3.0, 1.0, 2.0, check=False)
        assert r.violations
        with pytest.raises(PreconditionError):
            K.theorem7_assembly(1, D, bw, 10 ** 6, 1.0, 3.0, 1.0, 2.0)

    def test_non_lipschitz(self, D):
        with pytest.raises(DomainError):
            K.theorem7_assembly(1, D, BandwidthSet((0.05,), (0.5,)), 100, 1.0, 3.0, 1.0, 1.0, check=False)

    def test_regime(self, D):
        with pytest.raises(RegimeError):
            K.theorem7_assembly(1, D, BandwidthSet((0.05,), (0.5,)), 100, 1.0, 2.0, 1.0, 1.0)

    def test_log_tail_consistent(self, unit_D):
        r = K.theorem7_assembly(2, unit_D, BandwidthSet((0.01,), (0.5,)), 10 ** 4, 1.0, 5.0, 1.0, 1.0, check=False)
        assert math.isfinite(r.ln_tail)
        if math.isfinite(r.tail) and r.tail > 0:
            assert math.log(r.tail) == pytest.approx(r.ln_tail, rel=1e-9)


def test_kde_class_shapes(D):
    cls, params = K.kde_class(D, [(0.1,), (0.2,)], 100, 0.1 / 32, 1)
    assert len(cls) == len(params) == 6
    cls2, params2 = K.kde_class(D, [(0.1,)], 100, 0.1 / 32, 2)
    assert len(cls2) == 9
    with pytest.raises(DomainError):
        K.kde_class(D, [(0.1,)], 100, 0.1 / 32, 3)
