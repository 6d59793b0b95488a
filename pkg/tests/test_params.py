"""Parameter spaces: bandwidth metric, covering numbers, entropy bound, slicing."""
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lsbound.errors import DomainError
from lsbound.params import (DELTA_H, BandwidthSet, FiniteSpace, ProductSpace, SpaceSpec, build_slices,
                            delta_H, entropy_bound_H)

LN2 = math.log(2.0)
hval = st.floats(1e-3, 1.0)


class TestDeltaH:
    def test_identity(self):
        assert delta_H((0.1,), (0.1,)) == 0.0

    def test_ratio_two(self):
        assert delta_H((0.1,), (0.2,)) == pytest.approx(LN2, abs=1e-15)

    def test_max_over_coordinates(self):
        assert delta_H((0.1, 0.4), (0.2, 0.1)) == pytest.approx(math.log(4), abs=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            delta_H((0.1,), (0.1, 0.2))

    @given(hval, hval, hval)
    def test_metric_axioms(self, a, b, c):
        ab, bc, ac = delta_H((a,), (b,)), delta_H((b,), (c,)), delta_H((a,), (c,))
        assert ab == delta_H((b,), (a,))
        assert ac <= ab + bc + 1e-12


class TestCovering:
    def test_single_point(self):
        sp = FiniteSpace(np.zeros((1, 1)))
        assert sp.covering_number(0.01) == 1

    def test_bandwidth_interval(self):
        assert BandwidthSet((0.1,), (0.4,)).covering_number(LN2 / 2) == 2

    def test_bandwidth_grid_oracle(self):
        # exhaustive oracle: greedy interval cover of [ln .1, ln .4] by balls of radius ln2/2
        bw = BandwidthSet((0.1,), (0.4,))
        for delta in (0.05, 0.2, LN2 / 2, 1.0):
            assert bw.covering_number(delta) == max(1, math.ceil(math.log(4) / (2 * delta) - 1e-12))

    def test_separated_kernels(self):
        D = np.array([[0, .5, .7], [.5, 0, .6], [.7, .6, 0]])
        sp = FiniteSpace(D)
        assert sp.covering_number(0.1) == 3
        # brute force over all centre subsets
        best = min(len(c) for r in range(1, 4) for c in itertools.combinations(range(3), r)
                   if all(min(D[i, j] for j in c) <= 0.1 for i in range(3)))
        assert best == 3

    def test_monotone_in_delta(self):
        rng = np.random.default_rng(1)
        pts = rng.uniform(size=(30, 1))
        sp = FiniteSpace.from_points([tuple(p) for p in np.exp(-pts * 3)], DELTA_H)
        counts = [sp.covering_number(d) for d in (0.01, 0.05, 0.2, 1.0, 5.0)]
        assert counts == sorted(counts, reverse=True) and counts[-1] == 1

    def test_product_bound(self):
        K = FiniteSpace(np.array([[0, 1.0], [1.0, 0]]))
        bw = BandwidthSet((0.1,), (0.4,))
        prod = ProductSpace(K, bw, 1.0)
        assert prod.covering_number(0.5) <= K.covering_number(0.5) * bw.covering_number(0.5)

    def test_nonpositive_delta(self):
        with pytest.raises(DomainError):
            BandwidthSet((0.1,), (0.4,)).covering_number(0.0)


class TestEntropyBound:
    def test_degenerate_interval(self):
        assert entropy_bound_H(BandwidthSet((0.1,), (0.1,)), 1.0) == pytest.approx(math.log(3), abs=1e-12)

    def test_direct_formula(self):
        want = math.log(6) + math.log(math.log(4))
        assert entropy_bound_H(BandwidthSet((0.1,), (0.4,)), 0.5) == pytest.approx(want, abs=1e-12)
        assert want == pytest.approx(2.11839, abs=1e-5)

    def test_truncated_second_term(self):
        bw = BandwidthSet((0.1, 0.1), (0.2, 0.2))
        assert entropy_bound_H(bw, 1.0) == pytest.approx(2 * math.log(3), abs=1e-12)

    @settings(max_examples=60)
    @given(st.floats(0.005, 0.5), st.floats(0.0, 5.0), st.floats(0.01, 1.0))
    def test_dominates_covering(self, lo, span, delta):
        bw = BandwidthSet((lo,), (min(lo * math.exp(span), 1.0),))
        assert math.log(bw.covering_number(delta)) <= entropy_bound_H(bw, delta) + 1e-12


class TestSlices:
    def test_constant(self):
        sl = build_slices([1, 1, 1], 1.0)
        assert sl.levels == (2.0,) and sl.members == ((0, 1, 2),)

    def test_powers_of_two(self):
        sl = build_slices([1, 2, 4], 1.0)
        assert sl.levels == (2.0, 4.0, 8.0)
        assert sl.members == ((0,), (1,), (2,))

    def test_below_level(self):
        sl = build_slices([1, 1.9], 1.0)
        assert sl.levels == (2.0,) and sl.members == ((0, 1),)

    def test_errors(self):
        with pytest.raises(DomainError):
            build_slices([], 1.0)
        with pytest.raises(DomainError):
            build_slices([1.0, 0.0], 1.0)
        with pytest.raises(DomainError):
            build_slices([1.0], 1.5)

    @given(st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=40), st.floats(0.1, 1.0))
    def test_partition(self, U, eps):
        sl = build_slices(U, eps)
        flat = sorted(i for m in sl.members for i in m)
        assert flat == list(range(len(U)))
        for j, m in enumerate(sl.members):
            for i in m:
                a = sl.levels[j]
                assert U[i] <= a * (1 + 1e-9) and U[i] >= a * 2 ** -eps * (1 - 1e-9)


def test_space_spec_roundtrip():
    spec = SpaceSpec.from_json('{"kernels": ["box", "cosine"], "h_min": [0.1], "h_max": [0.4], "theta": 2.0}')
    again = SpaceSpec.from_json(spec.to_json())
    assert again == spec and again.bandwidths.d == 1
