import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import zeta

import crystalband as cb
from crystalband.locality import (commutator_kernel_window, finite_rank_error,
                                  hs_norm, hs_window_pair_sum)
from crystalband.weights import WeightFamily, dyadic_power_tail

from conftest import spec


def chain(entries, q=0.0, tails=()):
    explicit = {}
    for k, w in entries.items():
        explicit[(k,)] = w
        explicit[(-k,)] = w
    fam = WeightFamily(d=1, explicit=explicit, tails=tails)
    return cb.CrystalSpec(d=1, nu=1, Q=np.array([q]), weights=((fam,),), label="chain")


class TestHsNorm:
    def test_nearest_neighbour_rank_two(self):
        rep = hs_norm(chain({1: 1.0}), R=64)
        assert rep.partial_hs2 == 2.0
        # and the window kernel agrees: two unit entries
        K = commutator_kernel_window(chain({1: 1.0}), 8)
        assert np.sum(K ** 2) == 2.0

    def test_inverse_square_closed_value(self):
        rep = hs_norm(spec("graph_a"), R=2 ** 14)
        target = float(zeta(3, 1)) / (2 * math.pi ** 4)
        assert rep.verdict == "converges"
        assert abs(rep.hs2 - target) < 1e-12
        assert rep.partial_hs2 <= target

    def test_dyadic_sqrt_divergence_increments(self):
        fam = WeightFamily(d=1, explicit={}, tails=(dyadic_power_tail(1.0, 0.5, 0),))
        s = cb.CrystalSpec(d=1, nu=1, Q=np.zeros(1), weights=((fam,),), label="div")
        rep = hs_norm(s, R=2 ** 20)
        cps = dict(rep.checkpoints)
        assert cps[2 ** 20] - cps[2 ** 10] == pytest.approx(20.0, abs=1e-9)
        assert rep.verdict == "diverges"

    def test_monotone_weights_get_a_certificate(self):
        rep = hs_norm(spec("graph_b"), R=4096)
        assert rep.verdict == "converges"
        assert rep.tail_bound is not None and rep.tail_bound > 0

    def test_checkpoints_nondecreasing(self):
        rep = hs_norm(spec("weierstrass"), R=2 ** 16)
        vals = [s for _, s in rep.checkpoints]
        assert all(a <= b + 1e-15 for a, b in zip(vals, vals[1:]))
        assert rep.hs2 == pytest.approx(0.25, abs=1e-12)   # 2 sum 2^n (2^-n-2)^2


class TestWindowOracle:
    def test_reindexed_sum_equals_frobenius(self):
        for name in ("graph_a", "graph_b", "weierstrass"):
            s = spec(name)
            K = commutator_kernel_window(s, 200)
            frob2 = float(np.sum(K ** 2))
            assert abs(frob2 - hs_window_pair_sum(s, 200)) < 1e-10

    @settings(max_examples=20, deadline=None)
    @given(st.dictionaries(st.integers(min_value=1, max_value=30),
                           st.floats(min_value=0.0, max_value=2.0), max_size=8))
    def test_reindex_identity_random_families(self, entries):
        s = chain(entries)
        L = 40
        K = commutator_kernel_window(s, L)
        assert abs(float(np.sum(K ** 2)) - hs_window_pair_sum(s, L)) < 1e-12

    def test_double_sum_matches_reindexed_single_sum(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            w = np.zeros(41)
            w[rng.integers(1, 41, size=6)] = rng.uniform(0, 1, size=6)
            R = 40
            single = 2.0 * sum(r * w[r] ** 2 for r in range(1, R + 1))
            double = 2.0 * sum(w[k + m] ** 2
                               for k in range(0, R) for m in range(1, R + 1)
                               if k + m <= R)
            assert abs(single - double) < 1e-12


class TestFiniteRank:
    def test_inverse_square_bound(self):
        out = finite_rank_error(spec("graph_a"), [100])
        # sqrt(2) * sum_{m>100} 1/(2 pi^2 m^2) <= sqrt(2)/(2 pi^2 * 100)
        assert out[0][1] <= math.sqrt(2) / (2 * math.pi ** 2 * 100) * 1.01
        assert out[0][1] >= math.sqrt(2) / (2 * math.pi ** 2 * 101)

    def test_lacunary_geometric_bound(self):
        out = finite_rank_error(spec("weierstrass"), [2 ** 10])
        # remaining dyadic mass: sum_{n >= 11} 2^(-n-2) = 2^-12
        assert out[0][1] == pytest.approx(math.sqrt(2) * 2.0 ** -12, rel=1e-12)

    def test_finite_support_vanishes(self):
        out = finite_rank_error(chain({1: 1.0}), [1, 2, 10])
        assert all(b == 0.0 for _, b in out)

    def test_bounds_decrease_to_zero(self):
        out = finite_rank_error(spec("graph_a"), [10, 100, 1000, 10000])
        bs = [b for _, b in out]
        assert all(a > b for a, b in zip(bs, bs[1:]))
        assert bs[-1] < 1e-4
