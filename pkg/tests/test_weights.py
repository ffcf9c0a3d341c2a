import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crystalband.weights import (DyadicTail, PowerTail, WeightFamily,
                                 dyadic_power_tail, family_from_json)

PI2 = math.pi ** 2


def brute_power_sum(c, p, mod, res, lo, terms=2_000_000):
    k = np.arange(lo + 1, lo + terms + 1, dtype=float)
    keep = (np.arange(lo + 1, lo + terms + 1) % mod) == res % mod
    return 2.0 * float(np.sum(c * k[keep] ** -p))


def test_power_tail_total_matches_brute_force():
    t = PowerTail(c=1.0, p=2.0, K0=0)
    # 2 * zeta(2) with the far remainder bounded by the integral
    brute = brute_power_sum(1.0, 2.0, 1, 0, 0)
    assert abs(t.total() - (brute + 2.0 / 2_000_000)) < 1e-6
    odd = PowerTail(c=1.0, p=2.0, K0=0, mod=2, residue=1)
    assert abs(odd.total() - 2 * PI2 / 8) < 1e-9   # sum over odd k of k^-2 = pi^2/8


def test_tail_bound_monotone_and_vanishing():
    fam = WeightFamily(d=1, explicit={}, tails=(PowerTail(c=1.0, p=2.0, K0=0),))
    bounds = [fam.tail_bound(N) for N in (1, 4, 16, 64, 256, 4096)]
    assert all(a >= b for a, b in zip(bounds, bounds[1:]))
    assert bounds[-1] < 1e-3
    dy = WeightFamily(d=1, explicit={}, tails=(dyadic_power_tail(1.0, 1.0, 0),))
    assert dy.tail_bound(2 ** 20) < 1e-5


def test_fold_matches_brute_force_power():
    t = PowerTail(c=0.7, p=2.0, K0=3, mod=2, residue=1)
    fam = WeightFamily(d=1, explicit={(1,): 0.5, (-1,): 0.5}, tails=(t,))
    N = 12
    acc = fam.fold(N)
    # brute force over a huge symmetric range
    ks = np.arange(1, 3_000_001)
    vals = np.where((ks % 2 == 1) & (ks > 3), 0.7 * ks ** -2.0, 0.0)
    brute = np.zeros(N)
    np.add.at(brute, ks % N, vals)
    np.add.at(brute, (-ks) % N, vals)
    brute[1 % N] += 0.5
    brute[(-1) % N] += 0.5
    np.testing.assert_allclose(acc, brute, atol=1e-7)


def test_fold_matches_brute_force_dyadic():
    fam = WeightFamily(d=1, explicit={}, tails=(dyadic_power_tail(1.0, 1.5, 0),))
    N = 8
    acc = fam.fold(N)
    brute = np.zeros(N)
    for n in range(0, 60):
        k = 2 ** n
        w = k ** -1.5
        brute[k % N] += w
        brute[(-k) % N] += w
    np.testing.assert_allclose(acc, brute, atol=1e-15)


def test_symbol_tail_matches_brute_force():
    t = PowerTail(c=1.0, p=2.0, K0=2)
    theta = 0.2371
    ks = np.arange(3, 200001)
    brute = 2.0 * float(np.sum(np.cos(2 * np.pi * ks * theta) / ks ** 2.0))
    assert abs(t.symbol_sum(theta) - brute) < 1e-8


def test_values_1d_combines_explicit_and_tails():
    fam = WeightFamily(d=1, explicit={(1,): 2.0, (-1,): 2.0},
                       tails=(PowerTail(c=1.0, p=2.0, K0=1),))
    v = fam.values_1d(5)
    np.testing.assert_allclose(v, [2.0, 1 / 4, 1 / 9, 1 / 16, 1 / 25])


def test_explicit_overlap_with_tail_domain_rejected():
    with pytest.raises(ValueError):
        WeightFamily(d=1, explicit={(5,): 1.0}, tails=(PowerTail(c=1.0, p=2.0, K0=2),))


def test_abs_moment_divergence():
    fam = WeightFamily(d=1, explicit={}, tails=(PowerTail(c=1.0, p=2.0, K0=0),))
    assert fam.abs_moment(1.0) == math.inf
    fin = WeightFamily(d=1, explicit={(2,): 1.0, (-2,): 1.0})
    assert fin.abs_moment(1.0) == 4.0


def test_dyadic_square_sum_certificate():
    conv = DyadicTail(coef=lambda n: 2.0 ** (-n - 2), K0=0, rho=0.5)
    assert math.isfinite(conv.square_r_sum_beyond(0))
    div = dyadic_power_tail(1.0, 0.5, 0)    # r w(r)^2 = 1 at every dyadic r
    assert div.square_r_sum_beyond(0) == math.inf


def test_json_round_trip():
    fam = WeightFamily(d=1, explicit={(1,): 0.25, (-1,): 0.25},
                       tails=(PowerTail(c=1.0, p=2.0, K0=1, mod=2, residue=1),
                              PowerTail(c=2.0, p=2.0, K0=1, mod=4, residue=2)))
    back = family_from_json(fam.to_json(), d=1)
    assert back.explicit == fam.explicit
    assert set(back.tails) == set(fam.tails)
    for k in (3, 6, 8, 101):
        assert back.value(k) == fam.value(k)


@settings(max_examples=30, deadline=None)
@given(st.dictionaries(st.integers(min_value=1, max_value=12),
                       st.floats(min_value=0.0, max_value=5.0), max_size=6))
def test_symbol_value_matches_direct_sum(entries):
    explicit = {}
    for k, w in entries.items():
        explicit[(k,)] = w
        explicit[(-k,)] = w
    fam = WeightFamily(d=1, explicit=explicit)
    theta = 0.31
    direct = sum(w * math.cos(2 * math.pi * k[0] * theta)
                 for k, w in explicit.items())
    assert abs(fam.symbol_value(theta) - direct) < 1e-12
