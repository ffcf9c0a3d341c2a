import math

import numpy as np
import pytest

import crystalband as cb
from crystalband.functions import (FloquetFunctionSpec, combine,
                                   fourier_coefficients, from_floquet_function,
                                   named_function)

PI2 = math.pi ** 2


class TestCoefficients:
    def test_quadrature_matches_closed_forms(self):
        # acceptance runs this at N = 2^16; a lighter single pass here
        for name in ("a", "b", "c"):
            f = named_function(name)
            ks = np.arange(-32, 33)
            got = fourier_coefficients(f.fn, 32, n=2 ** 14)
            np.testing.assert_allclose(got, f.coef(ks), atol=2e-9)

    def test_doubling_with_extrapolation_converges(self):
        f = named_function("b")
        got = fourier_coefficients(f.fn, 16, tol=1e-13)
        np.testing.assert_allclose(got.real, f.coef(np.arange(-16, 17)), atol=1e-12)

    def test_named_values(self):
        a, b, c = (named_function(n) for n in "abc")
        th = np.array([0.0, 0.25, 0.5, 0.75])
        np.testing.assert_allclose(a.values(th), [0.25, 0.0625, 0.0, 0.0625])
        np.testing.assert_allclose(b.values(th), [0.5, 0.25, 0.0, 0.25])
        np.testing.assert_allclose(c.values(th), [0.25, 0.0, 0.0, 0.0])


class TestFromFunction:
    def test_named_shapes_return_exact_crystals(self):
        s = from_floquet_function(named_function("a"), 64)
        assert s.label == "graph_a"
        assert abs(s.weights[0][0].value(5) - 1 / (2 * PI2 * 25)) < 1e-18
        assert s.Q[0] == pytest.approx(1 / 12)
        sb = from_floquet_function(named_function("b"), 64)
        assert sb.Q[0] == pytest.approx(1 / 4)
        sc = from_floquet_function(named_function("c"), 64)
        assert sc.Q[0] == pytest.approx(1 / 16)
        assert abs(sc.weights[0][0].value(2) - 1 / (4 * PI2)) < 1e-18
        assert sc.weights[0][0].value(4) == 0.0

    def test_generic_callable_accepted(self):
        fn = lambda th: 2.0 + np.cos(2 * np.pi * np.asarray(th)) \
            + 0.5 * np.cos(6 * np.pi * np.asarray(th))
        s = from_floquet_function(FloquetFunctionSpec(name="cosmix", fn=fn), 8)
        assert cb.validate(s).ok
        assert abs(s.weights[0][0].value(1) - 0.5) < 1e-10
        assert abs(s.weights[0][0].value(3) - 0.25) < 1e-10
        assert abs(s.Q[0] - 2.0) < 1e-10

    def test_negative_coefficient_rejected_with_offender(self):
        bad = FloquetFunctionSpec(name="neg",
                                  fn=lambda th: -np.cos(2 * np.pi * np.asarray(th)))
        with pytest.raises(cb.NotAdmissible, match="k = -1"):
            from_floquet_function(bad, 8)

    def test_asymmetric_function_rejected(self):
        skew = FloquetFunctionSpec(name="skew",
                                   fn=lambda th: np.sin(2 * np.pi * np.asarray(th)) + 2.0)
        with pytest.raises(cb.NotAdmissible):
            from_floquet_function(skew, 8)


class TestCombine:
    def test_self_convolution_of_plateau_gives_partly_flat_shape(self):
        f = named_function("indicator:0.5:0.125")
        h = combine("convolution", f)
        ks = np.arange(-12, 13)
        np.testing.assert_allclose(np.asarray(h.coef(ks)),
                                   named_function("c").coef(ks), atol=1e-15)
        # pointwise values agree with the closed shape too
        th = np.linspace(0, 1, 64, endpoint=False)
        np.testing.assert_allclose(h.fn(th), named_function("c").fn(th), atol=1e-3)

    def test_scale_shift_reproduces_inverse_square_graph(self):
        g = combine("scale_shift", named_function("a"), c=2 * PI2, cprime=-PI2 / 6)
        s = from_floquet_function(g, 48)
        ref = cb.builtin("thm1_1")
        for k in range(1, 49):
            assert s.weights[0][0].value(k) == pytest.approx(
                ref.weights[0][0].value(k), rel=1e-12)
        assert abs(s.Q[0]) < 1e-12

    def test_product_with_constant_one_is_identity(self):
        p = combine("product", named_function("const:1"), named_function("b"))
        ks = np.arange(-20, 21)
        np.testing.assert_allclose(np.asarray(p.coef(ks)),
                                   named_function("b").coef(ks), atol=0)

    def test_product_equals_brute_force_convolution(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            ca = np.zeros(9)
            cb_ = np.zeros(9)
            ca[4] = rng.uniform(0.5, 1)
            cb_[4] = rng.uniform(0.5, 1)
            for k in range(1, 5):
                ca[4 + k] = ca[4 - k] = rng.uniform(0, 1)
                cb_[4 + k] = cb_[4 - k] = rng.uniform(0, 1)
            fa = FloquetFunctionSpec(name="ra", coef=_table_coef(ca, 4))
            fb = FloquetFunctionSpec(name="rb", coef=_table_coef(cb_, 4))
            prod = combine("product", fa, fb, ncoef=4)
            full = np.convolve(ca, cb_)
            ks = np.arange(-8, 9)
            np.testing.assert_allclose(np.asarray(prod.coef(ks)), full, atol=1e-14)

    def test_inadmissible_product_rejected(self):
        f = FloquetFunctionSpec(name="sgn", coef=_table_coef(np.array([-1.0, 0, 1.0]), 1))
        with pytest.raises(cb.NotAdmissible):
            combine("product", f, f, ncoef=1)


def _table_coef(arr, kmax):
    def coef(k):
        k = np.asarray(k)
        out = np.zeros(k.shape, dtype=float)
        sel = np.abs(k) <= kmax
        out[sel] = arr[k[sel] + kmax]
        return out
    return coef
