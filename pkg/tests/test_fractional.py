import math

import numpy as np
import pytest
from scipy.special import gammaln

import crystalband as cb
from crystalband.fractional import fractional_laplacian, heat_kernel_crosscheck


def gamma_form(alpha, k):
    """Independent closed form of the d=1 weight, via Gamma-function ratios."""
    return math.gamma(2 * alpha + 1) * math.sin(math.pi * alpha) / math.pi \
        * math.exp(gammaln(k - alpha) - gammaln(k + 1 + alpha))


class TestWeights:
    def test_boundary_case_is_the_plain_laplacian(self):
        s = fractional_laplacian(1, 1.0, ncoef=8)
        assert s.weights[0][0].value(1) == pytest.approx(1.0, abs=1e-10)
        for k in range(2, 9):
            assert abs(s.weights[0][0].value(k)) < 1e-10
        assert s.Q[0] == pytest.approx(2.0, abs=1e-10)

    def test_alpha_to_one_limit_of_bessel_oracle(self):
        vals = [heat_kernel_crosscheck(a, 1) for a in (0.9, 0.99, 0.999)]
        gaps = [abs(v - 1.0) for v in vals]
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] < 5e-3
        assert heat_kernel_crosscheck(0.999, 4) < 1e-2

    def test_fft_bessel_and_gamma_forms_agree(self):
        s = fractional_laplacian(1, 0.5, ncoef=16)
        for k in (1, 2, 5):
            w = s.weights[0][0].value(k)
            assert abs(w - heat_kernel_crosscheck(0.5, k)) < 1e-8
            assert abs(w - gamma_form(0.5, k)) < 1e-10

    def test_positivity_everywhere(self):
        for alpha in (0.2, 0.5, 0.8):
            s = fractional_laplacian(1, alpha, ncoef=64)
            v = s.weights[0][0].values_1d(64)
            assert np.all(v > 0)

    def test_degree_identity_certified(self):
        for alpha in (0.3, 0.7):
            s = fractional_laplacian(1, alpha, ncoef=64)
            fam = s.weights[0][0]
            for N in (8, 16, 32, 64):
                partial = 2.0 * float(np.sum(fam.values_1d(N)))
                gap = float(s.Q[0]) - partial
                assert -1e-12 <= gap <= fam.tail_bound(N)

    def test_exact_degree_value_at_half(self):
        s = fractional_laplacian(1, 0.5, ncoef=16)
        assert s.Q[0] == pytest.approx(4 / math.pi, abs=1e-12)

    def test_power_law_decay_exponent(self):
        alpha = 0.5
        s = fractional_laplacian(1, alpha, ncoef=64)
        ks = np.arange(20, 65)
        w = s.weights[0][0].values_1d(64)[19:]
        slope = np.polyfit(np.log(ks), np.log(w), 1)[0]
        assert slope == pytest.approx(-(1 + 2 * alpha), abs=0.05)
        # the rescaled weights approach the exact asymptotic constant
        const = math.gamma(2 * alpha + 1) * math.sin(math.pi * alpha) / math.pi
        assert w[-1] * 64.0 ** (1 + 2 * alpha) == pytest.approx(const, rel=1e-3)

    def test_two_dimensional_build(self):
        s = fractional_laplacian(2, 0.5, ncoef=8)
        assert cb.validate(s).ok
        assert s.weights[0][0].value((1, 0)) == s.weights[0][0].value((0, 1))
        assert s.weights[0][0].value((1, 1)) > 0
        grid = cb.sample_bands(s, 32)
        lo, hi = grid.band_ranges()[0]
        # crystal symbol is 2Q - h, h in [0, 8^alpha]
        assert hi == pytest.approx(2 * float(s.Q[0]), abs=1e-9)
        assert lo == pytest.approx(2 * float(s.Q[0]) - 8 ** 0.5, abs=1e-6)

    def test_invalid_alpha(self):
        with pytest.raises(ValueError):
            fractional_laplacian(1, 1.5)
        with pytest.raises(ValueError):
            heat_kernel_crosscheck(1.0, 1)
        with pytest.raises(ValueError):
            heat_kernel_crosscheck(0.5, 0)
