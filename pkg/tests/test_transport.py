import math

import numpy as np
import pytest

import crystalband as cb
from crystalband.transport import analytic_ballistic_limit, layer_speed, msd_series

from conftest import spec

PI2 = math.pi ** 2


class TestAnalyticLimit:
    def test_closed_form_values(self):
        # |grad|^2 means: b -> 1, c -> 1/2, a -> 1/3 (each over one period)
        assert analytic_ballistic_limit(spec("graph_b")) == pytest.approx(
            1 / (4 * PI2), rel=1e-10)
        assert analytic_ballistic_limit(spec("graph_c")) == pytest.approx(
            1 / (8 * PI2), rel=1e-6)
        assert analytic_ballistic_limit(spec("graph_a")) == pytest.approx(
            1 / (12 * PI2), rel=1e-6)

    def test_shift_invariance_and_quadratic_scaling(self):
        # the rescaled graphs share the shape up to h -> c h + c': the limit
        # picks up c^2 and ignores c'
        la = analytic_ballistic_limit(spec("graph_a"))
        l1 = analytic_ballistic_limit(spec("thm1_1"))
        assert l1 == pytest.approx((2 * PI2) ** 2 * la, rel=1e-9)
        lb = analytic_ballistic_limit(spec("graph_b"))
        l2 = analytic_ballistic_limit(spec("thm1_2"))
        assert l2 == pytest.approx(PI2 ** 2 * lb, rel=1e-9)

    def test_weighted_state(self):
        # psi_hat supported where the tent symbol is flat: no transport
        psi = lambda th: np.where((th >= 0.25) & (th <= 0.75), math.sqrt(2.0), 0.0)
        val = analytic_ballistic_limit(spec("graph_c"), psi_hat=psi)
        assert val < 1e-12

    def test_divergence_detected_below_quarter(self):
        with pytest.raises(cb.DivergentGradientEnergy):
            analytic_ballistic_limit(cb.builtin("frac:1:0.2"))

    def test_convergence_above_quarter(self):
        v = analytic_ballistic_limit(cb.builtin("frac:1:0.35"))
        assert math.isfinite(v) and v > 0


class TestMsdSeries:
    def test_exact_quadratic_growth_for_point_mass(self):
        # MSD(t) = t^2/(4 pi^2) int |h'|^2 exactly for a point mass
        rep = msd_series(spec("graph_b"), [5.0, 10.0], M=2 ** 12)
        for t, v in zip(rep.times, rep.msd):
            assert v == pytest.approx(t * t / (4 * PI2), rel=1e-3)

    def test_ballistic_verdicts(self):
        rep = msd_series(spec("graph_c"), np.linspace(20, 120, 6), M=2 ** 13)
        assert rep.verdict == "ballistic"
        assert rep.fitted_speed2 == pytest.approx(1 / (8 * PI2), rel=0.05)

    def test_fractional_window_blowup(self):
        rep = msd_series(cb.builtin("frac:1:0.2"), [1.0], M=2 ** 14)
        assert rep.verdict == "super-ballistic-suspect"

    def test_fractional_ballistic_above_threshold(self):
        rep = msd_series(cb.builtin("frac:1:0.5"), np.linspace(10, 60, 5), M=2 ** 13)
        assert rep.verdict == "ballistic"
        assert rep.analytic_limit == pytest.approx(0.5, rel=1e-6)

    def test_json_shape(self):
        rep = msd_series(spec("graph_b"), [5.0, 10.0], M=2 ** 10)
        obj = rep.to_json()
        assert set(obj) == {"t", "msd", "converged", "fitted_speed2",
                            "analytic_limit", "verdict"}


class TestDetector:
    def test_verdicts_monotone_and_split(self):
        out = cb.superballistic_detector([0.2, 0.25, 0.4], t=1.0,
                                         M_list=(2 ** 12, 2 ** 16))
        assert [v.verdict for v in out] == ["super-ballistic", "boundary", "ballistic"]
        assert out[0].window_ratio > 1.5
        assert out[2].window_ratio < 1.05

    def test_gradient_energy_growth_exponent(self):
        out = cb.superballistic_detector([0.2], t=1.0)[0]
        # integrand ~ theta^(4a-2) near zero: Riemann sums grow like N^(1-4a)
        assert out.fourier_exponent == pytest.approx(0.2, abs=0.05)


class TestLayerSpeed:
    def test_three_layer_ladder_moves(self):
        total = layer_speed(spec("fig5_right"), N=256)
        assert total > 0.005

    def test_single_vertex_reduction(self):
        assert layer_speed(spec("graph_a")) == pytest.approx(
            analytic_ballistic_limit(spec("graph_a")), rel=1e-9)
