import math

import numpy as np
import pytest

import crystalband as cb

from conftest import bands, spec


class TestOccupation:
    def test_tent_symbol_gives_flat_density(self):
        hist = cb.occupation_density(bands("graph_b", 4096), bins=50)
        # density 2 on [0, 1/2]: every bin carries 1/50 of the mass
        np.testing.assert_allclose(hist.mass, 1 / 50, atol=1e-3)
        assert hist.total == pytest.approx(1.0, abs=1e-12)

    def test_parabolic_symbol_has_inverse_sqrt_density(self):
        grid = bands("graph_a", 2 ** 14)
        E = grid.eigenvalues[..., 0].reshape(-1)
        eps = 0.002
        m1 = float(np.mean((E >= 0) & (E < eps)))
        m2 = float(np.mean((E >= eps) & (E < 2 * eps)))
        assert m1 / m2 == pytest.approx(1 / (math.sqrt(2) - 1), rel=0.01)

    def test_partly_flat_symbol_carries_an_atom(self):
        grid = bands("graph_c", 4096)
        rep = cb.detect_flat_bands(grid)
        hist = cb.occupation_density(grid, bins=50, flat_report=rep)
        assert len(hist.atoms) == 1
        value, mass = hist.atoms[0]
        assert abs(value) < 1e-12
        assert mass == pytest.approx(0.5, abs=2 / 4096)

    def test_mass_conservation_for_weighted_states(self):
        grid = bands("graph_b", 4096)
        psi_hat = lambda th: np.sqrt(2.0) * np.sin(2 * np.pi * th)      # unit l2 norm
        hist = cb.occupation_density(grid, psi_hat=psi_hat, bins=32)
        assert float(np.sum(hist.mass)) == pytest.approx(hist.total, abs=1e-14)
        assert hist.total == pytest.approx(1.0, abs=1e-8)

    def test_bin_count_guard(self):
        with pytest.raises(ValueError):
            cb.occupation_density(bands("graph_a", 256), bins=1)


class TestACCriterion:
    def test_verdicts_match_spectral_types(self):
        assert cb.ac_criterion(bands("graph_a", 1024))[0].verdict == "ac_consistent"
        assert cb.ac_criterion(bands("graph_b", 1024))[0].verdict == "ac_consistent"
        assert cb.ac_criterion(bands("graph_c", 1024))[0].verdict == "flat_suspect"
        assert cb.ac_criterion(bands("frac:1:0.5", 1024))[0].verdict == "ac_consistent"

    def test_rough_symbol_is_inconclusive(self):
        v = cb.ac_criterion(bands("sc_dyadic", 1024))[0]
        assert v.verdict == "inconclusive"

    def test_flat_fraction_tracks_the_segment(self):
        v = cb.ac_criterion(bands("graph_c", 1024))[0]
        assert v.refined_fraction == pytest.approx(0.5, abs=0.01)

    def test_agreement_with_flat_detection(self):
        for name in ("graph_a", "graph_b", "graph_c", "thm1_1", "thm1_2", "thm1_3",
                     "zd:1", "frac:1:0.5", "weierstrass", "sc_dyadic"):
            flats = cb.detect_flat_bands(bands(name, 1024)).flats
            verdict = cb.ac_criterion(bands(name, 1024))[0].verdict
            assert (verdict == "flat_suspect") == bool(flats), name


class TestRegularity:
    def test_parabolic_quotients_bounded_by_slope(self):
        probe = cb.regularity_probe(spec("graph_a"))
        assert np.all(probe.max_quotients <= 1.0 + 1e-12)
        assert probe.holder_exponent == pytest.approx(1.0, abs=0.01)
        assert not probe.unbounded_suspect

    def test_lacunary_growth(self):
        probe = cb.regularity_probe(spec("weierstrass"))
        assert probe.unbounded_suspect
        assert probe.growth_ratio >= 2.0
        assert np.all(np.diff(probe.max_quotients) > 0)

    def test_log_damped_lacunary_grows_slower(self):
        w = cb.regularity_probe(spec("weierstrass"))
        sc = cb.regularity_probe(spec("sc_dyadic"))
        assert sc.unbounded_suspect
        assert sc.growth_ratio >= 1.2
        slope_w = np.polyfit(np.arange(len(w.max_quotients)), w.max_quotients, 1)[0]
        slope_sc = np.polyfit(np.arange(len(sc.max_quotients)), sc.max_quotients, 1)[0]
        assert slope_sc < slope_w

    def test_lipschitz_bound_for_summable_first_moment(self):
        for name in ("zd:1", "adjacency_power:4", "frac:1:0.8"):
            s = spec(name)
            bound = 2 * math.pi * s.weights[0][0].abs_moment(1.0)
            probe = cb.regularity_probe(s)
            assert math.isfinite(bound)
            assert np.all(probe.max_quotients <= bound + 1e-9), name

    def test_scale_selection(self):
        probe = cb.regularity_probe(spec("graph_a"), scales=[2.0 ** -j for j in (4, 6, 8)])
        assert probe.scales.tolist() == [2 ** -4, 2 ** -6, 2 ** -8]
