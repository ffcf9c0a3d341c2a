"""Headline acceptance suite: one test per reproduced claim, stated tolerances.

Each test calls the shared check used by the `crystal reproduce` command and
prints its PASS/FAIL line, so the suite doubles as a headless report.
"""

import pytest

from crystalband import report


def _run(check):
    res = check(report.DEFAULT_SEED)
    print(res.line())
    assert res.passed, res.summary


def test_criterion_01_fourier_coefficients():
    # closed-form coefficients vs plain quadrature at N = 2^16, |k| <= 64, 1e-10
    _run(report.check_fourier_coefficients)


def test_criterion_02_band_endpoints():
    # partly-flat graph band [0, 1/4]; rescaled form [-pi^2/8, 3 pi^2/8]; 1e-6
    _run(report.check_band_endpoints)


def test_criterion_03_flat_band():
    # flat value 0 with grid measure 1/2 +- 2/N at N = 4096; top band never flat
    _run(report.check_flat_band)


def test_criterion_04_frozen_mass():
    # origin amplitude matches the closed form to 1e-8 and stays >= 3/10
    _run(report.check_frozen_mass)


def test_criterion_05_sliding_peaks():
    # sup-norm floor 1/pi; peaks 1/2 at resonant times; parity-dead sites < 1e-8
    _run(report.check_sliding_peaks)


def test_criterion_06_fast_dispersion():
    # sup-norm <= 8 t^(-1/2); origin amplitude within 4/t of sqrt(pi/t)
    _run(report.check_fast_dispersion)


def test_criterion_07_ballistic_speed():
    # fitted speed^2 within 5% of 1/(4 pi^2) and 1/(8 pi^2)
    _run(report.check_ballistic_speed)


def test_criterion_08_fractional_transition():
    # window-mass ratios split at alpha = 1/4; monotone verdicts; boundary flagged
    _run(report.check_fractional_transition)


def test_criterion_09_fractional_identity():
    # weight sums recover the degree inside certified tails; Bessel agreement 1e-8
    _run(report.check_fractional_identity)


def test_criterion_10_dispersion_exponents():
    # origin decay slopes -1/p +- 0.03 (p = 4, 6) and -1/2 +- 0.05 (fractional)
    _run(report.check_dispersion_exponents)


def test_criterion_11_greens_decay():
    # power exponent -2 +- 0.1 at z = -1; exponential wins for the plain lattice
    _run(report.check_greens_decay)


def test_criterion_12_commutator_hs():
    # zeta(3)/(2 pi^4) to 1e-8; window oracle to 1e-10; dyadic growth 20 +- 0.5
    _run(report.check_commutator)


def test_criterion_13_property_suite():
    # hermiticity, unitarity, composition, mirror symmetry, energy form, mass
    _run(report.check_property_suite)


def test_criterion_14_singular_candidate():
    # the dyadic-log graph: valid, flat-band free, unbounded difference quotients
    _run(report.check_singular_candidate)
