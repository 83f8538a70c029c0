import math

import numpy as np
import pytest

from spectral_shape.errors import QuadratureFailure
from spectral_shape.quadrature import (GAUSS7_EMBEDDED, KRONROD15_NODES,
                                       KRONROD15_WEIGHTS, adaptive_gk15,
                                       gauss_legendre, graded_panels,
                                       kronrod15_panel, log_gauss)


class TestKronrod15:
    def test_exact_for_polynomials(self):
        # Kronrod-15 integrates degree <= 22 exactly on [-1, 1]
        for deg in (0, 5, 10, 15, 22):
            exact = 2.0 / (deg + 1) if deg % 2 == 0 else 0.0
            got = np.sum(KRONROD15_WEIGHTS * KRONROD15_NODES ** deg)
            assert got == pytest.approx(exact, abs=5e-15)

    def test_embedded_gauss7_exactness(self):
        for deg in (0, 4, 8, 13):
            exact = 2.0 / (deg + 1) if deg % 2 == 0 else 0.0
            got = np.sum(GAUSS7_EMBEDDED * KRONROD15_NODES ** deg)
            assert got == pytest.approx(exact, abs=5e-15)

    def test_error_estimate_flags_peaked_integrand(self):
        val, err = kronrod15_panel(lambda t: 1.0 / (1.02 - t), -1.0, 1.0)
        assert err > 1e-6


class TestLogGauss:
    def test_two_point_rule_matches_tabulated_values(self):
        x, w = log_gauss(2)
        assert x == pytest.approx([0.112008806166976, 0.602276908118738],
                                  abs=1e-13)
        assert w == pytest.approx([0.718539319030384, 0.281460680969615],
                                  abs=1e-13)

    @pytest.mark.parametrize("k", range(12))
    def test_monomial_moments(self, k):
        # int_0^1 x^k ln(1/x) dx = 1/(k+1)^2
        x, w = log_gauss(10)
        assert np.sum(w * x ** k) == pytest.approx(1.0 / (k + 1) ** 2,
                                                   rel=1e-13)

    def test_log_times_smooth(self):
        # int_0^1 ln(1/x) cos(x) dx, reference from a tight series expansion
        x, w = log_gauss(12)
        got = np.sum(w * np.cos(x))
        # sum_k (-1)^k / ((2k)! (2k+1)^2)
        ref = sum((-1) ** k / (math.factorial(2 * k) * (2 * k + 1) ** 2)
                  for k in range(12))
        assert got == pytest.approx(ref, rel=1e-12)


class TestAdaptive:
    def test_smooth_integral(self):
        got = adaptive_gk15(np.exp, 0.0, 1.0)
        assert got == pytest.approx(np.e - 1.0, rel=1e-13)

    def test_nearby_pole_converges(self):
        got = adaptive_gk15(lambda t: 1.0 / (t + 1.001), -1.0, 1.0)
        assert got == pytest.approx(np.log(2.001) - np.log(0.001), rel=1e-11)

    def test_depth_limit_raises(self):
        with pytest.raises(QuadratureFailure):
            adaptive_gk15(lambda t: np.abs(t - 0.3) ** -0.9, 0.0, 1.0,
                          max_depth=4)


class TestGradedPanels:
    def test_covers_interval(self):
        pts = graded_panels(0.25, -1.0, 1.0, 8)
        assert pts[0] == -1.0 and pts[-1] == 1.0
        assert np.all(np.diff(pts) > 0)

    def test_endpoint_star_is_valid(self):
        pts = graded_panels(-1.0, -1.0, 1.0, 6)
        assert pts[0] == -1.0 and pts[-1] == 1.0
        # panels shrink toward the left end
        assert np.diff(pts)[0] < np.diff(pts)[-1]


def test_gauss_legendre_cached_and_exact():
    x, w = gauss_legendre(10)
    assert np.sum(w * x ** 18) == pytest.approx(2.0 / 19.0, rel=1e-13)
    assert gauss_legendre(10) is not None
