import numpy as np
import pytest
from scipy.special import hankel1, jv

import spectral_shape as ss
from spectral_shape.errors import CoincidentPoints, DomainError
from spectral_shape.kernels import (hankel1_0_log_remainder,
                                    hankel1_1_log_remainder)

from .reference import (series_hankel1_0, series_hankel1_1, series_j0,
                        series_j1, series_y0, series_y1)

# frozen from the ascending-series oracle: J_0(1) + i Y_0(1)
H10_AT_ONE = 0.7651976865579666 + 0.08825696421567696j


class TestHankel:
    def test_value_at_one_matches_series_oracle(self):
        got = ss.hankel1_0(1.0)
        assert got == pytest.approx(H10_AT_ONE, rel=1e-12)
        assert got == pytest.approx(series_hankel1_0(1.0), rel=1e-12)

    def test_series_oracle_agreement_complex(self):
        rng = np.random.default_rng(3)
        pts = rng.uniform(0.2, 6.0, 40) + 1j * rng.uniform(-3.0, 3.0, 40)
        for z in pts:
            assert ss.hankel1_0(z) == pytest.approx(series_hankel1_0(z),
                                                    rel=1e-12)
            assert ss.hankel1_1(z) == pytest.approx(series_hankel1_1(z),
                                                    rel=1e-12)

    def test_wronskian_identity(self):
        # J_1(z) Y_0(z) - J_0(z) Y_1(z) = 2/(pi z)
        rng = np.random.default_rng(11)
        z = rng.uniform(0.1, 30.0, 100) + 1j * rng.uniform(-5.0, 5.0, 100)
        h0 = ss.hankel1_0(z)
        h1 = ss.hankel1_1(z)
        j0, j1 = jv(0, z), jv(1, z)
        y0, y1 = (h0 - j0) / 1j, (h1 - j1) / 1j
        lhs = j1 * y0 - j0 * y1
        assert np.max(np.abs(lhs - 2.0 / (np.pi * z))) < 1e-10

    def test_large_argument_asymptotics(self):
        # leading form with its first correction factor (1 - i/(8z))
        z = 40.0
        asym = np.sqrt(2.0 / (np.pi * z)) * np.exp(1j * (z - np.pi / 4.0)) \
            * (1.0 - 1j / (8.0 * z))
        assert abs(ss.hankel1_0(z) - asym) / abs(asym) < 1e-3

    def test_real_part_is_j0(self):
        for x in (0.5, 1.0, 7.3, 24.0, 49.0):
            assert ss.hankel1_0(x).real == pytest.approx(float(jv(0, x)),
                                                         abs=1e-12)

    def test_derivative_identity(self):
        # d/dz H_0 = -H_1 via central differences
        rng = np.random.default_rng(5)
        z = rng.uniform(0.5, 20.0, 100) + 1j * rng.uniform(-2.0, 2.0, 100)
        h = 1e-6
        fd = (ss.hankel1_0(z + h) - ss.hankel1_0(z - h)) / (2 * h)
        assert np.max(np.abs(fd + ss.hankel1_1(z))) < 1e-7

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            ss.hankel1_0(0.0)
        with pytest.raises(DomainError):
            ss.hankel1_0(-2.0)
        with pytest.raises(DomainError):
            ss.hankel1_1(np.array([1.0, -3.0]))


class TestLogRemainders:
    def test_reconstruct_h0(self):
        rng = np.random.default_rng(2)
        z = rng.uniform(0.05, 12.0, 50) + 1j * rng.uniform(-1.5, 1.5, 50)
        rebuilt = (2j / np.pi) * np.log(z) * jv(0, z) \
            + hankel1_0_log_remainder(z)
        assert np.max(np.abs(rebuilt - hankel1(0, z))
                      / np.abs(hankel1(0, z))) < 1e-12

    def test_reconstruct_h1(self):
        rng = np.random.default_rng(4)
        z = rng.uniform(0.05, 12.0, 50) + 1j * rng.uniform(-1.5, 1.5, 50)
        rebuilt = (2j / np.pi) * (np.log(z) * jv(1, z) - 1.0 / z) \
            + hankel1_1_log_remainder(z)
        assert np.max(np.abs(rebuilt - hankel1(1, z))
                      / np.abs(hankel1(1, z))) < 1e-12

    def test_switch_point_continuity(self):
        # both branches must agree with the exact identity on a ring of
        # arguments straddling the |z| = 8 branch switch
        angles = np.linspace(-1.2, 1.2, 9)
        for radius in (8.0 - 1e-9, 8.0 + 1e-9):
            z = radius * np.exp(1j * angles)
            r0 = hankel1_0_log_remainder(z)
            h0 = (2j / np.pi) * np.log(z) * jv(0, z) + r0
            assert np.max(np.abs(h0 - hankel1(0, z))) < 1e-10
            s1 = hankel1_1_log_remainder(z)
            h1 = (2j / np.pi) * (np.log(z) * jv(1, z) - 1.0 / z) + s1
            assert np.max(np.abs(h1 - hankel1(1, z))) < 1e-10

    def test_small_argument_no_cancellation(self):
        # S1(z)/(z/2) -> 1 - i(2 ln 2 + 1 - 2 gamma)/pi; the subtraction form
        # would lose ~8 digits here, the series must not
        gamma = 0.5772156649015328606
        limit = 1.0 - 1j * (2.0 * np.log(2.0) + 1.0 - 2.0 * gamma) / np.pi
        z = np.array([1e-6 + 0j, 1e-4 + 1e-5j])
        s1 = hankel1_1_log_remainder(z)
        assert np.max(np.abs(s1 / (z / 2.0) - limit)) < 1e-7


class TestFundamentalSolution:
    def test_definition(self):
        val = ss.fundamental_solution(1.0, [1.0, 0.0], [0.0, 0.0])
        assert val == pytest.approx(0.25j * series_hankel1_0(1.0), rel=1e-12)

    def test_symmetry_exact(self):
        rng = np.random.default_rng(9)
        for _ in range(512):
            x, y = rng.uniform(-2, 2, 2), rng.uniform(-2, 2, 2)
            if np.allclose(x, y):
                continue
            k = complex(rng.uniform(0.5, 3.0), rng.uniform(-0.5, 0.5))
            assert ss.fundamental_solution(k, x, y) \
                == ss.fundamental_solution(k, y, x)

    def test_helmholtz_residual(self):
        # five-point Laplacian plus kappa^2 Phi vanishes away from the source
        k = 1.3
        y = np.array([0.0, 0.0])
        x = np.array([1.0, 0.0])
        h = 1e-4

        def phi(p):
            return ss.fundamental_solution(k, p, y)

        lap = (phi(x + [h, 0]) + phi(x - [h, 0]) + phi(x + [0, h])
               + phi(x - [0, h]) - 4.0 * phi(x)) / h ** 2
        assert abs(lap + k ** 2 * phi(x)) < 1e-4

    def test_coincident_points(self):
        with pytest.raises(CoincidentPoints):
            ss.fundamental_solution(1.0, [1.0, 1.0], [1.0, 1.0])


class TestAdjointDoubleLayer:
    def test_perpendicular_normal_vanishes(self):
        val = ss.adjoint_doublelayer_kernel(2.0, [1.0, 0.0], [0.0, 0.0],
                                            [0.0, 1.0])
        assert val == 0.0

    def test_definition(self):
        val = ss.adjoint_doublelayer_kernel(1.0, [1.0, 0.0], [0.0, 0.0],
                                            [1.0, 0.0])
        assert val == pytest.approx(-0.25j * series_hankel1_1(1.0), rel=1e-12)

    def test_matches_directional_difference(self):
        rng = np.random.default_rng(17)
        h = 1e-6
        for _ in range(128):
            x = rng.uniform(-1, 1, 2)
            y = x + rng.uniform(0.3, 2.0) * _unit(rng.uniform(0, 2 * np.pi))
            nx = _unit(rng.uniform(0, 2 * np.pi))
            k = complex(rng.uniform(0.5, 3.0), rng.uniform(-0.3, 0.3))
            fd = (ss.fundamental_solution(k, x + h * nx, y)
                  - ss.fundamental_solution(k, x - h * nx, y)) / (2 * h)
            got = ss.adjoint_doublelayer_kernel(k, x, y, nx)
            assert got == pytest.approx(fd, abs=1e-6 * max(1.0, abs(fd)))

    def test_bounded_near_diagonal_on_circle(self):
        # y -> x along the unit circle; the limit is -curvature/(4 pi)
        k = 2.0
        x = np.array([1.0, 0.0])
        nx = np.array([1.0, 0.0])
        vals = []
        for eps in (1e-2, 1e-3, 1e-4, 1e-5):
            y = np.array([np.cos(eps), np.sin(eps)])
            vals.append(ss.adjoint_doublelayer_kernel(k, x, y, nx))
        vals = np.array(vals)
        assert np.max(np.abs(vals)) < 10.0 * 1.0 / (4.0 * np.pi) + 0.1
        assert vals[-1] == pytest.approx(-1.0 / (4.0 * np.pi), abs=1e-3)


class TestValueTypes:
    def test_wavenumber_validation(self):
        assert complex(ss.WaveNumber(2.0 + 0.5j)) == 2.0 + 0.5j
        with pytest.raises(DomainError):
            ss.WaveNumber(0.0)
        with pytest.raises(DomainError):
            ss.WaveNumber(-1.0)

    def test_kernel_point_validation(self):
        ss.KernelPoint([0, 0], [1, 0], nx=[1, 0])
        with pytest.raises(CoincidentPoints):
            ss.KernelPoint([1, 1], [1, 1])
        with pytest.raises(ValueError):
            ss.KernelPoint([0, 0], [1, 0], nx=[2, 0])


class TestSeriesOracleSelfConsistency:
    """The test-local series must agree with themselves via identities."""

    def test_y_series_wronskian(self):
        z = 1.7
        lhs = series_j1(z) * series_y0(z) - series_j0(z) * series_y1(z)
        assert lhs == pytest.approx(2.0 / (np.pi * z), rel=1e-12)


def _unit(angle):
    return np.array([np.cos(angle), np.sin(angle)])
