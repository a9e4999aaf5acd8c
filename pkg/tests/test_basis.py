import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmadoa.basis import (
    BasisKind,
    BasisSpec,
    Direction,
    assoc_legendre,
    basis_eval,
    basis_grad,
    basis_grad_matrix,
    basis_matrix,
    legendre,
    sh_complex,
    sh_complex_grad,
    sh_real,
    sh_real_grad,
)
from mmadoa.errors import DomainError, PoleProximityError

FD_STEP = 1e-6


def central_diff(func, x, step=FD_STEP):
    return (func(x + step) - func(x - step)) / (2.0 * step)


class TestLegendre:
    def test_degree_zero_is_one(self):
        assert legendre(0, 0.3) == 1.0

    def test_value_one_at_x_one(self):
        assert legendre(2, 1.0) == pytest.approx(1.0, abs=1e-14)

    def test_degree_two(self):
        # (3 x^2 - 1) / 2 at x = 0.5
        assert legendre(2, 0.5) == pytest.approx(-0.125, abs=1e-14)

    def test_domain_error(self):
        with pytest.raises(DomainError):
            legendre(2, 1.0 + 1e-9)

    @pytest.mark.parametrize("l", range(8))
    def test_matches_numpy_polynomial(self, l):
        # independent oracle: numpy's Legendre polynomial class
        coeffs = np.zeros(l + 1)
        coeffs[l] = 1.0
        poly = np.polynomial.legendre.Legendre(coeffs)
        for x in np.linspace(-1.0, 1.0, 9):
            assert legendre(l, x) == pytest.approx(poly(x), abs=1e-12)


class TestAssocLegendre:
    def test_m_zero_reduces_to_legendre(self):
        assert assoc_legendre(1, 0, 0.7) == pytest.approx(0.7, abs=1e-14)

    def test_p11_at_zero(self):
        # symbolic oracle: -(1 - x^2)^{1/2} at x = 0
        assert assoc_legendre(1, 1, 0.0) == pytest.approx(-1.0, abs=1e-14)

    def test_p22_at_zero(self):
        # symbolic oracle: 3 (1 - x^2) at x = 0
        assert assoc_legendre(2, 2, 0.0) == pytest.approx(3.0, abs=1e-14)

    def test_rejects_m_above_l(self):
        with pytest.raises(DomainError):
            assoc_legendre(2, 3, 0.0)

    @pytest.mark.parametrize("l,m", [(l, m) for l in range(8) for m in range(l + 1)])
    def test_matches_direct_differentiation(self, l, m):
        # Rodrigues-based oracle: differentiate the numpy Legendre polynomial
        coeffs = np.zeros(l + 1)
        coeffs[l] = 1.0
        dpoly = np.polynomial.legendre.Legendre(coeffs).deriv(m)
        for x in np.linspace(-0.95, 0.95, 7):
            expected = (-1.0) ** m * (1.0 - x * x) ** (m / 2.0) * dpoly(x)
            assert assoc_legendre(l, m, x) == pytest.approx(expected, rel=1e-10, abs=1e-12)


class TestComplexHarmonics:
    def test_monopole(self):
        assert sh_complex(0, 0, 0.3, 1.0) == pytest.approx(0.28209479177387814, abs=1e-11)

    def test_dipole_along_axis(self):
        assert sh_complex(1, 0, 0.0, 0.0).real == pytest.approx(0.4886025119029199, abs=1e-11)

    def test_sectoral_sign_convention(self):
        value = sh_complex(1, 1, math.pi / 2.0, 0.0)
        assert value.real == pytest.approx(-0.34549414947133547, abs=1e-11)
        assert value.imag == pytest.approx(0.0, abs=1e-14)

    @settings(max_examples=60, deadline=None)
    @given(
        l=st.integers(0, 6),
        m=st.integers(-6, 6),
        theta=st.floats(0.05, math.pi - 0.05),
        phi=st.floats(0.0, 2.0 * math.pi),
    )
    def test_conjugation_relation(self, l, m, theta, phi):
        if abs(m) > l:
            with pytest.raises(DomainError):
                sh_complex(l, m, theta, phi)
            return
        left = sh_complex(l, -m, theta, phi)
        right = (-1.0) ** m * np.conj(sh_complex(l, m, theta, phi))
        assert left == pytest.approx(right, abs=1e-12)


class TestComplexGradients:
    def test_constant_has_zero_gradient(self):
        assert sh_complex_grad(0, 0, 1.0, 2.0) == (0.0, 0.0)

    def test_azimuth_derivative_identity(self):
        d_theta, d_phi = sh_complex_grad(1, 1, math.pi / 4.0, 0.3)
        assert d_phi == pytest.approx(1j * sh_complex(1, 1, math.pi / 4.0, 0.3), abs=1e-13)

    def test_inclination_derivative_against_finite_differences(self):
        l, m, theta, phi = 3, 2, 1.1, 2.0
        d_theta, _ = sh_complex_grad(l, m, theta, phi)
        expected = central_diff(lambda t: sh_complex(l, m, t, phi), theta)
        assert abs(d_theta - expected) / abs(expected) < 1e-6

    def test_pole_rejection(self):
        with pytest.raises(PoleProximityError):
            sh_complex_grad(2, 1, 1e-9, 0.0)


class TestRealHarmonics:
    def test_monopole_matches_complex(self):
        assert sh_real(0, 0, 0.9, 0.1) == pytest.approx(0.28209479177387814, abs=1e-11)

    def test_zonal_at_axis(self):
        assert sh_real(1, 0, 0.0, 1.7) == pytest.approx(0.4886025119029199, abs=1e-11)

    def test_negative_order_vanishes_at_zero_azimuth(self):
        assert sh_real(1, -1, 0.8, 0.0) == 0.0

    def test_zero_gradient_for_constant(self):
        assert sh_real_grad(0, 0, 1.2, 0.4) == (0.0, 0.0)

    def test_zonal_azimuth_derivative_is_zero(self):
        _, d_phi = sh_real_grad(1, 0, 1.2, 2.2)
        assert d_phi == 0.0

    @pytest.mark.parametrize("l,m", [(2, 1), (3, -2), (5, 0), (4, 4)])
    def test_gradients_against_finite_differences(self, l, m):
        theta, phi = 1.0, 0.5
        d_theta, d_phi = sh_real_grad(l, m, theta, phi)
        fd_theta = central_diff(lambda t: sh_real(l, m, t, phi), theta)
        fd_phi = central_diff(lambda p: sh_real(l, m, theta, p), phi)
        assert d_theta == pytest.approx(fd_theta, rel=1e-6, abs=1e-9)
        assert d_phi == pytest.approx(fd_phi, rel=1e-6, abs=1e-9)

    def test_matches_complex_recombination(self):
        # sqrt(2) Re / Im parts of the complex harmonics, on a 10 x 10 grid
        thetas = np.linspace(0.1, math.pi - 0.1, 10)
        phis = np.linspace(0.0, 2.0 * math.pi, 10, endpoint=False)
        for l in range(6):
            for m in range(-l, l + 1):
                for theta in thetas[::3]:
                    for phi in phis[::3]:
                        value = sh_real(l, m, theta, phi)
                        y = sh_complex(l, abs(m), theta, phi)
                        if m > 0:
                            expected = math.sqrt(2.0) * y.real
                        elif m == 0:
                            expected = y.real
                        else:
                            expected = math.sqrt(2.0) * y.imag
                        assert value == pytest.approx(expected, abs=1e-12)


class TestBasisSpec:
    def test_fourier_size_must_be_odd(self):
        with pytest.raises(ValueError):
            BasisSpec(BasisKind.FOURIER_1D, 4)

    def test_sh_size_must_be_square(self):
        with pytest.raises(ValueError):
            BasisSpec(BasisKind.COMPLEX_SH, 10)

    def test_fourier2d_root_must_be_odd(self):
        with pytest.raises(ValueError):
            BasisSpec(BasisKind.FOURIER_2D, 16)
        BasisSpec(BasisKind.FOURIER_2D, 25)


class TestBasisEval:
    def test_single_fourier_term(self):
        vec = basis_eval(BasisSpec(BasisKind.FOURIER_1D, 1), 1.234)
        assert vec.shape == (1,)
        assert vec[0] == pytest.approx(0.3989422804014327, abs=1e-12)

    def test_first_harmonic_is_monopole(self):
        vec = basis_eval(BasisSpec(BasisKind.COMPLEX_SH, 4), 0.7, 0.3)
        assert vec[0] == pytest.approx(0.28209479177387814, abs=1e-11)

    def test_fourier2d_at_origin(self):
        vec = basis_eval(BasisSpec(BasisKind.FOURIER_2D, 9), 0.0, 0.0)
        assert np.allclose(vec, 1.0 / (2.0 * math.pi))

    def test_fourier2d_is_kronecker_theta_major(self):
        spec = BasisSpec(BasisKind.FOURIER_2D, 9)
        theta, phi = 0.4, 1.9
        b_theta = basis_eval(BasisSpec(BasisKind.FOURIER_1D, 3), theta)
        b_phi = basis_eval(BasisSpec(BasisKind.FOURIER_1D, 3), phi)
        assert np.allclose(basis_eval(spec, theta, phi), np.kron(b_theta, b_phi))


class TestBasisGrad:
    def test_zero_order_fourier_term(self):
        d_theta, _ = basis_grad(BasisSpec(BasisKind.FOURIER_1D, 3), 0.0)
        assert d_theta[1] == 0.0  # centre entry is the u = 0 term

    def test_fourier_derivative_is_ju_times_value(self):
        spec = BasisSpec(BasisKind.FOURIER_1D, 3)
        d_theta, _ = basis_grad(spec, 0.7)
        value = basis_eval(spec, 0.7)
        assert d_theta[2] == pytest.approx(1j * value[2], abs=1e-14)

    @pytest.mark.parametrize(
        "spec",
        [
            BasisSpec(BasisKind.COMPLEX_SH, 16),
            BasisSpec(BasisKind.REAL_SH, 16),
            BasisSpec(BasisKind.FOURIER_2D, 9),
            BasisSpec(BasisKind.REAL_FOURIER_1D, 7),
        ],
    )
    def test_matches_finite_differences(self, spec):
        theta, phi = 0.9, 1.2
        d_theta, d_phi = basis_grad(spec, theta, phi)
        fd_theta = (basis_eval(spec, theta + FD_STEP, phi) - basis_eval(spec, theta - FD_STEP, phi)) / (
            2.0 * FD_STEP
        )
        fd_phi = (basis_eval(spec, theta, phi + FD_STEP) - basis_eval(spec, theta, phi - FD_STEP)) / (
            2.0 * FD_STEP
        )
        scale = max(np.abs(fd_theta).max(), 1.0)
        assert np.abs(d_theta - fd_theta).max() / scale < 1e-6
        assert np.abs(d_phi - fd_phi).max() / max(np.abs(fd_phi).max(), 1.0) < 1e-6

    def test_pole_rejected_for_spherical_kinds(self):
        with pytest.raises(PoleProximityError):
            basis_grad(BasisSpec(BasisKind.REAL_SH, 9), 1e-8, 0.0)


class TestOrthonormality:
    @staticmethod
    def quadrature_grid():
        nodes, weights = np.polynomial.legendre.leggauss(64)
        thetas = np.arccos(nodes)
        phis = np.arange(128) * (2.0 * math.pi / 128.0)
        theta_grid = np.repeat(thetas, phis.size)
        phi_grid = np.tile(phis, thetas.size)
        weight_grid = np.repeat(weights, phis.size) * (2.0 * math.pi / 128.0)
        return theta_grid, phi_grid, weight_grid

    def test_complex_sh_gram_identity(self):
        theta, phi, weight = self.quadrature_grid()
        rows = basis_matrix(BasisSpec(BasisKind.COMPLEX_SH, 36), theta, phi)
        gram = (rows * weight) @ rows.conj().T
        assert np.abs(gram - np.eye(36)).max() < 1e-8

    def test_real_sh_gram_identity(self):
        theta, phi, weight = self.quadrature_grid()
        rows = basis_matrix(BasisSpec(BasisKind.REAL_SH, 36), theta, phi)
        gram = (rows * weight) @ rows.T
        assert np.abs(gram - np.eye(36)).max() < 1e-8

    @pytest.mark.parametrize("kind", [BasisKind.FOURIER_1D, BasisKind.REAL_FOURIER_1D])
    def test_circle_gram_identity(self, kind):
        angles = -math.pi + np.arange(4096) * (2.0 * math.pi / 4096.0)
        rows = basis_matrix(BasisSpec(kind, 15), angles)
        gram = (rows * (2.0 * math.pi / 4096.0)) @ rows.conj().T
        assert np.abs(gram - np.eye(15)).max() < 1e-10


class TestDirection:
    def test_clamps_inclination(self):
        assert Direction(-0.5, 1.0).theta == 0.0
        assert Direction(4.0, 1.0).theta == math.pi

    def test_wraps_azimuth(self):
        assert Direction(1.0, 2.0 * math.pi + 0.25).phi == pytest.approx(0.25)

    @settings(max_examples=50, deadline=None)
    @given(theta=st.floats(-10.0, 10.0), phi=st.floats(-10.0, 10.0))
    def test_invariants_hold(self, theta, phi):
        direction = Direction(theta, phi)
        assert 0.0 <= direction.theta <= math.pi
        assert 0.0 <= direction.phi < 2.0 * math.pi
