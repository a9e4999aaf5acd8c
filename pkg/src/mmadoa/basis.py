"""Basis families on the circle and sphere, with analytic angular derivatives.

Five families are supported: complex Fourier functions on the circle, their
real cosine/sine reparameterization, complex and real spherical harmonics on
the sphere, and the 2D Fourier (Kronecker) functions on the torus.  Every
family comes in a vectorized matrix form used by the model-fitting code and a
per-function scalar form used by tests and single-direction evaluations.

Conventions:

* Associated Legendre polynomials carry the Condon-Shortley phase (-1)^m.
* Complex spherical harmonics for negative order are defined through the
  conjugation relation Y_l^{-m} = (-1)^m conj(Y_l^m).
* The derivative of Y_l^m with respect to inclination uses the cot(theta) /
  raising-operator identity, which is singular at the poles; evaluation closer
  than ``POLE_MARGIN_RAD`` to a pole is rejected rather than extrapolated.
* Spherical-harmonic vectors are enumerated u = l(l+1) + m + 1, u = 1..U.
* 2D Fourier vectors are the Kronecker product b_theta (outer) x b_phi
  (inner), which restricts U to squares of odd numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, PoleProximityError

TWO_PI = 2.0 * math.pi

# cot(theta) appears in the inclination derivatives; reject closer approaches.
POLE_MARGIN_RAD = 1e-6

# |x| may exceed 1 by at most this much before legendre() raises.
_X_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Direction:
    """A direction of arrival: inclination ``theta`` and azimuth ``phi`` in radians.

    ``theta`` is clamped to [0, pi] and ``phi`` wrapped into [0, 2*pi) on
    construction.
    """

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        theta = float(self.theta)
        phi = float(self.phi)
        if not (math.isfinite(theta) and math.isfinite(phi)):
            raise DomainError("direction angles must be finite")
        phi = phi % TWO_PI
        if phi >= TWO_PI:  # the modulo can round up to the period itself
            phi = 0.0
        object.__setattr__(self, "theta", min(max(theta, 0.0), math.pi))
        object.__setattr__(self, "phi", phi)

    def as_tuple(self) -> tuple[float, float]:
        return (self.theta, self.phi)


class BasisKind(str, Enum):
    FOURIER_1D = "fourier1d"
    COMPLEX_SH = "complex-sh"
    REAL_SH = "real-sh"
    FOURIER_2D = "fourier2d"
    # Cosine/sine reparameterization of FOURIER_1D used to expand real gains;
    # equivalent to fixing negative Fourier coefficients to the conjugate of
    # the positive ones.
    REAL_FOURIER_1D = "real-fourier1d"


_PLANAR_KINDS = (BasisKind.FOURIER_1D, BasisKind.REAL_FOURIER_1D)
_SH_KINDS = (BasisKind.COMPLEX_SH, BasisKind.REAL_SH)
_REAL_KINDS = (BasisKind.REAL_SH, BasisKind.REAL_FOURIER_1D)


@dataclass(frozen=True)
class BasisSpec:
    """A basis family plus its vector length U.

    Valid sizes: odd for the circle families, a perfect square (L+1)^2 for the
    spherical-harmonic families, and a perfect square with odd root for the 2D
    Fourier family.
    """

    kind: BasisKind
    size: int

    def __post_init__(self):
        kind = BasisKind(self.kind)
        object.__setattr__(self, "kind", kind)
        size = int(self.size)
        object.__setattr__(self, "size", size)
        if size < 1:
            raise ValueError(f"basis size must be positive, got {size}")
        if kind in _PLANAR_KINDS:
            if size % 2 == 0:
                raise ValueError(f"{kind.value} size must be odd, got {size}")
        elif kind in _SH_KINDS:
            root = math.isqrt(size)
            if root * root != size:
                raise ValueError(f"{kind.value} size must be a perfect square, got {size}")
        elif kind is BasisKind.FOURIER_2D:
            root = math.isqrt(size)
            if root * root != size or root % 2 == 0:
                raise ValueError(
                    f"{kind.value} size must be the square of an odd number, got {size}"
                )

    @property
    def is_planar(self) -> bool:
        return self.kind in _PLANAR_KINDS

    @property
    def is_real(self) -> bool:
        return self.kind in _REAL_KINDS

    @property
    def max_degree(self) -> int:
        """Maximum spherical-harmonic degree L for SH kinds."""
        if self.kind not in _SH_KINDS:
            raise ValueError(f"max_degree is undefined for {self.kind.value}")
        return math.isqrt(self.size) - 1

    @property
    def fourier_orders(self) -> np.ndarray:
        """Symmetric index range for the circle families and the 2D root."""
        if self.kind in _PLANAR_KINDS:
            half = (self.size - 1) // 2
        elif self.kind is BasisKind.FOURIER_2D:
            half = (math.isqrt(self.size) - 1) // 2
        else:
            raise ValueError(f"fourier_orders is undefined for {self.kind.value}")
        return np.arange(-half, half + 1)


def sh_index(l: int, m: int) -> int:
    """0-based position of (l, m) in the u = l(l+1)+m+1 enumeration."""
    return l * (l + 1) + m


def sh_degree_order(index: int) -> tuple[int, int]:
    """Inverse of :func:`sh_index` for a 0-based position."""
    l = math.isqrt(index)
    return l, index - l * (l + 1)


def _check_x(x: float) -> float:
    x = float(x)
    if abs(x) > 1.0 + _X_TOLERANCE:
        raise DomainError(f"Legendre argument must satisfy |x| <= 1, got {x}")
    return min(max(x, -1.0), 1.0)


def legendre(l: int, x: float) -> float:
    """Legendre polynomial P_l(x), evaluated by upward recurrence."""
    if l < 0:
        raise DomainError(f"degree must be non-negative, got {l}")
    x = _check_x(x)
    p_prev, p = 1.0, x
    if l == 0:
        return 1.0
    for n in range(2, l + 1):
        p_prev, p = p, ((2 * n - 1) * x * p - (n - 1) * p_prev) / n
    return p


def assoc_legendre(l: int, m: int, x: float) -> float:
    """Associated Legendre polynomial P_l^m(x) with the Condon-Shortley phase."""
    if l < 0:
        raise DomainError(f"degree must be non-negative, got {l}")
    if not 0 <= m <= l:
        raise DomainError(f"order must satisfy 0 <= m <= l, got m={m}, l={l}")
    x = _check_x(x)
    s = math.sqrt(max(0.0, 1.0 - x * x))
    # P_m^m = (-1)^m (2m-1)!! (1-x^2)^{m/2}
    pmm = 1.0
    for k in range(1, m + 1):
        pmm *= -(2 * k - 1) * s
    if l == m:
        return pmm
    pm1 = (2 * m + 1) * x * pmm
    if l == m + 1:
        return pm1
    for n in range(m + 2, l + 1):
        pmm, pm1 = pm1, ((2 * n - 1) * x * pm1 - (n + m - 1) * pmm) / (n - m)
    return pm1


def _legendre_table(lmax: int, x: np.ndarray) -> np.ndarray:
    """P_l^m(x) for all 0 <= m <= l <= lmax; shape (lmax+1, lmax+1, len(x))."""
    x = np.asarray(x, dtype=float)
    s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    table = np.zeros((lmax + 1, lmax + 1) + x.shape)
    table[0, 0] = 1.0
    for m in range(1, lmax + 1):
        table[m, m] = -(2 * m - 1) * s * table[m - 1, m - 1]
    for m in range(lmax):
        table[m + 1, m] = (2 * m + 1) * x * table[m, m]
        for l in range(m + 2, lmax + 1):
            table[l, m] = ((2 * l - 1) * x * table[l - 1, m] - (l + m - 1) * table[l - 2, m]) / (
                l - m
            )
    return table


def _sh_norm(l: int, m: int) -> float:
    """Orthonormalization factor sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) for m >= 0."""
    return math.sqrt(
        (2 * l + 1) / (4.0 * math.pi) * math.factorial(l - m) / math.factorial(l + m)
    )


def sh_complex(l: int, m: int, theta: float, phi: float) -> complex:
    """Complex spherical harmonic Y_l^m(theta, phi), orthonormal on the sphere."""
    if abs(m) > l:
        raise DomainError(f"order must satisfy |m| <= l, got m={m}, l={l}")
    if m < 0:
        return (-1) ** (-m) * np.conj(sh_complex(l, -m, theta, phi))
    plm = assoc_legendre(l, m, math.cos(theta))
    return _sh_norm(l, m) * plm * complex(math.cos(m * phi), math.sin(m * phi))


def _check_pole(theta: float) -> float:
    theta = float(theta)
    if theta < POLE_MARGIN_RAD or theta > math.pi - POLE_MARGIN_RAD:
        raise PoleProximityError(
            f"inclination {theta} is within {POLE_MARGIN_RAD} rad of a pole; "
            "the derivative formulas are singular there"
        )
    return theta


def sh_complex_grad(l: int, m: int, theta: float, phi: float) -> tuple[complex, complex]:
    """Partial derivatives (d/dtheta, d/dphi) of Y_l^m.

    Uses d/dtheta Y_l^m = m cot(theta) Y_l^m
    + sqrt((l-m)(l+m+1)) e^{-j phi} Y_l^{m+1} and d/dphi Y_l^m = j m Y_l^m,
    both valid for any order -l <= m <= l.
    """
    if abs(m) > l:
        raise DomainError(f"order must satisfy |m| <= l, got m={m}, l={l}")
    theta = _check_pole(theta)
    y = sh_complex(l, m, theta, phi)
    d_theta = m / math.tan(theta) * y
    if m < l:
        raise_coef = math.sqrt((l - m) * (l + m + 1))
        d_theta = d_theta + raise_coef * np.exp(-1j * phi) * sh_complex(l, m + 1, theta, phi)
    return complex(d_theta), 1j * m * y


def sh_real(l: int, m: int, theta: float, phi: float) -> float:
    """Real spherical harmonic of degree l and order -l <= m <= l."""
    if abs(m) > l:
        raise DomainError(f"order must satisfy |m| <= l, got m={m}, l={l}")
    plm = assoc_legendre(l, abs(m), math.cos(theta))
    if m > 0:
        return math.sqrt(2.0) * _sh_norm(l, m) * math.cos(m * phi) * plm
    if m == 0:
        return _sh_norm(l, 0) * plm
    return math.sqrt(2.0) * _sh_norm(l, -m) * math.sin(-m * phi) * plm


def _dplm_dtheta(l: int, m: int, theta: float) -> float:
    """d/dtheta of P_l^m(cos theta) via the l+1 recurrence, m >= 0.

    Identity: (l-m+1) P_{l+1}^m(cos t)/sin(t) - (l+1) cot(t) P_l^m(cos t).
    """
    x = math.cos(theta)
    s = math.sin(theta)
    return ((l - m + 1) * assoc_legendre(l + 1, m, x) - (l + 1) * x * assoc_legendre(l, m, x)) / s


def sh_real_grad(l: int, m: int, theta: float, phi: float) -> tuple[float, float]:
    """Partial derivatives (d/dtheta, d/dphi) of the real spherical harmonic."""
    if abs(m) > l:
        raise DomainError(f"order must satisfy |m| <= l, got m={m}, l={l}")
    theta = _check_pole(theta)
    dplm = _dplm_dtheta(l, abs(m), theta)
    plm = assoc_legendre(l, abs(m), math.cos(theta))
    if m > 0:
        norm = math.sqrt(2.0) * _sh_norm(l, m)
        return norm * math.cos(m * phi) * dplm, -m * norm * math.sin(m * phi) * plm
    if m == 0:
        return _sh_norm(l, 0) * dplm, 0.0
    norm = math.sqrt(2.0) * _sh_norm(l, -m)
    return norm * math.sin(-m * phi) * dplm, -m * norm * math.cos(-m * phi) * plm


# ---------------------------------------------------------------------------
# Vectorized basis matrices
# ---------------------------------------------------------------------------


def _as_points(theta, phi) -> tuple[np.ndarray, np.ndarray]:
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if phi is None:
        phi = np.zeros_like(theta)
    else:
        phi = np.broadcast_to(np.asarray(phi, dtype=float), theta.shape).copy()
    return theta, phi


def _fourier_rows(orders: np.ndarray, angle: np.ndarray) -> np.ndarray:
    return np.exp(1j * np.outer(orders, angle)) / math.sqrt(TWO_PI)


def _real_fourier_rows(orders: np.ndarray, angle: np.ndarray) -> np.ndarray:
    half = (len(orders) - 1) // 2
    rows = np.empty((len(orders), angle.size))
    rows[0] = 1.0 / math.sqrt(TWO_PI)
    for u in range(1, half + 1):
        rows[2 * u - 1] = np.cos(u * angle) / math.sqrt(math.pi)
        rows[2 * u] = np.sin(u * angle) / math.sqrt(math.pi)
    return rows


def _complex_sh_rows(spec: BasisSpec, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    lmax = spec.max_degree
    plm = _legendre_table(lmax, np.cos(theta))
    rows = np.empty((spec.size, theta.size), dtype=complex)
    for u in range(spec.size):
        l, m = sh_degree_order(u)
        ma = abs(m)
        row = _sh_norm(l, ma) * plm[l, ma] * np.exp(1j * ma * phi)
        rows[u] = (-1) ** ma * np.conj(row) if m < 0 else row
    return rows


def _real_sh_rows(spec: BasisSpec, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    lmax = spec.max_degree
    plm = _legendre_table(lmax, np.cos(theta))
    rows = np.empty((spec.size, theta.size))
    for u in range(spec.size):
        l, m = sh_degree_order(u)
        ma = abs(m)
        if m > 0:
            rows[u] = math.sqrt(2.0) * _sh_norm(l, m) * np.cos(m * phi) * plm[l, m]
        elif m == 0:
            rows[u] = _sh_norm(l, 0) * plm[l, 0]
        else:
            rows[u] = math.sqrt(2.0) * _sh_norm(l, ma) * np.sin(ma * phi) * plm[l, ma]
    return rows


def basis_matrix(spec: BasisSpec, theta, phi=None) -> np.ndarray:
    """Evaluate the basis at one or more directions; shape (U, n_points).

    Circle families use ``theta`` as the full-circle angle and ignore ``phi``.
    """
    theta, phi = _as_points(theta, phi)
    if spec.kind is BasisKind.FOURIER_1D:
        return _fourier_rows(spec.fourier_orders, theta)
    if spec.kind is BasisKind.REAL_FOURIER_1D:
        return _real_fourier_rows(spec.fourier_orders, theta)
    if spec.kind is BasisKind.COMPLEX_SH:
        return _complex_sh_rows(spec, theta, phi)
    if spec.kind is BasisKind.REAL_SH:
        return _real_sh_rows(spec, theta, phi)
    # FOURIER_2D: theta-major Kronecker product of two circle bases.
    orders = spec.fourier_orders
    b_theta = _fourier_rows(orders, theta)
    b_phi = _fourier_rows(orders, phi)
    root = len(orders)
    return (b_theta[:, None, :] * b_phi[None, :, :]).reshape(root * root, theta.size)


def _check_pole_array(theta: np.ndarray):
    if np.any(theta < POLE_MARGIN_RAD) or np.any(theta > math.pi - POLE_MARGIN_RAD):
        raise PoleProximityError(
            f"inclinations within {POLE_MARGIN_RAD} rad of a pole are rejected "
            "by the derivative formulas"
        )


def basis_grad_matrix(spec: BasisSpec, theta, phi=None) -> tuple[np.ndarray, np.ndarray]:
    """Elementwise (d/dtheta, d/dphi) of :func:`basis_matrix`, same ordering."""
    theta, phi = _as_points(theta, phi)
    if spec.kind is BasisKind.FOURIER_1D:
        orders = spec.fourier_orders
        rows = _fourier_rows(orders, theta)
        return 1j * orders[:, None] * rows, np.zeros_like(rows)
    if spec.kind is BasisKind.REAL_FOURIER_1D:
        orders = spec.fourier_orders
        half = (len(orders) - 1) // 2
        d_rows = np.zeros((len(orders), theta.size))
        for u in range(1, half + 1):
            d_rows[2 * u - 1] = -u * np.sin(u * theta) / math.sqrt(math.pi)
            d_rows[2 * u] = u * np.cos(u * theta) / math.sqrt(math.pi)
        return d_rows, np.zeros_like(d_rows)
    if spec.kind is BasisKind.FOURIER_2D:
        orders = spec.fourier_orders
        b_theta = _fourier_rows(orders, theta)
        b_phi = _fourier_rows(orders, phi)
        d_theta = 1j * orders[:, None] * b_theta
        d_phi = 1j * orders[:, None] * b_phi
        root = len(orders)
        shape = (root * root, theta.size)
        return (
            (d_theta[:, None, :] * b_phi[None, :, :]).reshape(shape),
            (b_theta[:, None, :] * d_phi[None, :, :]).reshape(shape),
        )
    _check_pole_array(theta)
    if spec.kind is BasisKind.COMPLEX_SH:
        return _complex_sh_grad_rows(spec, theta, phi)
    return _real_sh_grad_rows(spec, theta, phi)


def _complex_sh_grad_rows(spec, theta, phi):
    lmax = spec.max_degree
    x = np.cos(theta)
    plm = _legendre_table(lmax, x)
    cot = x / np.sin(theta)

    def harmonic(l, m):
        ma = abs(m)
        row = _sh_norm(l, ma) * plm[l, ma] * np.exp(1j * ma * phi)
        return (-1) ** ma * np.conj(row) if m < 0 else row

    d_theta = np.empty((spec.size, theta.size), dtype=complex)
    d_phi = np.empty_like(d_theta)
    for u in range(spec.size):
        l, m = sh_degree_order(u)
        y = harmonic(l, m)
        dt = m * cot * y
        if m < l:
            dt = dt + math.sqrt((l - m) * (l + m + 1)) * np.exp(-1j * phi) * harmonic(l, m + 1)
        d_theta[u] = dt
        d_phi[u] = 1j * m * y
    return d_theta, d_phi


def _real_sh_grad_rows(spec, theta, phi):
    lmax = spec.max_degree
    x = np.cos(theta)
    sin_t = np.sin(theta)
    plm = _legendre_table(lmax + 1, x)
    d_theta = np.empty((spec.size, theta.size))
    d_phi = np.empty_like(d_theta)
    for u in range(spec.size):
        l, m = sh_degree_order(u)
        ma = abs(m)
        dplm = ((l - ma + 1) * plm[l + 1, ma] - (l + 1) * x * plm[l, ma]) / sin_t
        if m > 0:
            norm = math.sqrt(2.0) * _sh_norm(l, m)
            d_theta[u] = norm * np.cos(m * phi) * dplm
            d_phi[u] = -m * norm * np.sin(m * phi) * plm[l, m]
        elif m == 0:
            d_theta[u] = _sh_norm(l, 0) * dplm
            d_phi[u] = 0.0
        else:
            norm = math.sqrt(2.0) * _sh_norm(l, ma)
            d_theta[u] = norm * np.sin(ma * phi) * dplm
            d_phi[u] = ma * norm * np.cos(ma * phi) * plm[l, ma]
    return d_theta, d_phi


def basis_eval(spec: BasisSpec, theta: float, phi: float = 0.0) -> np.ndarray:
    """Basis vector b(theta, phi) of length U at a single direction."""
    return basis_matrix(spec, theta, phi)[:, 0]


def basis_grad(spec: BasisSpec, theta: float, phi: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """(db/dtheta, db/dphi) at a single direction, ordered like :func:`basis_eval`."""
    d_theta, d_phi = basis_grad_matrix(spec, theta, phi)
    return d_theta[:, 0], d_phi[:, 0]
