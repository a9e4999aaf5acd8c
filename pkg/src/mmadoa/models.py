"""Continuous antenna-response models fitted to calibration data.

Two interpolation families are implemented:

* Wavefield modeling: the response (or the real gain) is expanded in an
  orthonormal basis, ``a(theta, phi) = G b(theta, phi)``, with the sampling
  matrix G solved by least squares from the calibration samples.
* Sectorized array interpolation: the field of view is split into overlapping
  sectors and each sector maps a virtual ideal array's steering vectors onto
  the measured response through a per-sector matrix H.

All least-squares solves go through an SVD-backed solver with a relative
singular-value cutoff of 1e-12 instead of forming explicit inverses.  Fitted
models are immutable and safe to evaluate concurrently.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .basis import (
    BasisKind,
    BasisSpec,
    basis_grad_matrix,
    basis_matrix,
)
from .calibration import CalibrationSet, CalibrationFormatError
from .errors import (
    FieldOfViewError,
    RankDeficiencyError,
    UnderdeterminedSectorError,
)

_LSTSQ_RCOND = 1e-12
_MAX_BASIS_CONDITION = 1e6  # cond(B B^H) = cond(B)^2 capped at 1e12

_MODEL_FILE_VERSION = 1


def truncation_order(kappa_rs: float, kind: BasisKind) -> int:
    """Rule-of-thumb coefficient count for a given wavenumber-radius product.

    The raw rules are 4*k*R + 1 for the circle families, 8(kR)^2 + 4kR + 1 for
    spherical harmonics and (4kR + 1)^2 for the 2D Fourier family; the result
    is rounded up to the nearest valid size for the kind.
    """
    if kappa_rs <= 0:
        raise ValueError(f"kappa_rs must be positive, got {kappa_rs}")
    kind = BasisKind(kind)
    if kind in (BasisKind.FOURIER_1D, BasisKind.REAL_FOURIER_1D):
        size = math.ceil(4.0 * kappa_rs + 1.0 - 1e-12)
        return size if size % 2 == 1 else size + 1
    if kind in (BasisKind.COMPLEX_SH, BasisKind.REAL_SH):
        target = 8.0 * kappa_rs**2 + 4.0 * kappa_rs + 1.0
        root = math.ceil(math.sqrt(target) - 1e-12)
        return root * root
    root = math.ceil(4.0 * kappa_rs + 1.0 - 1e-12)
    if root % 2 == 0:
        root += 1
    return root * root


def _solve_sampling(rows: np.ndarray, samples: np.ndarray, what: str) -> np.ndarray:
    """Minimize ||X @ rows - samples||_F over X with a stable factorization."""
    solution, _, rank, singular = np.linalg.lstsq(rows.T, samples.T, rcond=_LSTSQ_RCOND)
    if rank < rows.shape[0] or singular[0] > _MAX_BASIS_CONDITION * singular[-1]:
        raise RankDeficiencyError(
            f"{what}: system condition number exceeds 1e12 "
            f"(rank {rank} of {rows.shape[0]})"
        )
    return solution.T


# ---------------------------------------------------------------------------
# Wavefield models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WmModel:
    """Complex response model a(theta, phi) = sampling @ b(theta, phi)."""

    sampling: np.ndarray  # (ports, U) complex
    basis: BasisSpec
    slot: str = "co"

    def __post_init__(self):
        sampling = np.asarray(self.sampling, dtype=complex)
        object.__setattr__(self, "sampling", sampling)
        if sampling.ndim != 2 or sampling.shape[1] != self.basis.size:
            raise ValueError(
                f"sampling matrix shape {sampling.shape} does not match basis size {self.basis.size}"
            )

    @property
    def num_ports(self) -> int:
        return self.sampling.shape[0]

    @property
    def planar(self) -> bool:
        return self.basis.is_planar

    def response_matrix(self, theta, phi=None) -> np.ndarray:
        return self.sampling @ basis_matrix(self.basis, theta, phi)

    def response(self, theta: float, phi: float = 0.0) -> np.ndarray:
        return self.response_matrix(theta, phi)[:, 0]

    def response_grad(self, theta: float, phi: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
        d_theta, d_phi = basis_grad_matrix(self.basis, theta, phi)
        return self.sampling @ d_theta[:, 0], self.sampling @ d_phi[:, 0]


@dataclass(frozen=True)
class WmGainModel:
    """Real gain model g(theta, phi) = sampling @ b_r(theta, phi)."""

    sampling: np.ndarray  # (ports, U) real
    basis: BasisSpec

    def __post_init__(self):
        sampling = np.asarray(self.sampling, dtype=float)
        object.__setattr__(self, "sampling", sampling)
        if not self.basis.is_real:
            raise ValueError(f"gain models need a real basis, got {self.basis.kind.value}")
        if sampling.ndim != 2 or sampling.shape[1] != self.basis.size:
            raise ValueError(
                f"sampling matrix shape {sampling.shape} does not match basis size {self.basis.size}"
            )

    @property
    def num_ports(self) -> int:
        return self.sampling.shape[0]

    @property
    def planar(self) -> bool:
        return self.basis.is_planar

    def gain_matrix(self, theta, phi=None) -> np.ndarray:
        return self.sampling @ basis_matrix(self.basis, theta, phi)

    def gain(self, theta: float, phi: float = 0.0) -> np.ndarray:
        return self.gain_matrix(theta, phi)[:, 0]

    def gain_grad(self, theta: float, phi: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
        d_theta, d_phi = basis_grad_matrix(self.basis, theta, phi)
        return self.sampling @ d_theta[:, 0], self.sampling @ d_phi[:, 0]


@dataclass(frozen=True)
class DerivedGainModel:
    """Gain view |a|^2 of a complex response model (used for sector models)."""

    base: "WmModel | AitModel"

    @property
    def num_ports(self) -> int:
        return self.base.num_ports

    @property
    def planar(self) -> bool:
        return self.base.planar

    def gain_matrix(self, theta, phi=None) -> np.ndarray:
        return np.abs(self.base.response_matrix(theta, phi)) ** 2

    def gain(self, theta: float, phi: float = 0.0) -> np.ndarray:
        return np.abs(self.base.response(theta, phi)) ** 2

    def gain_grad(self, theta: float, phi: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
        a = self.base.response(theta, phi)
        d_theta, d_phi = self.base.response_grad(theta, phi)
        return 2.0 * np.real(np.conj(a) * d_theta), 2.0 * np.real(np.conj(a) * d_phi)


def _basis_points(cal: CalibrationSet, basis: BasisSpec):
    """Evaluation points (and duplicated samples) used to fit the basis.

    For the 2D Fourier family on full-sphere data the samples are mirrored
    onto the torus via a(2*pi - theta, phi + pi) = a(theta, phi) so the fitted
    function is periodic in both angles.
    """
    theta, phi = cal.grid.points()
    if cal.grid.is_planar:
        if not basis.is_planar:
            raise ValueError(
                f"{basis.kind.value} requires full-sphere calibration data, got a planar cut"
            )
        return theta, phi, slice(None)
    if basis.is_planar:
        raise ValueError(f"{basis.kind.value} requires a planar calibration cut")
    if basis.kind is BasisKind.FOURIER_2D:
        interior = (theta > 1e-12) & (theta < math.pi - 1e-12)
        mirror_theta = 2.0 * math.pi - theta[interior]
        mirror_phi = np.mod(phi[interior] + math.pi, 2.0 * math.pi)
        points_theta = np.concatenate([theta, mirror_theta])
        points_phi = np.concatenate([phi, mirror_phi])
        duplicate = np.concatenate([np.arange(theta.size), np.flatnonzero(interior)])
        return points_theta, points_phi, duplicate
    return theta, phi, slice(None)


def fit_wm(cal: CalibrationSet, basis: BasisSpec, slot: str = "co") -> WmModel:
    """Fit the wavefield sampling matrix by least squares over the grid."""
    samples = cal.samples(slot)
    num_ports, points = samples.shape
    if not num_ports <= basis.size <= points:
        raise ValueError(
            f"coefficient count must satisfy ports <= U <= samples; "
            f"got ports={num_ports}, U={basis.size}, samples={points}"
        )
    if basis.size > points // 4:
        warnings.warn(
            f"U={basis.size} is not small against the {points} grid samples; "
            "regular grids want U well below the sample count",
            stacklevel=2,
        )
    theta, phi, duplicate = _basis_points(cal, basis)
    rows = basis_matrix(basis, theta, phi)
    sampling = _solve_sampling(rows, samples[:, duplicate], "wavefield fit")
    return WmModel(sampling, basis, slot)


def fit_wm_gain(cal: CalibrationSet, basis: BasisSpec, slot: str = "co") -> WmGainModel:
    """Fit the real antenna gain |e|^2 with a real basis."""
    if not basis.is_real:
        raise ValueError(f"gain fits need a real basis kind, got {basis.kind.value}")
    gains = np.abs(cal.samples(slot)) ** 2
    num_ports, points = gains.shape
    if not num_ports <= basis.size <= points:
        raise ValueError(
            f"coefficient count must satisfy ports <= U <= samples; "
            f"got ports={num_ports}, U={basis.size}, samples={points}"
        )
    theta, phi, duplicate = _basis_points(cal, basis)
    rows = basis_matrix(basis, theta, phi)
    sampling = _solve_sampling(rows, gains[:, duplicate], "gain fit")
    return WmGainModel(sampling, basis)


def grid_residual(model, cal: CalibrationSet, slot: str = "co") -> tuple[float, float]:
    """(max, rms) absolute interpolation residual over the calibration grid."""
    theta, phi = cal.grid.points()
    if cal.grid.is_planar:
        predicted = model.response_matrix(theta)
    else:
        predicted = model.response_matrix(theta, phi)
    residual = np.abs(predicted - cal.samples(slot))
    return float(residual.max()), float(np.sqrt(np.mean(residual**2)))


# ---------------------------------------------------------------------------
# Ideal arrays and sectorized interpolation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UlaGeometry:
    """Virtual uniform linear array along the x axis."""

    num_elements: int
    spacing_m: float

    @property
    def size(self) -> int:
        return self.num_elements


@dataclass(frozen=True)
class UraGeometry:
    """Virtual uniform rectangular array in the x-y plane."""

    num_x: int
    num_y: int
    spacing_m: float

    @property
    def size(self) -> int:
        return self.num_x * self.num_y


def ideal_ula(num_elements: int, spacing_m: float, wavelength_m: float, theta) -> np.ndarray:
    """ULA steering vector(s); element m carries phase 2*pi/lambda (m-1) d sin(theta)."""
    if spacing_m <= 0:
        raise ValueError("element spacing must be positive")
    theta = np.asarray(theta, dtype=float)
    phase = (2.0 * math.pi / wavelength_m) * spacing_m * np.sin(theta)
    elements = np.arange(num_elements)
    return np.exp(1j * np.multiply.outer(elements, phase))


def _ula_dtheta(num_elements, spacing_m, wavelength_m, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    rate = (2.0 * math.pi / wavelength_m) * spacing_m * np.cos(theta)
    elements = np.arange(num_elements)
    return 1j * np.multiply.outer(elements, rate) * ideal_ula(
        num_elements, spacing_m, wavelength_m, theta
    )


def ideal_ura(num_x: int, num_y: int, spacing_m: float, wavelength_m: float, theta, phi) -> np.ndarray:
    """URA steering vector(s) as the Kronecker product a_x (outer) x a_y."""
    if spacing_m <= 0:
        raise ValueError("element spacing must be positive")
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    scale = 2.0 * math.pi / wavelength_m * spacing_m
    ax = np.exp(1j * scale * np.multiply.outer(np.arange(num_x), np.sin(theta) * np.cos(phi)))
    ay = np.exp(1j * scale * np.multiply.outer(np.arange(num_y), np.sin(theta) * np.sin(phi)))
    return (ax[:, None, ...] * ay[None, :, ...]).reshape((num_x * num_y,) + theta.shape)


def _ura_grad(num_x, num_y, spacing_m, wavelength_m, theta, phi):
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    scale = 2.0 * math.pi / wavelength_m * spacing_m
    mx = np.arange(num_x)
    my = np.arange(num_y)
    ax = np.exp(1j * scale * np.multiply.outer(mx, np.sin(theta) * np.cos(phi)))
    ay = np.exp(1j * scale * np.multiply.outer(my, np.sin(theta) * np.sin(phi)))
    dax_t = 1j * scale * np.multiply.outer(mx, np.cos(theta) * np.cos(phi)) * ax
    day_t = 1j * scale * np.multiply.outer(my, np.cos(theta) * np.sin(phi)) * ay
    dax_p = 1j * scale * np.multiply.outer(mx, -np.sin(theta) * np.sin(phi)) * ax
    day_p = 1j * scale * np.multiply.outer(my, np.sin(theta) * np.cos(phi)) * ay
    shape = (num_x * num_y,) + theta.shape
    d_theta = (dax_t[:, None, ...] * ay[None, :, ...] + ax[:, None, ...] * day_t[None, :, ...]).reshape(shape)
    d_phi = (dax_p[:, None, ...] * ay[None, :, ...] + ax[:, None, ...] * day_p[None, :, ...]).reshape(shape)
    return d_theta, d_phi


@dataclass(frozen=True)
class Sector:
    """One sector of an AIT model: center angles, half-widths and mapping H."""

    center_theta: float
    half_width_theta: float
    mapping: np.ndarray  # (ports, virtual elements)
    center_phi: float = 0.0
    half_width_phi: float = 0.0


@dataclass(frozen=True)
class AitModel:
    """Sectorized linear mapping from a virtual ideal array to the antenna."""

    sectors: tuple
    geometry: "UlaGeometry | UraGeometry"
    wavelength_m: float
    planar: bool

    @property
    def num_ports(self) -> int:
        return self.sectors[0].mapping.shape[0]

    def _steering(self, theta, phi):
        if isinstance(self.geometry, UlaGeometry):
            return ideal_ula(self.geometry.num_elements, self.geometry.spacing_m, self.wavelength_m, theta)
        return ideal_ura(
            self.geometry.num_x, self.geometry.num_y, self.geometry.spacing_m, self.wavelength_m, theta, phi
        )

    def _steering_grad(self, theta, phi):
        if isinstance(self.geometry, UlaGeometry):
            d_theta = _ula_dtheta(
                self.geometry.num_elements, self.geometry.spacing_m, self.wavelength_m, theta
            )
            return d_theta, np.zeros_like(d_theta)
        return _ura_grad(
            self.geometry.num_x, self.geometry.num_y, self.geometry.spacing_m, self.wavelength_m, theta, phi
        )

    def select_sector(self, theta: float, phi: float = 0.0) -> Sector:
        """Sector whose center is nearest; ties resolve to the lower center."""
        best = None
        best_dist = math.inf
        margin = 1e-9
        for sector in self.sectors:
            d_theta = abs(theta - sector.center_theta)
            if self.planar:
                dist = d_theta
            else:
                d_phi = abs(math.remainder(phi - sector.center_phi, 2.0 * math.pi))
                dist = math.hypot(d_theta, d_phi)
            if dist < best_dist - margin:
                best, best_dist = sector, dist
        if best is None:
            raise FieldOfViewError("sector model has no sectors")
        inside = abs(theta - best.center_theta) <= best.half_width_theta + 1e-9
        if not self.planar:
            d_phi = abs(math.remainder(phi - best.center_phi, 2.0 * math.pi))
            inside = inside and d_phi <= best.half_width_phi + 1e-9
        if not inside:
            raise FieldOfViewError(
                f"direction (theta={theta:.4f}, phi={phi:.4f}) lies outside the sector layout"
            )
        return best

    def response(self, theta: float, phi: float = 0.0) -> np.ndarray:
        sector = self.select_sector(theta, phi)
        return sector.mapping @ self._steering(np.float64(theta), np.float64(phi))

    def response_matrix(self, theta, phi=None) -> np.ndarray:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        phi = np.zeros_like(theta) if phi is None else np.broadcast_to(np.asarray(phi, float), theta.shape)
        out = np.empty((self.num_ports, theta.size), dtype=complex)
        for k in range(theta.size):
            out[:, k] = self.response(float(theta[k]), float(phi[k]))
        return out

    def response_grad(self, theta: float, phi: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
        sector = self.select_sector(theta, phi)
        d_theta, d_phi = self._steering_grad(np.float64(theta), np.float64(phi))
        return sector.mapping @ d_theta, sector.mapping @ d_phi


def _sector_centers(low: float, high: float, width: float, stride: float) -> list[float]:
    centers = []
    center = low + width / 2.0
    last = high - width / 2.0
    while center < last - 1e-9:
        centers.append(center)
        center += stride
    centers.append(last)
    return centers


def _wrapped_centers(stride: float) -> list[float]:
    count = max(1, round(2.0 * math.pi / stride))
    return [k * (2.0 * math.pi / count) for k in range(count)]


def fit_ait(
    cal: CalibrationSet,
    sector_width_deg: float = 30.0,
    overlap_deg: float = 15.0,
    geometry=None,
    fov_deg=None,
) -> AitModel:
    """Fit per-sector interpolation matrices against a virtual ideal array.

    Planar cuts use a ULA with as many virtual elements as antenna ports and
    quarter-wavelength spacing; full-sphere data uses a 2x2 URA with
    rectangular inclination-azimuth sectors (azimuth sectors wrap around the
    circle).  Virtual element positions are fixed, never optimized.
    """
    if not 0 <= overlap_deg < sector_width_deg:
        raise ValueError("overlap must be non-negative and smaller than the sector width")
    width = math.radians(sector_width_deg)
    stride = math.radians(sector_width_deg - overlap_deg)
    wavelength = cal.wavelength_m
    planar = cal.grid.is_planar
    if geometry is None:
        geometry = (
            UlaGeometry(cal.num_ports, wavelength / 4.0)
            if planar
            else UraGeometry(2, 2, wavelength / 4.0)
        )
    samples = cal.co
    theta_q, phi_q = cal.grid.points()

    sectors = []
    if planar:
        low, high = (math.radians(f) for f in (fov_deg or (-90.0, 90.0)))
        for center in _sector_centers(low, high, width, stride):
            mask = np.abs(theta_q - center) <= width / 2.0 + 1e-9
            sectors.append(
                _solve_sector(samples, mask, geometry, wavelength, theta_q, phi_q, center, width / 2.0)
            )
    else:
        theta_low, theta_high = (math.radians(f) for f in (fov_deg or (0.0, 90.0)))
        for center_theta in _sector_centers(theta_low, theta_high, width, stride):
            for center_phi in _wrapped_centers(stride):
                d_phi = np.abs(np.remainder(phi_q - center_phi + math.pi, 2.0 * math.pi) - math.pi)
                mask = (np.abs(theta_q - center_theta) <= width / 2.0 + 1e-9) & (
                    d_phi <= width / 2.0 + 1e-9
                )
                sectors.append(
                    _solve_sector(
                        samples, mask, geometry, wavelength, theta_q, phi_q,
                        center_theta, width / 2.0, center_phi, width / 2.0,
                    )
                )
    return AitModel(tuple(sectors), geometry, wavelength, planar)


def _solve_sector(
    samples, mask, geometry, wavelength, theta_q, phi_q,
    center_theta, half_theta, center_phi=0.0, half_phi=0.0,
) -> Sector:
    count = int(mask.sum())
    if count < geometry.size:
        raise UnderdeterminedSectorError(
            f"sector at theta={math.degrees(center_theta):.1f} deg holds {count} samples "
            f"for {geometry.size} virtual elements"
        )
    if isinstance(geometry, UlaGeometry):
        steering = ideal_ula(geometry.num_elements, geometry.spacing_m, wavelength, theta_q[mask])
    else:
        steering = ideal_ura(
            geometry.num_x, geometry.num_y, geometry.spacing_m, wavelength, theta_q[mask], phi_q[mask]
        )
    try:
        mapping = _solve_sampling(steering, samples[:, mask], "sector fit")
    except RankDeficiencyError as exc:
        raise RankDeficiencyError(
            f"sector at theta={math.degrees(center_theta):.1f} deg: {exc}"
        ) from exc
    return Sector(center_theta, half_theta, mapping, center_phi, half_phi)


# ---------------------------------------------------------------------------
# Polarimetric combination
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolarizationState:
    """Polarization-ellipse parameters: auxiliary angle gamma and phase beta."""

    gamma: float
    beta: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.gamma <= math.pi / 2.0:
            raise ValueError(f"gamma must lie in [0, pi/2], got {self.gamma}")
        if not -math.pi <= self.beta < math.pi + 1e-12:
            raise ValueError(f"beta must lie in [-pi, pi), got {self.beta}")


@dataclass(frozen=True)
class PolarimetricModel:
    """Pair of co-/cross-polarized response models of the same kind."""

    co: "WmModel | AitModel"
    cross: "WmModel | AitModel"

    def __post_init__(self):
        if type(self.co) is not type(self.cross):
            raise ValueError("co and cross models must be of the same kind")
        if self.co.num_ports != self.cross.num_ports:
            raise ValueError("co and cross models must share the port count")
        if self.co.planar != self.cross.planar:
            raise ValueError("co and cross models must share the manifold")

    @property
    def num_ports(self) -> int:
        return self.co.num_ports

    @property
    def planar(self) -> bool:
        return self.co.planar

    def response(self, theta: float, phi: float, gamma: float, beta: float) -> np.ndarray:
        return (
            math.sin(gamma) * np.exp(1j * beta) * self.co.response(theta, phi)
            + math.cos(gamma) * self.cross.response(theta, phi)
        )

    def response_grad(self, theta: float, phi: float, gamma: float, beta: float):
        """Partial derivatives with respect to (theta, phi, gamma, beta)."""
        a_co = self.co.response(theta, phi)
        a_cross = self.cross.response(theta, phi)
        dco_t, dco_p = self.co.response_grad(theta, phi)
        dcr_t, dcr_p = self.cross.response_grad(theta, phi)
        pol = math.sin(gamma) * np.exp(1j * beta)
        d_theta = pol * dco_t + math.cos(gamma) * dcr_t
        d_phi = pol * dco_p + math.cos(gamma) * dcr_p
        d_gamma = math.cos(gamma) * np.exp(1j * beta) * a_co - math.sin(gamma) * a_cross
        d_beta = 1j * pol * a_co
        return d_theta, d_phi, d_gamma, d_beta


def fit_polarimetric_wm(cal: CalibrationSet, basis: BasisSpec) -> PolarimetricModel:
    """Fit co- and cross-polarized wavefield models with a shared basis."""
    return PolarimetricModel(fit_wm(cal, basis, "co"), fit_wm(cal, basis, "cross"))


# ---------------------------------------------------------------------------
# Free-function evaluation API
# ---------------------------------------------------------------------------


def eval_response(model, theta: float, phi: float = 0.0) -> np.ndarray:
    """Continuous complex response of a fitted model at one direction."""
    return model.response(theta, phi)


def eval_response_grad(model, theta: float, phi: float = 0.0):
    """(d/dtheta, d/dphi) of the continuous response at one direction."""
    return model.response_grad(theta, phi)


def eval_polarimetric(pm: PolarimetricModel, theta: float, phi: float, pol: PolarizationState):
    """Polarimetric response and its four partials (theta, phi, gamma, beta)."""
    value = pm.response(theta, phi, pol.gamma, pol.beta)
    return value, pm.response_grad(theta, phi, pol.gamma, pol.beta)


# ---------------------------------------------------------------------------
# Model persistence
# ---------------------------------------------------------------------------


def _complex_to_pairs(matrix: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(matrix, complex)]


def _pairs_to_complex(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise CalibrationFormatError("expected a nested [re, im] matrix")
    return arr[..., 0] + 1j * arr[..., 1]


def _model_payload(model) -> dict:
    if isinstance(model, WmModel):
        return {
            "type": "wm",
            "basis": {"kind": model.basis.kind.value, "size": model.basis.size},
            "slot": model.slot,
            "sampling": _complex_to_pairs(model.sampling),
        }
    if isinstance(model, WmGainModel):
        return {
            "type": "wm-gain",
            "basis": {"kind": model.basis.kind.value, "size": model.basis.size},
            "sampling": [[float(v) for v in row] for row in model.sampling],
        }
    if isinstance(model, AitModel):
        geometry = model.geometry
        if isinstance(geometry, UlaGeometry):
            geo = {"kind": "ula", "num_elements": geometry.num_elements, "spacing_m": geometry.spacing_m}
        else:
            geo = {
                "kind": "ura",
                "num_x": geometry.num_x,
                "num_y": geometry.num_y,
                "spacing_m": geometry.spacing_m,
            }
        return {
            "type": "ait",
            "wavelength_m": model.wavelength_m,
            "planar": model.planar,
            "geometry": geo,
            "sectors": [
                {
                    "center_theta": s.center_theta,
                    "half_width_theta": s.half_width_theta,
                    "center_phi": s.center_phi,
                    "half_width_phi": s.half_width_phi,
                    "mapping": _complex_to_pairs(s.mapping),
                }
                for s in model.sectors
            ],
        }
    if isinstance(model, PolarimetricModel):
        return {
            "type": "polarimetric",
            "co": _model_payload(model.co),
            "cross": _model_payload(model.cross),
        }
    raise TypeError(f"cannot serialize model of type {type(model).__name__}")


def save_model(model, path) -> None:
    """Write a fitted model as versioned JSON."""
    payload = {"format_version": _MODEL_FILE_VERSION}
    payload.update(_model_payload(model))
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=1)
        handle.write("\n")


def _model_from_payload(data: dict):
    kind = data.get("type")
    if kind == "wm":
        basis = BasisSpec(BasisKind(data["basis"]["kind"]), int(data["basis"]["size"]))
        return WmModel(_pairs_to_complex(data["sampling"]), basis, data.get("slot", "co"))
    if kind == "wm-gain":
        basis = BasisSpec(BasisKind(data["basis"]["kind"]), int(data["basis"]["size"]))
        return WmGainModel(np.asarray(data["sampling"], dtype=float), basis)
    if kind == "ait":
        geo = data["geometry"]
        if geo["kind"] == "ula":
            geometry = UlaGeometry(int(geo["num_elements"]), float(geo["spacing_m"]))
        elif geo["kind"] == "ura":
            geometry = UraGeometry(int(geo["num_x"]), int(geo["num_y"]), float(geo["spacing_m"]))
        else:
            raise CalibrationFormatError(f"unknown geometry kind {geo.get('kind')!r}")
        sectors = tuple(
            Sector(
                float(s["center_theta"]),
                float(s["half_width_theta"]),
                _pairs_to_complex(s["mapping"]),
                float(s.get("center_phi", 0.0)),
                float(s.get("half_width_phi", 0.0)),
            )
            for s in data["sectors"]
        )
        return AitModel(sectors, geometry, float(data["wavelength_m"]), bool(data["planar"]))
    if kind == "polarimetric":
        return PolarimetricModel(_model_from_payload(data["co"]), _model_from_payload(data["cross"]))
    raise CalibrationFormatError(f"unknown model type {kind!r}")


def load_model(path):
    """Read a model written by :func:`save_model`."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except json.JSONDecodeError as exc:
        raise CalibrationFormatError(f"{path}: invalid JSON: {exc.msg}") from exc
    if data.get("format_version") != _MODEL_FILE_VERSION:
        raise CalibrationFormatError(f"{path}: unsupported model format version")
    try:
        return _model_from_payload(data)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, CalibrationFormatError):
            raise
        raise CalibrationFormatError(f"{path}: {exc}") from exc
