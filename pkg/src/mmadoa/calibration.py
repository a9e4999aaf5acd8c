"""Discrete antenna calibration data and synthetic band-limited antennas.

A calibration set holds complex co- and cross-polarized port responses sampled
on a regular direction grid, enumerated inclination-major.  Two grid modes
exist: the full sphere (inclination x azimuth) and a planar x-z-plane cut
where the single angle runs over the full circle [-pi, pi).

Since no measured multi-port pattern ships with the package, the
:func:`synth_antenna` generator draws band-limited antennas from a
spherical-harmonic expansion with per-degree decaying random coefficients.
The generator returns both the discrete samples and the continuous
ground-truth expansion, so fitted models can be checked against an exact
oracle.

Randomness comes from numpy's PCG64 generator, which is seedable and
platform-stable; all draws happen in a fixed documented order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .basis import BasisKind, BasisSpec, basis_matrix, sh_index
from .errors import CalibrationFormatError

SPEED_OF_LIGHT = 299792458.0

MODE_SPHERE = "full-sphere-3d"
MODE_CUT = "xz-cut-2d"

_FILE_VERSION = 1


def cut_to_sphere(angle) -> tuple[np.ndarray, np.ndarray]:
    """Map x-z-plane cut angles in [-pi, pi) to sphere coordinates.

    Non-negative angles lie at azimuth 0, negative ones at azimuth pi, so the
    cut angle t satisfies x = sin(t), z = cos(t).
    """
    angle = np.asarray(angle, dtype=float)
    theta = np.abs(angle)
    phi = np.where(angle < 0.0, math.pi, 0.0)
    return theta, phi


@dataclass(frozen=True)
class CalibrationGrid:
    """Regular direction grid; angles stored in radians, inclination-major."""

    theta_start: float
    theta_step: float
    theta_count: int
    phi_start: float = 0.0
    phi_step: float = 0.0
    phi_count: int = 1

    def __post_init__(self):
        if self.theta_count < 1 or self.phi_count < 1:
            raise ValueError("grid counts must be positive")
        if self.theta_count > 1 and self.theta_step <= 0:
            raise ValueError("theta_step must be positive")
        if self.phi_count > 1 and self.phi_step <= 0:
            raise ValueError("phi_step must be positive")

    @property
    def point_count(self) -> int:
        return self.theta_count * self.phi_count

    @property
    def is_planar(self) -> bool:
        return self.phi_count == 1

    @property
    def thetas(self) -> np.ndarray:
        return self.theta_start + self.theta_step * np.arange(self.theta_count)

    @property
    def phis(self) -> np.ndarray:
        return self.phi_start + self.phi_step * np.arange(self.phi_count)

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        """All grid directions, enumerated q = i_theta * phi_count + i_phi."""
        theta = np.repeat(self.thetas, self.phi_count)
        phi = np.tile(self.phis, self.theta_count)
        return theta, phi

    def to_dict(self) -> dict:
        return {
            "theta_start_deg": math.degrees(self.theta_start),
            "theta_step_deg": math.degrees(self.theta_step),
            "theta_count": self.theta_count,
            "phi_start_deg": math.degrees(self.phi_start),
            "phi_step_deg": math.degrees(self.phi_step),
            "phi_count": self.phi_count,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CalibrationGrid":
        try:
            return cls(
                theta_start=math.radians(float(data["theta_start_deg"])),
                theta_step=math.radians(float(data["theta_step_deg"])),
                theta_count=int(data["theta_count"]),
                phi_start=math.radians(float(data.get("phi_start_deg", 0.0))),
                phi_step=math.radians(float(data.get("phi_step_deg", 0.0))),
                phi_count=int(data.get("phi_count", 1)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CalibrationFormatError(f"invalid grid block: {exc}") from exc

    @classmethod
    def full_sphere(cls, step_deg: float) -> "CalibrationGrid":
        step = math.radians(step_deg)
        theta_count = round(180.0 / step_deg) + 1
        phi_count = round(360.0 / step_deg)
        return cls(0.0, step, theta_count, 0.0, step, phi_count)

    @classmethod
    def xz_cut(cls, step_deg: float) -> "CalibrationGrid":
        step = math.radians(step_deg)
        count = round(360.0 / step_deg)
        return cls(-math.pi, step, count)


@dataclass(frozen=True)
class CalibrationSet:
    """Sampled co-/cross-polarized responses of an M-port antenna."""

    grid: CalibrationGrid
    co: np.ndarray
    cross: np.ndarray
    carrier_frequency_hz: float
    enclosing_radius_m: float

    def __post_init__(self):
        co = np.asarray(self.co, dtype=complex)
        cross = np.asarray(self.cross, dtype=complex)
        object.__setattr__(self, "co", co)
        object.__setattr__(self, "cross", cross)
        if co.ndim != 2 or co.shape != cross.shape:
            raise CalibrationFormatError(
                f"co and cross must share shape (ports, points); got {co.shape} vs {cross.shape}"
            )
        if co.shape[1] != self.grid.point_count:
            raise CalibrationFormatError(
                f"sample count {co.shape[1]} does not match grid size {self.grid.point_count}"
            )
        if not (np.all(np.isfinite(co.view(float))) and np.all(np.isfinite(cross.view(float)))):
            raise CalibrationFormatError("calibration samples must be finite")
        if self.carrier_frequency_hz <= 0 or self.enclosing_radius_m <= 0:
            raise CalibrationFormatError("carrier frequency and enclosing radius must be positive")

    @property
    def num_ports(self) -> int:
        return self.co.shape[0]

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency_hz

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength_m

    @property
    def kappa_rs(self) -> float:
        return self.wavenumber * self.enclosing_radius_m

    def samples(self, slot: str) -> np.ndarray:
        if slot == "co":
            return self.co
        if slot == "cross":
            return self.cross
        raise ValueError(f"unknown polarization slot {slot!r}")


def gain_of(cal: CalibrationSet, port: int, point: int) -> float:
    """Reference-polarization gain |co[port, point]|^2 (0-based indices)."""
    if not 0 <= port < cal.num_ports:
        raise IndexError(f"port {port} out of range for {cal.num_ports} ports")
    if not 0 <= point < cal.grid.point_count:
        raise IndexError(f"point {point} out of range for {cal.grid.point_count} points")
    return float(abs(cal.co[port, point]) ** 2)


# ---------------------------------------------------------------------------
# File format
# ---------------------------------------------------------------------------


def _matrix_to_pairs(matrix: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in matrix]


def _pairs_to_row(pairs, expected: int, context: str) -> np.ndarray:
    if len(pairs) != expected:
        raise CalibrationFormatError(f"{context}: expected {expected} entries, got {len(pairs)}")
    row = np.empty(expected, dtype=complex)
    for i, pair in enumerate(pairs):
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise CalibrationFormatError(f"{context}, entry {i}: expected [re, im]")
        row[i] = complex(float(pair[0]), float(pair[1]))
    if not np.all(np.isfinite(row.view(float))):
        raise CalibrationFormatError(f"{context}: non-finite sample value")
    return row


def save_calibration(cal: CalibrationSet, path) -> None:
    """Write a calibration set as versioned JSON text."""
    payload = {
        "version": _FILE_VERSION,
        "frequency_hz": float(cal.carrier_frequency_hz),
        "num_ports": cal.num_ports,
        "enclosing_radius_m": float(cal.enclosing_radius_m),
        "grid": cal.grid.to_dict(),
        "ports": [
            {"co": _matrix_to_pairs(cal.co[m : m + 1])[0], "cross": _matrix_to_pairs(cal.cross[m : m + 1])[0]}
            for m in range(cal.num_ports)
        ],
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=1)
        handle.write("\n")


def load_calibration(path) -> CalibrationSet:
    """Read a calibration set written by :func:`save_calibration`."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except json.JSONDecodeError as exc:
        raise CalibrationFormatError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise CalibrationFormatError(f"{path}: top level must be an object")
    version = data.get("version")
    if version != _FILE_VERSION:
        raise CalibrationFormatError(f"{path}: unsupported file version {version!r}")
    try:
        num_ports = int(data["num_ports"])
        frequency = float(data["frequency_hz"])
        radius = float(data["enclosing_radius_m"])
        grid = CalibrationGrid.from_dict(data["grid"])
        ports = data["ports"]
    except (KeyError, TypeError, ValueError) as exc:
        raise CalibrationFormatError(f"{path}: {exc}") from exc
    if not isinstance(ports, list) or len(ports) != num_ports:
        raise CalibrationFormatError(
            f"{path}: expected {num_ports} port blocks, got {len(ports) if isinstance(ports, list) else type(ports)}"
        )
    q = grid.point_count
    co = np.empty((num_ports, q), dtype=complex)
    cross = np.empty((num_ports, q), dtype=complex)
    for m, block in enumerate(ports):
        if not isinstance(block, dict) or "co" not in block or "cross" not in block:
            raise CalibrationFormatError(f"{path}: port {m}: expected co/cross arrays")
        co[m] = _pairs_to_row(block["co"], q, f"{path}: port {m} co")
        cross[m] = _pairs_to_row(block["cross"], q, f"{path}: port {m} cross")
    return CalibrationSet(grid, co, cross, frequency, radius)


# ---------------------------------------------------------------------------
# Synthetic antennas
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SyntheticAntennaTruth:
    """Continuous ground truth behind a synthetic calibration set.

    The response of port m is exactly ``sampling[m] @ b(theta, phi)`` for the
    stored spherical-harmonic basis, so the truth doubles as an oracle for
    fitted models.  In planar mode the single angle is interpreted as the
    x-z-plane cut angle and mapped onto the sphere internally.
    """

    sampling_co: np.ndarray
    sampling_cross: np.ndarray
    basis: BasisSpec
    seed: int
    mode: str = MODE_SPHERE

    @property
    def num_ports(self) -> int:
        return self.sampling_co.shape[0]

    @property
    def planar(self) -> bool:
        return self.mode == MODE_CUT

    def sampling(self, slot: str) -> np.ndarray:
        if slot == "co":
            return self.sampling_co
        if slot == "cross":
            return self.sampling_cross
        raise ValueError(f"unknown polarization slot {slot!r}")

    def _directions(self, theta, phi):
        if self.planar:
            return cut_to_sphere(theta)
        return theta, phi

    def response_matrix(self, theta, phi=None, slot: str = "co") -> np.ndarray:
        theta_s, phi_s = self._directions(theta, phi)
        return self.sampling(slot) @ basis_matrix(self.basis, theta_s, phi_s)

    def response(self, theta: float, phi: float = 0.0, slot: str = "co") -> np.ndarray:
        return self.response_matrix(theta, phi, slot)[:, 0]

    def gain(self, theta: float, phi: float = 0.0) -> np.ndarray:
        return np.abs(self.response(theta, phi, "co")) ** 2


def _mirror_symmetrize(sampling: np.ndarray, degree: int) -> np.ndarray:
    """Impose a(theta, phi + pi) = conj(a(theta, phi)) on an SH expansion.

    Requires real coefficients for order 0 and G[l, -m] = conj(G[l, m])
    otherwise; the resulting gain pattern is exactly symmetric under the
    azimuth half-turn while the phase response still distinguishes the mirror
    directions.
    """
    out = sampling.copy()
    for l in range(degree + 1):
        out[:, sh_index(l, 0)] = math.sqrt(2.0) * out[:, sh_index(l, 0)].real
        for m in range(1, l + 1):
            out[:, sh_index(l, -m)] = np.conj(out[:, sh_index(l, m)])
    return out


def _draw_complex(rng: np.random.Generator, shape) -> np.ndarray:
    parts = rng.standard_normal(size=shape + (2,))
    return (parts[..., 0] + 1j * parts[..., 1]) / math.sqrt(2.0)


def synth_antenna(
    seed: int,
    num_ports: int,
    degree: int,
    mode: str = MODE_SPHERE,
    grid_step_deg: float = 5.0,
    *,
    carrier_frequency_hz: float = 7.25e9,
    symmetry: str = "none",
    asymmetry: float = 0.0,
) -> tuple[CalibrationSet, SyntheticAntennaTruth]:
    """Generate a band-limited multi-port antenna and its sampled calibration.

    Coefficients of degree l are i.i.d. complex Gaussian scaled by exp(-l/2),
    and each port is normalized to unit mean co-polarized gain over the grid.
    With ``symmetry="gain-mirror"`` the gain pattern is made symmetric under
    the azimuth half-turn (even in the cut angle for planar grids); a nonzero
    ``asymmetry`` adds that fraction of an unconstrained draw back on top, to
    break the mirror symmetry by a controlled amount.

    The enclosing radius is chosen such that the wavenumber-radius product is
    degree/2, so truncation-rule fitting orders bracket the truth.
    """
    if num_ports < 2:
        raise ValueError(f"num_ports must be at least 2, got {num_ports}")
    if degree < 2:
        raise ValueError(f"degree must be at least 2, got {degree}")
    if mode not in (MODE_SPHERE, MODE_CUT):
        raise ValueError(f"unknown mode {mode!r}")
    if symmetry not in ("none", "gain-mirror"):
        raise ValueError(f"unknown symmetry {symmetry!r}")
    if asymmetry < 0.0:
        raise ValueError("asymmetry must be non-negative")

    size = (degree + 1) ** 2
    spec = BasisSpec(BasisKind.COMPLEX_SH, size)
    rng = np.random.Generator(np.random.PCG64(seed))
    # Fixed draw order: co, cross, then the optional asymmetry pair.
    sampling_co = _draw_complex(rng, (num_ports, size))
    sampling_cross = _draw_complex(rng, (num_ports, size))
    if symmetry == "gain-mirror":
        sampling_co = _mirror_symmetrize(sampling_co, degree)
        sampling_cross = _mirror_symmetrize(sampling_cross, degree)
        if asymmetry > 0.0:
            sampling_co = sampling_co + asymmetry * _draw_complex(rng, (num_ports, size))
            sampling_cross = sampling_cross + asymmetry * _draw_complex(rng, (num_ports, size))

    decay = np.empty(size)
    for u in range(size):
        l = math.isqrt(u)
        decay[u] = math.exp(-l / 2.0)
    sampling_co = sampling_co * decay
    sampling_cross = sampling_cross * decay

    if mode == MODE_SPHERE:
        grid = CalibrationGrid.full_sphere(grid_step_deg)
        theta_q, phi_q = grid.points()
    else:
        grid = CalibrationGrid.xz_cut(grid_step_deg)
        theta_q, phi_q = cut_to_sphere(grid.thetas)

    b = basis_matrix(spec, theta_q, phi_q)
    co = sampling_co @ b
    cross = sampling_cross @ b
    scale = 1.0 / np.sqrt(np.mean(np.abs(co) ** 2, axis=1))
    sampling_co = sampling_co * scale[:, None]
    sampling_cross = sampling_cross * scale[:, None]
    co = co * scale[:, None]
    cross = cross * scale[:, None]

    wavelength = SPEED_OF_LIGHT / carrier_frequency_hz
    radius = (degree / 2.0) * wavelength / (2.0 * math.pi)
    cal = CalibrationSet(grid, co, cross, carrier_frequency_hz, radius)
    truth = SyntheticAntennaTruth(sampling_co, sampling_cross, spec, int(seed), mode)
    return cal, truth
