"""Snapshot generation and the received-signal-strength statistics.

The narrowband model is r(n) = A s(n) + w(n) with i.i.d. circular complex
Gaussian noise of power sigma^2 per port (split evenly between real and
imaginary parts).  Waveforms are either unit-modulus random-phase symbols, for
which the configured power equals the realized time-average power exactly, or
circular complex Gaussian symbols.

The non-coherent receiver observes only the per-port time-averaged power.
For large snapshot counts that statistic is approximately Gaussian; its exact
mean and variance, derived from the noncentral chi-squared distribution of the
scaled power sum, are provided by :func:`rss_moments`.

All randomness is drawn from numpy's seedable, platform-stable PCG64 stream in
a fixed order (waveforms first, then noise).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .models import PolarimetricModel, PolarizationState

WAVEFORM_UNIT_MODULUS = "unit-modulus"
WAVEFORM_GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class Scenario:
    """P plane waves impinging on the antenna plus receiver noise.

    ``directions`` is a (P, 2) array of (inclination, azimuth) in radians; for
    planar models the first column holds the x-z-cut angle in [-pi, pi) and
    the second column is ignored.
    """

    directions: np.ndarray
    powers_w: np.ndarray
    snapshots: int
    noise_power_w: float
    polarizations: tuple = None
    waveform: str = WAVEFORM_UNIT_MODULUS

    def __post_init__(self):
        directions = np.atleast_2d(np.asarray(self.directions, dtype=float))
        if directions.shape[1] == 1:
            directions = np.hstack([directions, np.zeros_like(directions)])
        if directions.ndim != 2 or directions.shape[1] != 2:
            raise ValueError("directions must have shape (P, 2)")
        powers = np.atleast_1d(np.asarray(self.powers_w, dtype=float))
        object.__setattr__(self, "directions", directions)
        object.__setattr__(self, "powers_w", powers)
        if powers.shape != (directions.shape[0],):
            raise ValueError("one power per signal required")
        if np.any(powers <= 0):
            raise ValueError("signal powers must be positive")
        if self.snapshots < 1:
            raise ValueError("snapshot count must be at least 1")
        if self.noise_power_w < 0:
            raise ValueError("noise power must be non-negative")
        if self.polarizations is not None:
            pol = tuple(self.polarizations)
            if len(pol) != directions.shape[0]:
                raise ValueError("one polarization state per signal required")
            if not all(isinstance(p, PolarizationState) for p in pol):
                raise ValueError("polarizations must be PolarizationState instances")
            object.__setattr__(self, "polarizations", pol)
        if self.waveform not in (WAVEFORM_UNIT_MODULUS, WAVEFORM_GAUSSIAN):
            raise ValueError(f"unknown waveform kind {self.waveform!r}")

    @property
    def num_signals(self) -> int:
        return self.directions.shape[0]

    @property
    def snr(self) -> np.ndarray:
        """Per-signal SNR relative to an isotropic unit-gain antenna."""
        return self.powers_w / self.noise_power_w

    @classmethod
    def single(
        cls,
        theta: float,
        phi: float = 0.0,
        *,
        power_w: float = 1.0,
        snapshots: int = 1000,
        noise_power_w: float = 0.0,
        polarization: PolarizationState = None,
        waveform: str = WAVEFORM_UNIT_MODULUS,
    ) -> "Scenario":
        pol = (polarization,) if polarization is not None else None
        return cls(
            np.array([[theta, phi]]), np.array([power_w]), snapshots, noise_power_w, pol, waveform
        )


@dataclass(frozen=True)
class SnapshotBlock:
    """One simulated block of baseband samples, (ports, snapshots)."""

    samples: np.ndarray
    scenario: Scenario
    seed: object
    waveforms: np.ndarray  # realized (signals, snapshots) symbols


def _response_columns(scenario: Scenario, model) -> np.ndarray:
    columns = []
    for p in range(scenario.num_signals):
        theta, phi = scenario.directions[p]
        if scenario.polarizations is not None:
            if not isinstance(model, PolarimetricModel):
                raise ValueError("polarized scenarios need a polarimetric model")
            pol = scenario.polarizations[p]
            columns.append(model.response(theta, phi, pol.gamma, pol.beta))
        else:
            columns.append(model.response(theta) if model.planar else model.response(theta, phi))
    return np.stack(columns, axis=1)


def gen_snapshots(scenario: Scenario, model, seed) -> SnapshotBlock:
    """Draw one snapshot block; deterministic given the seed."""
    steering = _response_columns(scenario, model)
    ports = steering.shape[0]
    n = scenario.snapshots
    rng = np.random.Generator(np.random.PCG64(seed))
    if scenario.waveform == WAVEFORM_UNIT_MODULUS:
        phases = rng.uniform(0.0, 2.0 * np.pi, size=(scenario.num_signals, n))
        waveforms = np.sqrt(scenario.powers_w)[:, None] * np.exp(1j * phases)
    else:
        parts = rng.standard_normal(size=(scenario.num_signals, n, 2))
        waveforms = np.sqrt(scenario.powers_w / 2.0)[:, None] * (parts[..., 0] + 1j * parts[..., 1])
    samples = steering @ waveforms
    if scenario.noise_power_w > 0.0:
        parts = rng.standard_normal(size=(ports, n, 2))
        samples = samples + np.sqrt(scenario.noise_power_w / 2.0) * (
            parts[..., 0] + 1j * parts[..., 1]
        )
    return SnapshotBlock(samples, scenario, seed, waveforms)


def _block_samples(block) -> np.ndarray:
    return block.samples if isinstance(block, SnapshotBlock) else np.asarray(block)


def rss(block) -> np.ndarray:
    """Per-port received signal strength, time-averaged over the block."""
    samples = _block_samples(block)
    return np.mean(np.abs(samples) ** 2, axis=1)


def sample_cov(block) -> np.ndarray:
    """Sample covariance (1/N) sum r(n) r(n)^H; Hermitian PSD by construction."""
    samples = _block_samples(block)
    return samples @ samples.conj().T / samples.shape[1]


def realized_signal_cov(block: SnapshotBlock) -> np.ndarray:
    """Covariance (1/N) sum s(n) s(n)^H of the realized waveforms."""
    return block.waveforms @ block.waveforms.conj().T / block.waveforms.shape[1]


def rss_moments(gain, signal_power: float, noise_power: float, snapshots: int):
    """Gaussian-approximation mean vector and (diagonal) covariance of the RSS.

    mean_m = g_m * s + sigma^2 and var_m = sigma^4/N + 2 sigma^2 s g_m / N,
    the exact moments of the scaled noncentral chi-squared power sum.
    """
    mean, var = rss_mean_var(gain, signal_power, noise_power, snapshots)
    return mean, np.diag(var)


def rss_mean_var(gain, signal_power: float, noise_power: float, snapshots: int):
    """Vector form of :func:`rss_moments`: (mean, per-port variance)."""
    if snapshots < 1:
        raise ValueError("snapshot count must be at least 1")
    gain = np.asarray(gain, dtype=float)
    mean = gain * signal_power + noise_power
    var = (noise_power**2 + 2.0 * noise_power * signal_power * gain) / snapshots
    return mean, var


def noncentrality(gain: float, signal_power: float, snapshots: int) -> float:
    """Noncentrality parameter N g s of the unscaled per-port power sum."""
    return snapshots * gain * signal_power
