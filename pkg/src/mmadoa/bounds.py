"""Fisher information and Cramer-Rao bounds for all four receiver models.

Non-coherent bounds come from the Gaussian approximation of the RSS vector,
whose mean and covariance are both parameter dependent.  Coherent and
polarimetric bounds use the conditional (deterministic-signal) form

    CRB = sigma^2 / (2 N) * Re{ D^H P D (.) S^T }^{-1}

where D stacks response derivatives per parameter, P projects onto the noise
subspace and S repeats the realized signal covariance over the parameter
blocks.  The transpose on S follows from eliminating the complex waveform
nuisances; it is validated against finite-difference Fisher matrices in the
test suite and is immaterial for a single signal.

Planar (x-z-cut) scenarios drop the azimuth rows and columns instead of
pseudo-inverting a degenerate two-angle information matrix.  All matrices are
computed in radians.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .models import PolarimetricModel
from .signals import rss_mean_var

_PINV_RCOND = 1e-12


@dataclass(frozen=True)
class CrbResult:
    """Fisher information, its (pseudo-)inverse and per-parameter bounds."""

    fim: np.ndarray
    crb: np.ndarray
    std: np.ndarray
    labels: tuple
    degenerate: bool = False

    def std_of(self, label: str) -> float:
        return float(self.std[self.labels.index(label)])

    def crb_of(self, label: str) -> float:
        i = self.labels.index(label)
        return float(self.crb[i, i])


def _invert(fim: np.ndarray, labels) -> CrbResult:
    fim = 0.5 * (fim + fim.T)
    degenerate = False
    try:
        crb = np.linalg.inv(fim)
        if not np.all(np.isfinite(crb)):
            raise np.linalg.LinAlgError
        # Reject inverses contaminated by near-singularity.
        if np.linalg.cond(fim) > 1.0 / _PINV_RCOND:
            raise np.linalg.LinAlgError
    except np.linalg.LinAlgError:
        crb = np.linalg.pinv(fim, rcond=_PINV_RCOND)
        degenerate = True
    crb = 0.5 * (crb + crb.T)
    std = np.sqrt(np.clip(np.diag(crb), 0.0, None))
    return CrbResult(fim, crb, std, tuple(labels), degenerate)


def fim_noncoherent(zeta, gain_model, snapshots: int, reduced: bool = False) -> CrbResult:
    """Fisher information of the Gaussian RSS model.

    ``zeta`` is the evaluation point (theta, phi, s, sigma^2) on the sphere or
    (theta, s, sigma^2) on the planar cut.  With ``reduced=True`` the noise
    power is treated as known: it still parameterizes the distribution but is
    excluded from the estimated set (the reduced-complexity estimator's bound).
    """
    zeta = np.asarray(zeta, dtype=float)
    planar = gain_model.planar
    expected = 3 if planar else 4
    if zeta.size != expected:
        raise ValueError(f"expected {expected} parameters, got {zeta.size}")
    if planar:
        theta, phi = float(zeta[0]), 0.0
        signal_power, noise_power = float(zeta[1]), float(zeta[2])
    else:
        theta, phi = float(zeta[0]), float(zeta[1])
        signal_power, noise_power = float(zeta[2]), float(zeta[3])
    if noise_power <= 0:
        raise ValueError("noise power must be positive")

    gain = gain_model.gain(theta, phi)
    d_theta, d_phi = gain_model.gain_grad(theta, phi)
    # fitted gain expansions may dip below zero between samples; treat such
    # ports as gainless so the variance model stays valid
    invalid = gain < 0.0
    if np.any(invalid):
        gain = np.where(invalid, 0.0, gain)
        d_theta = np.where(invalid, 0.0, d_theta)
        d_phi = np.where(invalid, 0.0, d_phi)
    _, var = rss_mean_var(gain, signal_power, noise_power, snapshots)

    ones = np.ones_like(gain)
    d_mu = [signal_power * d_theta]
    d_var = [2.0 * noise_power * signal_power * d_theta / snapshots]
    labels = ["theta"]
    if not planar:
        d_mu.append(signal_power * d_phi)
        d_var.append(2.0 * noise_power * signal_power * d_phi / snapshots)
        labels.append("phi")
    d_mu.append(gain)
    d_var.append(2.0 * noise_power * gain / snapshots)
    labels.append("signal_power")
    if not reduced:
        d_mu.append(ones)
        d_var.append((2.0 * noise_power + 2.0 * signal_power * gain) / snapshots)
        labels.append("noise_power")

    size = len(d_mu)
    fim = np.empty((size, size))
    for i in range(size):
        for j in range(i, size):
            value = np.sum(d_mu[i] * d_mu[j] / var) + 0.5 * np.sum(
                d_var[i] * d_var[j] / var**2
            )
            fim[i, j] = value
            fim[j, i] = value
    return _invert(fim, labels)


def _noise_projector(steering: np.ndarray) -> np.ndarray:
    ports = steering.shape[0]
    pseudo = np.linalg.pinv(steering, rcond=_PINV_RCOND)
    return np.eye(ports) - steering @ pseudo


def _conditional_crb(steering, derivative_cols, signal_cov, noise_power, snapshots, labels):
    projector = _noise_projector(steering)
    num_signals = steering.shape[1]
    blocks = len(labels) // num_signals
    signal_part = np.tile(np.asarray(signal_cov, dtype=complex).T, (blocks, blocks))
    h = derivative_cols.conj().T @ projector @ derivative_cols
    fim = (2.0 * snapshots / noise_power) * np.real(h * signal_part)
    return _invert(fim, labels)


def _direction_pairs(directions, planar: bool) -> np.ndarray:
    directions = np.atleast_2d(np.asarray(directions, dtype=float))
    if directions.shape[1] == 1:
        directions = np.hstack([directions, np.zeros_like(directions)])
    if directions.ndim != 2 or directions.shape[1] != 2:
        raise ValueError("directions must have shape (P, 2)")
    return directions


def crb_coherent(directions, model, signal_cov, noise_power: float, snapshots: int) -> CrbResult:
    """Conditional CRB of the coherent multi-signal model.

    Parameters are ordered (theta_1..theta_P, phi_1..phi_P) on the sphere and
    (theta_1..theta_P) on the planar cut.  ``signal_cov`` is the realized
    (1/N) sum s s^H of the waveforms the bound should refer to.
    """
    directions = _direction_pairs(directions, model.planar)
    num_signals = directions.shape[0]
    signal_cov = np.atleast_2d(np.asarray(signal_cov, dtype=complex))
    if signal_cov.shape != (num_signals, num_signals):
        raise ValueError("signal covariance must be (P, P)")
    if noise_power <= 0:
        raise ValueError("noise power must be positive")

    columns = []
    grads_theta = []
    grads_phi = []
    for theta, phi in directions:
        columns.append(model.response(theta) if model.planar else model.response(theta, phi))
        d_theta, d_phi = model.response_grad(theta) if model.planar else model.response_grad(theta, phi)
        grads_theta.append(d_theta)
        grads_phi.append(d_phi)
    steering = np.stack(columns, axis=1)
    if model.planar:
        derivative_cols = np.stack(grads_theta, axis=1)
        labels = [f"theta_{p}" for p in range(num_signals)]
    else:
        derivative_cols = np.stack(grads_theta + grads_phi, axis=1)
        labels = [f"theta_{p}" for p in range(num_signals)] + [
            f"phi_{p}" for p in range(num_signals)
        ]
    return _conditional_crb(steering, derivative_cols, signal_cov, noise_power, snapshots, labels)


def crb_polarimetric(
    directions,
    polarizations,
    pol_model: PolarimetricModel,
    signal_cov,
    noise_power: float,
    snapshots: int,
) -> CrbResult:
    """Conditional CRB for joint direction and polarization estimation.

    Parameters are ordered (all theta, all phi, all gamma, all beta), dropping
    the phi block on planar cuts.  A polarization at gamma = 0 makes the beta
    column vanish; the resulting singular information matrix is pseudo-inverted
    and flagged as degenerate.
    """
    directions = _direction_pairs(directions, pol_model.planar)
    num_signals = directions.shape[0]
    polarizations = tuple(polarizations)
    if len(polarizations) != num_signals:
        raise ValueError("one polarization state per signal required")
    signal_cov = np.atleast_2d(np.asarray(signal_cov, dtype=complex))
    if signal_cov.shape != (num_signals, num_signals):
        raise ValueError("signal covariance must be (P, P)")
    if noise_power <= 0:
        raise ValueError("noise power must be positive")

    columns = []
    grads = {"theta": [], "phi": [], "gamma": [], "beta": []}
    for (theta, phi), pol in zip(directions, polarizations):
        columns.append(pol_model.response(theta, phi, pol.gamma, pol.beta))
        d_theta, d_phi, d_gamma, d_beta = pol_model.response_grad(theta, phi, pol.gamma, pol.beta)
        grads["theta"].append(d_theta)
        grads["phi"].append(d_phi)
        grads["gamma"].append(d_gamma)
        grads["beta"].append(d_beta)
    steering = np.stack(columns, axis=1)
    block_names = ["theta", "gamma", "beta"] if pol_model.planar else ["theta", "phi", "gamma", "beta"]
    derivative_cols = np.stack(
        [grads[name][p] for name in block_names for p in range(num_signals)], axis=1
    )
    labels = [f"{name}_{p}" for name in block_names for p in range(num_signals)]
    return _conditional_crb(steering, derivative_cols, signal_cov, noise_power, snapshots, labels)
