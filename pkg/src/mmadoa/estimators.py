"""Maximum-likelihood direction estimators over fitted antenna models.

All four receivers share one optimization layout: a vectorized coarse grid
over the angle domain seeds a derivative-free Nelder-Mead refinement.  The
grid stage is required because the likelihood surfaces are multimodal (gain
symmetries produce near-duplicate peaks), while the refinement removes the
grid quantization down to the configured angle tolerance.

* Non-coherent ML maximizes the Gaussian RSS log-likelihood over direction,
  signal power and noise power.  The per-cell nuisance maximization runs a
  few iteratively reweighted least-squares rounds (the mean is linear in the
  two powers), vectorized over all grid cells, before the joint refinement.
* The reduced-complexity receiver knows the noise power and minimizes the
  projection residual of the de-biased RSS onto the gain vector.
* Coherent and polarimetric ML minimize Re tr{P_A (.) R} with the projector
  onto the noise subspace of the (polarimetric) response matrix.

Grid tables (gains or responses over the coarse grid) can be precomputed once
via :func:`gain_tables` / :func:`response_tables` / :func:`polarimetric_tables`
and shared across trials; they are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize

from .models import PolarimetricModel

# Lower clamp for estimated powers; keeps the RSS covariance invertible.
POWER_FLOOR_W = 1e-18

_AMBIGUITY_GUARD = 1e-12


@dataclass(frozen=True)
class OptimizerOptions:
    """Search layout shared by all estimators.

    ``theta_bounds`` limits the planar cut angle or the inclination;
    ``phi_bounds`` applies on the sphere only.  Defaults follow the harness
    conventions: a 170-degree planar field of view, and inclinations away from
    the poles with the full azimuth circle on the sphere.
    """

    grid_step_rad: float = math.radians(1.0)
    refine_tol_rad: float = 1e-6
    refine_max_iter: int = 500
    theta_bounds: tuple = None
    phi_bounds: tuple = None
    pair_rounds: int = 3
    brute_force_pairs: bool = False

    def resolved(self, planar: bool) -> "OptimizerOptions":
        theta_bounds = self.theta_bounds
        phi_bounds = self.phi_bounds
        if theta_bounds is None:
            theta_bounds = (
                (-math.radians(85.0), math.radians(85.0))
                if planar
                else (math.radians(2.0), math.radians(88.0))
            )
        if not planar and phi_bounds is None:
            phi_bounds = (0.0, 2.0 * math.pi)
        return replace(self, theta_bounds=theta_bounds, phi_bounds=phi_bounds)


@dataclass(frozen=True)
class EstimationResult:
    """Estimates plus optimizer diagnostics for one snapshot block."""

    theta: np.ndarray
    phi: np.ndarray = None
    gamma: np.ndarray = None
    beta: np.ndarray = None
    signal_power: float = None
    noise_power: float = None
    objective: float = 0.0
    converged: bool = True
    grid_index: int = None
    refine_iterations: int = 0
    condition: float = None


# ---------------------------------------------------------------------------
# Grid tables
# ---------------------------------------------------------------------------


def _grid_points(opts: OptimizerOptions, planar: bool):
    low, high = opts.theta_bounds
    # clip away arange's accumulated rounding so grid points satisfy bounds
    thetas = np.clip(np.arange(low, high + 1e-12, opts.grid_step_rad), low, high)
    if planar:
        return thetas, None
    phi_low, phi_high = opts.phi_bounds
    full_circle = abs((phi_high - phi_low) - 2.0 * math.pi) < 1e-9
    phis = np.arange(phi_low, phi_high + (-1e-12 if full_circle else 1e-12), opts.grid_step_rad)
    grid_theta = np.repeat(thetas, phis.size)
    grid_phi = np.tile(phis, thetas.size)
    return grid_theta, grid_phi


@dataclass(frozen=True)
class GainTables:
    thetas: np.ndarray
    phis: np.ndarray
    gains: np.ndarray  # (cells, ports)


@dataclass(frozen=True)
class ResponseTables:
    thetas: np.ndarray
    phis: np.ndarray
    responses: np.ndarray  # (cells, ports) complex


@dataclass(frozen=True)
class PolarimetricTables:
    thetas: np.ndarray
    phis: np.ndarray
    co: np.ndarray
    cross: np.ndarray


def gain_tables(gain_model, opts: OptimizerOptions) -> GainTables:
    opts = opts.resolved(gain_model.planar)
    thetas, phis = _grid_points(opts, gain_model.planar)
    # fitted gain expansions may dip below zero between samples; floor them
    # so the RSS variance model stays positive
    gains = np.clip(gain_model.gain_matrix(thetas, phis).T.real, 0.0, None)
    return GainTables(thetas, phis, np.ascontiguousarray(gains))


def response_tables(model, opts: OptimizerOptions) -> ResponseTables:
    opts = opts.resolved(model.planar)
    thetas, phis = _grid_points(opts, model.planar)
    responses = model.response_matrix(thetas, phis).T
    return ResponseTables(thetas, phis, np.ascontiguousarray(responses))


def polarimetric_tables(pol_model: PolarimetricModel, opts: OptimizerOptions) -> PolarimetricTables:
    opts = opts.resolved(pol_model.planar)
    thetas, phis = _grid_points(opts, pol_model.planar)
    co = pol_model.co.response_matrix(thetas, phis).T
    cross = pol_model.cross.response_matrix(thetas, phis).T
    return PolarimetricTables(thetas, phis, np.ascontiguousarray(co), np.ascontiguousarray(cross))


def _refine(objective, x0, bounds, opts: OptimizerOptions, steps=None):
    """Nelder-Mead polish; termination by the configured angle tolerance.

    The initial simplex is built from per-coordinate steps (default: a third
    of the grid step) so angle and power coordinates start at commensurate
    scales.
    """
    x0 = np.asarray(x0, dtype=float)
    if steps is None:
        steps = np.full(x0.size, opts.grid_step_rad / 3.0)
    simplex = np.vstack([x0, x0 + np.diag(steps)])
    if bounds is not None:
        lows = np.array([-np.inf if b[0] is None else b[0] for b in bounds])
        highs = np.array([np.inf if b[1] is None else b[1] for b in bounds])
        simplex = np.clip(simplex, lows, highs)
    f0 = abs(float(objective(x0)))
    result = minimize(
        objective,
        x0=x0,
        method="Nelder-Mead",
        bounds=bounds,
        options={
            "xatol": opts.refine_tol_rad,
            "fatol": 1e-10 * max(1.0, f0),
            "maxiter": opts.refine_max_iter,
            "initial_simplex": simplex,
            "disp": False,
        },
    )
    return result


# ---------------------------------------------------------------------------
# Non-coherent estimators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NcObservation:
    """An RSS vector together with the snapshot count that produced it."""

    rss: np.ndarray
    snapshots: int

    def __post_init__(self):
        rss = np.asarray(self.rss, dtype=float)
        object.__setattr__(self, "rss", rss)
        if rss.ndim != 1:
            raise ValueError("rss must be a vector")
        if np.any(rss < 0):
            raise ValueError("rss entries must be non-negative")
        if self.snapshots < 1:
            raise ValueError("snapshot count must be at least 1")


def nc_loglik(observation: NcObservation, gain_model, zeta) -> float:
    """Gaussian RSS log-likelihood (constants dropped) at parameters ``zeta``.

    ``zeta`` is (theta, s, sigma^2) for planar models and
    (theta, phi, s, sigma^2) on the sphere.
    """
    zeta = np.asarray(zeta, dtype=float)
    if gain_model.planar:
        theta, phi, signal_power, noise_power = zeta[0], 0.0, zeta[1], zeta[2]
    else:
        theta, phi, signal_power, noise_power = zeta
    if noise_power <= 0.0:
        raise ValueError("noise power must be positive")
    gain = np.clip(gain_model.gain(theta, phi), 0.0, None)
    mean = gain * signal_power + noise_power
    var = (noise_power**2 + 2.0 * noise_power * signal_power * gain) / observation.snapshots
    return float(-np.sum(np.log(var)) - np.sum((observation.rss - mean) ** 2 / var))


def _snapshots_of(gain_model) -> int:
    return getattr(gain_model, "_snapshots", 1)


def _nc_cell_objective(rss_vec, gains, snapshots, noise_points: int = 20):
    """Profile (s, sigma^2) per grid cell; vectorized over all cells.

    The signal power given a noise power is a weighted least-squares fit of
    the de-biased RSS on the gain vector, but the noise power itself cannot be
    profiled by mean-fitting alone: at high SNR the gain and all-ones
    regressors are nearly collinear, and the optimum comes from the
    log-determinant term.  The noise power is therefore searched over a
    logarithmic grid (anchored by the method-of-moments point) with two
    reweighting rounds for the signal power at each candidate; the refinement
    stage polishes the winner jointly.
    """
    rss_vec = np.asarray(rss_vec, dtype=float)
    scale = max(float(np.mean(rss_vec)), POWER_FLOOR_W)
    floor = max(POWER_FLOOR_W, 1e-12 * scale)
    moments_noise = max(float(np.min(rss_vec)), floor)
    noise_grid = np.concatenate(
        [np.geomspace(1e-6 * scale, 2.0 * scale, noise_points), [moments_noise]]
    )
    cells = gains.shape[0]
    best_value = np.empty(cells)
    best_signal = np.empty(cells)
    best_noise = np.empty(cells)
    observed = rss_vec[None, None, :]
    v = noise_grid[None, :, None]
    # chunk the cell axis so 3D grids stay within a few tens of megabytes
    chunk = max(1, 2_000_000 // (noise_grid.size * rss_vec.size))
    for start in range(0, cells, chunk):
        gain = gains[start : start + chunk, None, :]
        gain_dot = gains[start : start + chunk] @ rss_vec
        gain_sum = np.sum(gains[start : start + chunk], axis=1)
        gain_sq = np.sum(gains[start : start + chunk] ** 2, axis=1)
        s = np.clip(
            (gain_dot[:, None] - noise_grid[None, :] * gain_sum[:, None]) / gain_sq[:, None],
            floor,
            None,
        )
        for _ in range(2):
            var = (v**2 + 2.0 * v * s[:, :, None] * gain) / snapshots
            weight = 1.0 / var
            s = np.clip(
                np.sum(weight * gain * (observed - v), axis=2)
                / np.sum(weight * gain * gain, axis=2),
                floor,
                None,
            )
        var = (v**2 + 2.0 * v * s[:, :, None] * gain) / snapshots
        residual = observed - gain * s[:, :, None] - v
        values = -np.sum(np.log(var), axis=2) - np.sum(residual**2 / var, axis=2)
        pick = np.argmax(values, axis=1)
        rows = np.arange(values.shape[0])
        best_value[start : start + chunk] = values[rows, pick]
        best_signal[start : start + chunk] = s[rows, pick]
        best_noise[start : start + chunk] = noise_grid[pick]
    return best_value, best_signal, best_noise


def nc_ml(observation: NcObservation, gain_model, opts: OptimizerOptions = None, tables: GainTables = None) -> EstimationResult:
    """Non-coherent ML estimate of direction, signal power and noise power."""
    rss_vec = observation.rss
    if rss_vec.size < 3:
        raise ValueError("non-coherent estimation needs at least 3 antenna ports")
    opts = (opts or OptimizerOptions()).resolved(gain_model.planar)
    if tables is None:
        tables = gain_tables(gain_model, opts)
    snapshots = observation.snapshots
    objective_cells, s_cells, v_cells = _nc_cell_objective(rss_vec, tables.gains, snapshots)
    best = int(np.argmax(objective_cells))

    scale = max(float(np.mean(rss_vec)), POWER_FLOOR_W)
    planar = gain_model.planar

    def negative(x):
        if planar:
            theta, phi = x[0], 0.0
            s, v = x[1] * scale, x[2] * scale
        else:
            theta, phi = x[0], x[1]
            s, v = x[2] * scale, x[3] * scale
        s = max(s, POWER_FLOOR_W)
        v = max(v, POWER_FLOOR_W)
        gain = np.clip(gain_model.gain(theta, phi), 0.0, None)
        var = (v**2 + 2.0 * v * s * gain) / snapshots
        residual = rss_vec - gain * s - v
        return float(np.sum(np.log(var)) + np.sum(residual**2 / var))

    floor_scaled = POWER_FLOOR_W / scale
    angle_step = opts.grid_step_rad / 3.0
    power_steps = [
        0.05 * (s_cells[best] / scale + 0.01),
        0.05 * (v_cells[best] / scale + 0.01),
    ]
    if planar:
        x0 = [tables.thetas[best], s_cells[best] / scale, v_cells[best] / scale]
        bounds = [opts.theta_bounds, (floor_scaled, None), (floor_scaled, None)]
        steps = np.array([angle_step] + power_steps)
    else:
        x0 = [
            tables.thetas[best],
            tables.phis[best],
            s_cells[best] / scale,
            v_cells[best] / scale,
        ]
        bounds = [opts.theta_bounds, opts.phi_bounds, (floor_scaled, None), (floor_scaled, None)]
        steps = np.array([angle_step, angle_step] + power_steps)
    refined = _refine(negative, x0, bounds, opts, steps)
    x = refined.x
    if planar:
        theta, phi = np.array([x[0]]), None
        signal_power, noise_power = x[1] * scale, x[2] * scale
    else:
        theta, phi = np.array([x[0]]), np.array([x[1] % (2.0 * math.pi)])
        signal_power, noise_power = x[2] * scale, x[3] * scale
    return EstimationResult(
        theta=theta,
        phi=phi,
        signal_power=max(signal_power, POWER_FLOOR_W),
        noise_power=max(noise_power, POWER_FLOOR_W),
        objective=-float(refined.fun),
        converged=bool(refined.success),
        grid_index=best,
        refine_iterations=int(refined.nit),
    )


def noise_power_estimate(noise_block) -> float:
    """Mean squared magnitude over a signal-free block of samples."""
    samples = np.asarray(noise_block)
    if samples.size == 0:
        raise ValueError("noise block must be non-empty")
    return float(np.mean(np.abs(samples) ** 2))


def nc_rc(observation: NcObservation, noise_power: float, gain_model, opts: OptimizerOptions = None, tables: GainTables = None) -> EstimationResult:
    """Reduced-complexity non-coherent estimate with known noise power."""
    if noise_power < 0:
        raise ValueError("noise power must be non-negative")
    rss_vec = observation.rss
    opts = (opts or OptimizerOptions()).resolved(gain_model.planar)
    if tables is None:
        tables = gain_tables(gain_model, opts)
    debiased = rss_vec - noise_power
    total = float(debiased @ debiased)

    norms = np.sum(tables.gains**2, axis=1)
    projection = (tables.gains @ debiased) ** 2
    usable = norms > _AMBIGUITY_GUARD
    score = np.where(usable, projection / np.where(usable, norms, 1.0), -np.inf)
    best = int(np.argmax(score))

    planar = gain_model.planar

    def objective(x):
        gain = gain_model.gain(x[0], 0.0 if planar else x[1])
        norm = float(gain @ gain)
        if norm < _AMBIGUITY_GUARD:
            return total
        return total - float(gain @ debiased) ** 2 / norm

    if planar:
        x0 = [tables.thetas[best]]
        bounds = [opts.theta_bounds]
    else:
        x0 = [tables.thetas[best], tables.phis[best]]
        bounds = [opts.theta_bounds, opts.phi_bounds]
    refined = _refine(objective, x0, bounds, opts)
    theta = np.array([refined.x[0]])
    phi = None if planar else np.array([refined.x[1] % (2.0 * math.pi)])
    gain = gain_model.gain(refined.x[0], 0.0 if planar else refined.x[1])
    norm = float(gain @ gain)
    signal_power = max(float(gain @ debiased) / norm, 0.0) if norm > _AMBIGUITY_GUARD else 0.0
    return EstimationResult(
        theta=theta,
        phi=phi,
        signal_power=signal_power,
        noise_power=noise_power,
        objective=float(refined.fun),
        converged=bool(refined.success),
        grid_index=best,
        refine_iterations=int(refined.nit),
    )


# ---------------------------------------------------------------------------
# Coherent estimators
# ---------------------------------------------------------------------------


def _projector_objective(cov, columns) -> float:
    """Re tr{P_A cov} for A given by ``columns``, via an orthonormal basis."""
    q, _ = np.linalg.qr(columns)
    return float(np.real(np.trace(cov) - np.trace(q.conj().T @ cov @ q)))


def _single_signal_scores(cov, responses):
    """Vectorized Re{a^H cov a} / ||a||^2 over table rows."""
    quad = np.real(np.einsum("km,mn,kn->k", responses.conj(), cov, responses))
    norms = np.sum(np.abs(responses) ** 2, axis=1)
    return quad / np.maximum(norms, _AMBIGUITY_GUARD)


def _pair_scores(cov, responses, fixed_column):
    """Objective over table rows paired with a fixed second column.

    Evaluates tr{P_A cov} for A = [a_k, fixed] through the 2x2 normal
    equations; cells where the pair is numerically parallel are masked out.
    """
    trace = float(np.real(np.trace(cov)))
    n11 = np.sum(np.abs(responses) ** 2, axis=1)
    n22 = float(np.real(fixed_column.conj() @ fixed_column))
    n12 = responses.conj() @ fixed_column
    cov_fixed = cov @ fixed_column
    c1 = np.einsum("km,mn,kn->k", responses.conj(), cov, responses)
    c2 = float(np.real(fixed_column.conj() @ cov_fixed))
    c12 = responses.conj() @ cov_fixed
    det = n11 * n22 - np.abs(n12) ** 2
    # tr{A (A^H A)^{-1} A^H cov} expanded for the 2x2 Gram inverse
    signal_part = (
        n22 * np.real(c1) + n11 * c2 - 2.0 * np.real(n12 * np.conj(c12))
    ) / np.where(det > _AMBIGUITY_GUARD * n11 * n22, det, np.inf)
    return trace - signal_part


def c_ml(cov, model, num_signals: int = 1, opts: OptimizerOptions = None, tables: ResponseTables = None) -> EstimationResult:
    """Coherent ML estimate of one or more signal directions."""
    cov = np.asarray(cov, dtype=complex)
    ports = cov.shape[0]
    if num_signals >= ports:
        raise ValueError("the signal count must stay below the port count")
    opts = (opts or OptimizerOptions()).resolved(model.planar)
    if tables is None:
        tables = response_tables(model, opts)
    if num_signals == 1:
        return _c_ml_single(cov, model, opts, tables)
    if num_signals == 2:
        return _c_ml_pair(cov, model, opts, tables)
    raise NotImplementedError("coherent search is implemented for one or two signals")


def _c_ml_single(cov, model, opts, tables) -> EstimationResult:
    scores = _single_signal_scores(cov, tables.responses)
    best = int(np.argmax(scores))
    trace = float(np.real(np.trace(cov)))
    planar = model.planar

    def objective(x):
        a = model.response(x[0], 0.0 if planar else x[1])
        norm = float(np.real(a.conj() @ a))
        if norm < _AMBIGUITY_GUARD:
            return trace
        return trace - float(np.real(a.conj() @ cov @ a)) / norm

    if planar:
        x0, bounds = [tables.thetas[best]], [opts.theta_bounds]
    else:
        x0 = [tables.thetas[best], tables.phis[best]]
        bounds = [opts.theta_bounds, opts.phi_bounds]
    refined = _refine(objective, x0, bounds, opts)
    theta = np.array([refined.x[0]])
    phi = None if planar else np.array([refined.x[1] % (2.0 * math.pi)])
    return EstimationResult(
        theta=theta,
        phi=phi,
        objective=float(refined.fun),
        converged=bool(refined.success),
        grid_index=best,
        refine_iterations=int(refined.nit),
        condition=1.0,
    )


def _c_ml_pair(cov, model, opts, tables) -> EstimationResult:
    if not model.planar:
        raise NotImplementedError("two-signal coherent search is implemented on the planar cut")
    responses = tables.responses
    thetas = tables.thetas

    if opts.brute_force_pairs:
        best_pair, _ = _brute_force_pair(cov, responses)
        first, second = thetas[best_pair[0]], thetas[best_pair[1]]
    else:
        # Seed at the single-signal peak, then alternate 1D sweeps.
        first = float(thetas[int(np.argmax(_single_signal_scores(cov, responses)))])
        second = None
        for _ in range(opts.pair_rounds):
            scores = _pair_scores(cov, responses, model.response(first))
            second = float(thetas[int(np.argmin(scores))])
            scores = _pair_scores(cov, responses, model.response(second))
            first = float(thetas[int(np.argmin(scores))])

    def objective(x):
        columns = np.stack([model.response(x[0]), model.response(x[1])], axis=1)
        return _projector_objective(cov, columns)

    bounds = [opts.theta_bounds, opts.theta_bounds]
    refined = _refine(objective, [first, second], bounds, opts)
    theta = np.sort(np.asarray(refined.x, dtype=float))
    columns = np.stack([model.response(t) for t in theta], axis=1)
    condition = float(np.linalg.cond(columns))
    return EstimationResult(
        theta=theta,
        phi=None,
        objective=float(refined.fun),
        converged=bool(refined.success),
        refine_iterations=int(refined.nit),
        condition=condition,
    )


def _brute_force_pair(cov, responses):
    cells = responses.shape[0]
    best = None
    best_value = math.inf
    for i in range(cells - 1):
        scores = _pair_scores(cov, responses[i + 1 :], responses[i])
        j = int(np.argmin(scores))
        if scores[j] < best_value:
            best_value = float(scores[j])
            best = (i, i + 1 + j)
    return best, best_value


# ---------------------------------------------------------------------------
# Polarimetric estimator
# ---------------------------------------------------------------------------


def _polarization_profile(cov, co, cross):
    """Exact per-cell profile of the polarimetric Rayleigh quotient.

    With a = sin(g) e^{j b} a_co + cos(g) a_cross, every polarization state is
    a complex mixing vector c up to scale, so max over (g, b) of
    a^H cov a / a^H a is the largest generalized eigenvalue of the 2x2 pencil
    (F^H cov F, F^H F) with F = [a_co, a_cross].  Returns the profile values
    plus the maximizing (gamma, beta) per cell, recovered from the
    eigenvector.
    """
    q_cc = np.real(np.einsum("km,mn,kn->k", co.conj(), cov, co))
    q_xx = np.real(np.einsum("km,mn,kn->k", cross.conj(), cov, cross))
    q_cx = np.einsum("km,mn,kn->k", co.conj(), cov, cross)
    n_cc = np.sum(np.abs(co) ** 2, axis=1).real
    n_xx = np.sum(np.abs(cross) ** 2, axis=1).real
    n_cx = np.sum(co.conj() * cross, axis=1)

    # det(Q - lambda B) = 0 with hermitian 2x2 Q, B: a lambda^2 - b lambda + c
    a = n_cc * n_xx - np.abs(n_cx) ** 2
    b = q_cc * n_xx + q_xx * n_cc - 2.0 * np.real(q_cx * np.conj(n_cx))
    c = q_cc * q_xx - np.abs(q_cx) ** 2
    a = np.maximum(a, _AMBIGUITY_GUARD)
    disc = np.sqrt(np.maximum(b * b - 4.0 * a * c, 0.0))
    values = (b + disc) / (2.0 * a)

    # eigenvector of (Q - lambda B): pick the numerically larger row
    row1_a = q_cc - values * n_cc
    row1_b = q_cx - values * n_cx
    use_first = np.abs(row1_b) >= np.abs(row1_a)
    x1 = np.where(use_first, -row1_b, np.conj(q_cx) - values * np.conj(n_cx))
    x2 = np.where(use_first, row1_a, -(q_xx - values * n_xx))
    # swap so the vector reads (co coefficient, cross coefficient)
    co_coef = np.where(use_first, x1, x2)
    cross_coef = np.where(use_first, x2, x1)
    gamma = np.arctan2(np.abs(co_coef), np.abs(cross_coef))
    beta = np.angle(co_coef * np.conj(cross_coef))
    return values, gamma, beta


def p_ml(cov, pol_model: PolarimetricModel, num_signals: int = 1, opts: OptimizerOptions = None, tables: PolarimetricTables = None) -> EstimationResult:
    """Polarimetric ML estimate of direction and polarization per signal."""
    cov = np.asarray(cov, dtype=complex)
    ports = cov.shape[0]
    if num_signals >= ports:
        raise ValueError("the signal count must stay below the port count")
    if 4 * num_signals >= 2 * ports:
        raise ValueError("too many polarimetric parameters for this port count")
    if num_signals != 1:
        raise NotImplementedError("the polarimetric search is implemented for one signal")
    opts = (opts or OptimizerOptions()).resolved(pol_model.planar)
    if tables is None:
        tables = polarimetric_tables(pol_model, opts)

    profile, gamma_prof, beta_prof = _polarization_profile(cov, tables.co, tables.cross)
    trace = float(np.real(np.trace(cov)))
    planar = pol_model.planar

    def objective(x):
        if planar:
            theta, phi, gamma, beta = x[0], 0.0, x[1], x[2]
        else:
            theta, phi, gamma, beta = x
        a = pol_model.response(theta, phi, gamma, beta)
        norm = float(np.real(a.conj() @ a))
        if norm < _AMBIGUITY_GUARD:
            return trace
        return trace - float(np.real(a.conj() @ cov @ a)) / norm

    angle_step = opts.grid_step_rad / 3.0
    # Near-parallel response pairs can put a false basin within a whisker of
    # the true one, so the refinement polishes the few best separated cells
    # and keeps the lowest objective.
    remaining = profile.copy()
    best = None
    best_cell = 0
    for _ in range(3):
        cell = int(np.argmax(remaining))
        if not np.isfinite(remaining[cell]):
            break
        gamma0 = float(gamma_prof[cell])
        beta0 = float(beta_prof[cell])
        if planar:
            x0 = [tables.thetas[cell], gamma0, beta0]
            bounds = [opts.theta_bounds, (0.0, math.pi / 2.0), (beta0 - math.pi, beta0 + math.pi)]
            steps = np.array([angle_step, 0.05, 0.1])
        else:
            x0 = [tables.thetas[cell], tables.phis[cell], gamma0, beta0]
            bounds = [
                opts.theta_bounds,
                (None, None),  # azimuth refines freely and wraps afterwards
                (0.0, math.pi / 2.0),
                (beta0 - math.pi, beta0 + math.pi),
            ]
            steps = np.array([angle_step, angle_step, 0.05, 0.1])
        refined = _refine(objective, x0, bounds, opts, steps)
        if best is None or refined.fun < best.fun:
            best = refined
            best_cell = cell
        # mask out this basin before looking for the next candidate
        separation = np.abs(tables.thetas - tables.thetas[cell]) < 4.0 * opts.grid_step_rad
        if not planar:
            circ = np.abs(np.remainder(tables.phis - tables.phis[cell] + math.pi, 2.0 * math.pi) - math.pi)
            separation &= circ < 4.0 * opts.grid_step_rad
        remaining[separation] = -np.inf
    x = best.x
    if planar:
        theta = np.array([x[0]])
        phi = None
        gamma, beta = x[1], x[2]
    else:
        theta = np.array([x[0]])
        phi = np.array([x[1] % (2.0 * math.pi)])
        gamma, beta = x[2], x[3]
    beta = math.remainder(beta, 2.0 * math.pi)
    if beta >= math.pi:
        beta -= 2.0 * math.pi
    return EstimationResult(
        theta=theta,
        phi=phi,
        gamma=np.array([min(max(gamma, 0.0), math.pi / 2.0)]),
        beta=np.array([beta]),
        objective=float(best.fun),
        converged=bool(best.success),
        grid_index=int(best_cell),
        refine_iterations=int(best.nit),
        condition=1.0,
    )
