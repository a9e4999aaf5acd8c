"""Config-driven Monte-Carlo campaigns over the estimator stack.

A sweep walks one axis (SNR, true direction, or two-signal separation), runs a
configured number of independent trials per point, and writes one CSV row per
(axis value, estimator, parameter) with the RMSE, the square-root CRB and
their ratio.  A surface run evaluates the same quantities on a direction grid
at fixed SNR, and a likelihood map renders the normalized non-coherent and
coherent objectives for a single noisy realization.

Determinism contract: every trial derives its own PCG64 stream from the master
seed through ``numpy.random.SeedSequence`` spawn keys, and records are reduced
in a fixed order, so outputs are byte-identical across reruns regardless of
any parallelism in the caller.  CSV files carry a schema version and the
SHA-256 hash of the canonical config; a JSON sidecar echoes the full config.

Signals are always generated from the exact synthetic-truth models while the
estimators see only their fitted models, mirroring a calibration-based
receiver; bounds are evaluated on the truth models with the realized waveform
covariance of each trial.
"""

from __future__ import annotations

import csv
import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .basis import BasisKind, BasisSpec
from .bounds import crb_coherent, crb_polarimetric, fim_noncoherent
from .calibration import (
    MODE_CUT,
    MODE_SPHERE,
    CalibrationSet,
    SyntheticAntennaTruth,
    load_calibration,
    synth_antenna,
)
from .errors import ConfigError
from .estimators import (
    NcObservation,
    OptimizerOptions,
    c_ml,
    gain_tables,
    nc_ml,
    nc_rc,
    noise_power_estimate,
    p_ml,
    polarimetric_tables,
    response_tables,
)
from .models import (
    DerivedGainModel,
    PolarimetricModel,
    PolarizationState,
    WmModel,
    fit_ait,
    fit_wm,
    fit_wm_gain,
    truncation_order,
)
from .signals import Scenario, gen_snapshots, realized_signal_cov, rss, sample_cov

BOLTZMANN_J_PER_K = 1.380649e-23

SWEEP_SCHEMA_VERSION = 1
SWEEP_COLUMNS = [
    "schema_version",
    "config_hash",
    "axis",
    "axis_value",
    "estimator",
    "param",
    "rmse_deg",
    "crb_deg",
    "ratio",
    "trials",
    "failures",
    "ambiguous",
]
SURFACE_COLUMNS = [
    "schema_version",
    "config_hash",
    "estimator",
    "theta_deg",
    "phi_deg",
    "param",
    "metric",
    "value",
]
LIKEMAP_COLUMNS = [
    "schema_version",
    "config_hash",
    "objective",
    "theta_deg",
    "phi_deg",
    "value",
]

# Absolute angular error beyond which a trial counts as an ambiguity lock.
AMBIGUITY_THRESHOLD_RAD = math.radians(15.0)

AXIS_SNR = "snr_db"
AXIS_THETA = "theta_deg"
AXIS_DELTA = "delta_theta_deg"


@dataclass(frozen=True)
class SweepRecord:
    axis: str
    axis_value: float
    estimator: str
    param: str
    rmse_rad: float
    crb_rad: float
    trials: int
    failures: int
    ambiguous: int

    @property
    def ratio(self) -> float:
        return self.rmse_rad / self.crb_rad if self.crb_rad > 0 else math.inf


def config_hash(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


def _require(config: dict, key: str, context: str):
    if key not in config:
        raise ConfigError(f"{context}: missing required field {key!r}")
    return config[key]


def _axis_values(block: dict) -> list[float]:
    if "values" in block:
        values = [float(v) for v in block["values"]]
        if not values:
            raise ConfigError("sweep.values must be non-empty")
        return values
    try:
        start, stop, step = (float(block[k]) for k in ("start", "stop", "step"))
    except KeyError as exc:
        raise ConfigError("sweep needs either values or start/stop/step") from exc
    if step <= 0:
        raise ConfigError("sweep step must be positive")
    count = int(round((stop - start) / step)) + 1
    return [start + k * step for k in range(count)]


def noise_power_from_config(block: dict) -> float:
    kind = block.get("kind", "thermal")
    if kind == "absolute":
        watts = float(_require(block, "watts", "noise"))
        if watts < 0:
            raise ConfigError("noise.watts must be non-negative")
        return watts
    if kind == "thermal":
        temperature = float(block.get("temperature_k", 290.0))
        bandwidth = float(block.get("bandwidth_hz", 1e6))
        return BOLTZMANN_J_PER_K * temperature * bandwidth
    raise ConfigError(f"unknown noise kind {kind!r}")


# ---------------------------------------------------------------------------
# Workspace: antenna, truth models, fitted models, estimator runners
# ---------------------------------------------------------------------------


def _build_antenna(block: dict) -> tuple[CalibrationSet, SyntheticAntennaTruth]:
    kind = block.get("kind", "synth")
    if kind == "file":
        cal = load_calibration(_require(block, "path", "antenna"))
        return cal, None
    if kind != "synth":
        raise ConfigError(f"unknown antenna kind {kind!r}")
    return synth_antenna(
        seed=int(block.get("seed", 1)),
        num_ports=int(block.get("ports", 4)),
        degree=int(block.get("degree", 5)),
        mode=block.get("mode", MODE_SPHERE),
        grid_step_deg=float(block.get("grid_step_deg", 5.0)),
        carrier_frequency_hz=float(block.get("frequency_hz", 7.25e9)),
        symmetry=block.get("symmetry", "none"),
        asymmetry=float(block.get("asymmetry", 0.0)),
    )


def _truth_degree(truth: SyntheticAntennaTruth) -> int:
    return truth.basis.max_degree


class Workspace:
    """Everything a run needs, built once from the validated config."""

    def __init__(self, config: dict):
        self.config = config
        self.hash = config_hash(config)
        self.cal, self.truth = _build_antenna(_require(config, "antenna", "config"))
        self.planar = self.cal.grid.is_planar
        self.snapshots = int(config.get("snapshots", 1000))
        self.noise_power = noise_power_from_config(config.get("noise", {}))
        self.grid_step_deg = float(config.get("grid_step_deg", 1.0))
        fov = config.get("fov_deg")
        if fov is None:
            fov = [-85.0, 85.0] if self.planar else [2.0, 88.0]
        self.fov_deg = (float(fov[0]), float(fov[1]))
        self.seed = int(config.get("seed", 0))
        self.waveform = config.get("waveform", "unit-modulus")

        self._build_truth_models()
        self._build_fitted_models(config.get("models", [{"id": "wm", "kind": "wm"}]))
        self._build_estimators(_require(config, "estimators", "config"))

    # -- truth side ---------------------------------------------------------

    def _build_truth_models(self):
        if self.truth is None:
            # File antennas carry no generator truth; the best available
            # stand-in is an exact-order wavefield fit of the samples.
            size = truncation_order(
                self.cal.kappa_rs,
                BasisKind.FOURIER_1D if self.planar else BasisKind.COMPLEX_SH,
            )
            basis = BasisSpec(
                BasisKind.FOURIER_1D if self.planar else BasisKind.COMPLEX_SH, size
            )
            self.truth_co = fit_wm(self.cal, basis, "co")
            self.truth_cross = fit_wm(self.cal, basis, "cross")
        elif self.planar:
            degree = _truth_degree(self.truth)
            basis = BasisSpec(BasisKind.FOURIER_1D, 2 * degree + 1)
            self.truth_co = fit_wm(self.cal, basis, "co")
            self.truth_cross = fit_wm(self.cal, basis, "cross")
        else:
            self.truth_co = WmModel(self.truth.sampling_co, self.truth.basis, "co")
            self.truth_cross = WmModel(self.truth.sampling_cross, self.truth.basis, "cross")
        degree = _truth_degree(self.truth) if self.truth is not None else None
        if self.planar:
            size = 4 * degree + 1 if degree is not None else 2 * self.truth_co.basis.size - 1
            self.truth_gain = fit_wm_gain(self.cal, BasisSpec(BasisKind.REAL_FOURIER_1D, size))
        else:
            if degree is not None:
                size = (2 * degree + 1) ** 2
            else:
                size = (2 * self.truth_co.basis.max_degree + 1) ** 2
            self.truth_gain = fit_wm_gain(self.cal, BasisSpec(BasisKind.REAL_SH, size))
        self.truth_pol = PolarimetricModel(self.truth_co, self.truth_cross)

    # -- fitted side --------------------------------------------------------

    def _build_fitted_models(self, blocks):
        self.models = {}
        for block in blocks:
            model_id = _require(block, "id", "models[]")
            kind = block.get("kind", "wm")
            if kind == "wm":
                basis_kind = BasisKind(
                    block.get("basis", "fourier1d" if self.planar else "complex-sh")
                )
                size = block.get("size")
                if size is None:
                    size = truncation_order(self.cal.kappa_rs, basis_kind)
                complex_model = fit_wm(self.cal, BasisSpec(basis_kind, int(size)), "co")
                cross_model = fit_wm(self.cal, BasisSpec(basis_kind, int(size)), "cross")
                gain_size = block.get("gain_size")
                if gain_size is None:
                    gain_size = (
                        2 * int(size) - 1
                        if self.planar
                        else (2 * BasisSpec(basis_kind, int(size)).max_degree + 1) ** 2
                        if basis_kind is BasisKind.COMPLEX_SH
                        else None
                    )
                if self.planar:
                    gain_model = fit_wm_gain(
                        self.cal, BasisSpec(BasisKind.REAL_FOURIER_1D, int(gain_size))
                    )
                elif gain_size is not None:
                    gain_model = fit_wm_gain(self.cal, BasisSpec(BasisKind.REAL_SH, int(gain_size)))
                else:
                    gain_model = DerivedGainModel(complex_model)
                self.models[model_id] = {
                    "response": complex_model,
                    "gain": gain_model,
                    "polarimetric": PolarimetricModel(complex_model, cross_model),
                }
            elif kind == "ait":
                ait = fit_ait(
                    self.cal,
                    sector_width_deg=float(block.get("sector_width_deg", 30.0)),
                    overlap_deg=float(block.get("overlap_deg", 15.0)),
                    fov_deg=tuple(block["fov_deg"]) if "fov_deg" in block else None,
                )
                self.models[model_id] = {"response": ait, "gain": DerivedGainModel(ait)}
            else:
                raise ConfigError(f"unknown model kind {kind!r}")

    # -- estimators ---------------------------------------------------------

    def _options_for(self, fov_deg) -> OptimizerOptions:
        if self.planar:
            theta_bounds = (math.radians(fov_deg[0]), math.radians(fov_deg[1]))
            return OptimizerOptions(
                grid_step_rad=math.radians(self.grid_step_deg), theta_bounds=theta_bounds
            )
        return OptimizerOptions(
            grid_step_rad=math.radians(self.grid_step_deg),
            theta_bounds=(math.radians(fov_deg[0]), math.radians(fov_deg[1])),
            phi_bounds=(0.0, 2.0 * math.pi),
        )

    def _build_estimators(self, blocks):
        self.estimators = []
        if not blocks:
            raise ConfigError("at least one estimator is required")
        for block in blocks:
            est_id = _require(block, "id", "estimators[]")
            kind = _require(block, "kind", f"estimator {est_id}")
            model_id = block.get("model", next(iter(self.models)))
            if model_id not in self.models:
                raise ConfigError(f"estimator {est_id}: unknown model id {model_id!r}")
            bundle = self.models[model_id]
            fov_variants = {}
            if block.get("fov_half", False):
                if not self.planar:
                    raise ConfigError("fov_half splits apply to planar sweeps only")
                low, high = self.fov_deg
                fov_variants = {"low": (low, 0.0), "high": (0.0, high)}
            else:
                fov_variants = {"": tuple(block.get("fov_deg", self.fov_deg))}
            entry = {
                "id": est_id,
                "kind": kind,
                "bundle": bundle,
                "variants": {},
                "fov_half": bool(block.get("fov_half", False)),
            }
            for name, fov in fov_variants.items():
                opts = self._options_for(fov)
                if kind in ("nc-ml", "nc-rc"):
                    tables = gain_tables(bundle["gain"], opts)
                elif kind == "c-ml":
                    tables = response_tables(bundle["response"], opts)
                elif kind == "p-ml":
                    if "polarimetric" not in bundle:
                        raise ConfigError(f"estimator {est_id}: model lacks a cross-polarized fit")
                    tables = polarimetric_tables(bundle["polarimetric"], opts)
                else:
                    raise ConfigError(f"unknown estimator kind {kind!r}")
                entry["variants"][name] = (opts, tables)
            self.estimators.append(entry)

    # -- per-trial execution -------------------------------------------------

    def _variant_for(self, entry, scenario: Scenario):
        if not entry["fov_half"]:
            return entry["variants"][""]
        return entry["variants"]["low" if scenario.directions[0, 0] < 0 else "high"]

    def run_estimator(self, entry, scenario: Scenario, block, extra_seed) -> dict:
        """One estimator on one snapshot block; returns per-parameter estimates."""
        opts, tables = self._variant_for(entry, scenario)
        kind = entry["kind"]
        if kind == "nc-ml":
            observation = NcObservation(rss(block), scenario.snapshots)
            result = nc_ml(observation, entry["bundle"]["gain"], opts, tables)
        elif kind == "nc-rc":
            rng = np.random.Generator(np.random.PCG64(extra_seed))
            noise = math.sqrt(scenario.noise_power_w / 2.0) * (
                rng.standard_normal((block.samples.shape[0], scenario.snapshots))
                + 1j * rng.standard_normal((block.samples.shape[0], scenario.snapshots))
            )
            estimated_noise = noise_power_estimate(noise) if scenario.noise_power_w > 0 else 0.0
            observation = NcObservation(rss(block), scenario.snapshots)
            result = nc_rc(observation, estimated_noise, entry["bundle"]["gain"], opts, tables)
        elif kind == "c-ml":
            result = c_ml(sample_cov(block), entry["bundle"]["response"], scenario.num_signals, opts, tables)
        else:
            result = p_ml(sample_cov(block), entry["bundle"]["polarimetric"], scenario.num_signals, opts, tables)
        estimates = {"theta": np.asarray(result.theta, dtype=float)}
        if result.phi is not None:
            estimates["phi"] = np.asarray(result.phi, dtype=float)
        if result.gamma is not None:
            estimates["gamma"] = np.asarray(result.gamma, dtype=float)
            estimates["beta"] = np.asarray(result.beta, dtype=float)
        return estimates

    def crb_for(self, entry, scenario: Scenario, signal_cov) -> dict:
        """Per-parameter CRB variances at the scenario truth (truth models)."""
        kind = entry["kind"]
        theta = scenario.directions[:, 0]
        if scenario.noise_power_w == 0.0:
            # perfect-information limit: every bound collapses to zero
            count = scenario.num_signals
            names = ["theta"] if self.planar else ["theta", "phi"]
            if kind == "p-ml":
                names += ["gamma", "beta"]
            return {name: np.zeros(count) for name in names}
        if kind in ("nc-ml", "nc-rc"):
            zeta = (
                [theta[0], scenario.powers_w[0], scenario.noise_power_w]
                if self.planar
                else [theta[0], scenario.directions[0, 1], scenario.powers_w[0], scenario.noise_power_w]
            )
            result = fim_noncoherent(zeta, self.truth_gain, scenario.snapshots, reduced=(kind == "nc-rc"))
            out = {"theta": np.array([result.crb_of("theta")])}
            if not self.planar:
                out["phi"] = np.array([result.crb_of("phi")])
            return out
        if kind == "c-ml":
            result = crb_coherent(
                scenario.directions, self.truth_co, signal_cov, scenario.noise_power_w, scenario.snapshots
            )
            count = scenario.num_signals
            out = {"theta": np.array([result.crb[p, p] for p in range(count)])}
            if not self.planar:
                out["phi"] = np.array([result.crb[count + p, count + p] for p in range(count)])
            return out
        result = crb_polarimetric(
            scenario.directions,
            scenario.polarizations,
            self.truth_pol,
            signal_cov,
            scenario.noise_power_w,
            scenario.snapshots,
        )
        count = scenario.num_signals
        blocks = ["theta", "gamma", "beta"] if self.planar else ["theta", "phi", "gamma", "beta"]
        return {
            name: np.array([result.crb[i * count + p, i * count + p] for p in range(count)])
            for i, name in enumerate(blocks)
        }


# ---------------------------------------------------------------------------
# Scenario construction per axis point and trial
# ---------------------------------------------------------------------------


def _signal_block(config: dict) -> dict:
    return config.get("signal", {})


def _cycle_values(block, default_lo, default_hi, default_step):
    if block is None:
        block = {"start": default_lo, "stop": default_hi, "step": default_step}
    if isinstance(block, (list, tuple)):
        return [float(v) for v in block]
    start, stop, step = float(block["start"]), float(block["stop"]), float(block["step"])
    count = int(round((stop - start) / step)) + 1
    return [start + k * step for k in range(count)]


def _scenario_for_trial(workspace: Workspace, axis: str, axis_value: float, trial: int, rng) -> Scenario:
    config = workspace.config
    signal = _signal_block(config)
    noise_power = workspace.noise_power
    snapshots = workspace.snapshots
    polarized = "polarization" in signal

    if axis == AXIS_SNR:
        snr_db = axis_value
    else:
        snr_db = float(signal.get("snr_db", 20.0))
    if "power_w" in signal:
        power = float(signal["power_w"])
    elif noise_power > 0.0:
        power = noise_power * 10.0 ** (snr_db / 10.0)
    else:
        raise ConfigError("zero noise power needs an explicit signal.power_w")

    if axis == AXIS_DELTA:
        second = signal.get("second_signal", {})
        theta_2 = math.radians(float(second.get("theta_deg", 30.0)))
        offset_db = float(second.get("power_offset_db", -6.0))
        theta_1 = theta_2 - math.radians(axis_value)
        powers = np.array([power, power * 10.0 ** (offset_db / 10.0)])
        directions = np.array([[theta_1, 0.0], [theta_2, 0.0]])
        return Scenario(directions, powers, snapshots, noise_power, waveform=workspace.waveform)

    if axis == AXIS_THETA:
        theta = math.radians(axis_value)
        phi = math.radians(float(signal.get("phi_deg", 0.0)))
    else:  # SNR axis: cycle the truth over the evaluation grid or draw it
        if workspace.planar and not polarized:
            cycle = _cycle_values(
                signal.get("eval_theta_deg"), workspace.fov_deg[0] + 5.0, workspace.fov_deg[1] - 5.0, 10.0
            )
            theta = math.radians(cycle[trial % len(cycle)])
            phi = 0.0
        else:
            low, high = (math.radians(v) for v in workspace.fov_deg)
            theta = float(rng.uniform(low, high))
            phi = float(rng.uniform(0.0, 2.0 * math.pi))

    polarization = None
    if polarized:
        pol_cfg = signal["polarization"]
        gamma_range = pol_cfg.get("gamma_deg", [10.0, 80.0])
        beta_range = pol_cfg.get("beta_deg", [-180.0, 180.0])
        gamma = float(rng.uniform(math.radians(gamma_range[0]), math.radians(gamma_range[1])))
        beta = float(rng.uniform(math.radians(beta_range[0]), math.radians(beta_range[1])))
        polarization = PolarizationState(gamma, beta)

    return Scenario.single(
        theta,
        phi,
        power_w=power,
        snapshots=snapshots,
        noise_power_w=noise_power,
        polarization=polarization,
        waveform=workspace.waveform,
    )


def _signal_model(workspace: Workspace, scenario: Scenario):
    return workspace.truth_pol if scenario.polarizations is not None else workspace.truth_co


def _angular_errors(estimates: dict, scenario: Scenario, planar: bool) -> dict:
    """Per-parameter signed errors with min-permutation assignment for P > 1.

    Azimuth and polarization-phase errors are wrapped to (-pi, pi];
    inclination and the planar cut angle use plain differences.
    """
    count = scenario.num_signals
    truth = {"theta": scenario.directions[:, 0]}
    if not planar:
        truth["phi"] = scenario.directions[:, 1]
    if scenario.polarizations is not None:
        truth["gamma"] = np.array([p.gamma for p in scenario.polarizations])
        truth["beta"] = np.array([p.beta for p in scenario.polarizations])

    def wrapped(name, difference):
        if name in ("phi", "beta"):
            return np.remainder(difference + math.pi, 2.0 * math.pi) - math.pi
        return difference

    if count == 1:
        return {
            name: wrapped(name, estimates[name] - truth[name])
            for name in estimates
            if name in truth
        }
    best = None
    best_cost = math.inf
    for perm in itertools.permutations(range(count)):
        order = np.array(perm)
        cost = float(np.sum((estimates["theta"][order] - truth["theta"]) ** 2))
        if cost < best_cost:
            best_cost = cost
            best = order
    return {
        name: wrapped(name, estimates[name][best] - truth[name])
        for name in estimates
        if name in truth
    }


# ---------------------------------------------------------------------------
# Runs
# ---------------------------------------------------------------------------


def run_sweep(config: dict, output_prefix=None) -> list[SweepRecord]:
    """Execute a sweep; returns records and optionally writes CSV + sidecar."""
    workspace = Workspace(config)
    sweep = _require(config, "sweep", "config")
    axis = sweep.get("axis", AXIS_SNR)
    if axis not in (AXIS_SNR, AXIS_THETA, AXIS_DELTA):
        raise ConfigError(f"unknown sweep axis {axis!r}")
    values = _axis_values(sweep)
    trials = int(config.get("trials", 1000))
    if trials < 1:
        raise ConfigError("trials must be at least 1")

    records = []
    for axis_index, axis_value in enumerate(values):
        error_lists = {e["id"]: {} for e in workspace.estimators}
        crb_lists = {e["id"]: {} for e in workspace.estimators}
        failures = {e["id"]: 0 for e in workspace.estimators}
        ambiguous = {e["id"]: 0 for e in workspace.estimators}
        for trial in range(trials):
            scenario_rng = np.random.Generator(
                np.random.PCG64(np.random.SeedSequence(workspace.seed, spawn_key=(axis_index, trial, 0)))
            )
            scenario = _scenario_for_trial(workspace, axis, axis_value, trial, scenario_rng)
            block = gen_snapshots(
                scenario,
                _signal_model(workspace, scenario),
                np.random.SeedSequence(workspace.seed, spawn_key=(axis_index, trial, 1)),
            )
            signal_cov = realized_signal_cov(block)
            for entry in workspace.estimators:
                try:
                    estimates = workspace.run_estimator(
                        entry,
                        scenario,
                        block,
                        np.random.SeedSequence(workspace.seed, spawn_key=(axis_index, trial, 2)),
                    )
                except Exception:
                    failures[entry["id"]] += 1
                    continue
                errors = _angular_errors(estimates, scenario, workspace.planar)
                crbs = workspace.crb_for(entry, scenario, signal_cov)
                if np.any(np.abs(errors["theta"]) > AMBIGUITY_THRESHOLD_RAD):
                    ambiguous[entry["id"]] += 1
                multi = scenario.num_signals > 1
                for name, err in errors.items():
                    err = np.atleast_1d(err)
                    bound = np.atleast_1d(crbs[name])
                    for p in range(err.size):
                        key = f"{name}_{p}" if multi else name
                        error_lists[entry["id"]].setdefault(key, []).append(err[p])
                        crb_lists[entry["id"]].setdefault(key, []).append(bound[p])
        for entry in workspace.estimators:
            est_id = entry["id"]
            for name in error_lists[est_id]:
                errs = np.asarray(error_lists[est_id][name])
                crbs = np.asarray(crb_lists[est_id][name])
                records.append(
                    SweepRecord(
                        axis=axis,
                        axis_value=float(axis_value),
                        estimator=est_id,
                        param=name,
                        rmse_rad=float(np.sqrt(np.mean(errs**2))),
                        crb_rad=float(np.sqrt(np.mean(crbs))),
                        trials=trials,
                        failures=failures[est_id],
                        ambiguous=ambiguous[est_id],
                    )
                )
    if output_prefix is not None:
        write_sweep_csv(records, workspace, output_prefix)
    return records


def write_sweep_csv(records, workspace: Workspace, prefix) -> str:
    path = f"{prefix}.csv"
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for record in records:
            writer.writerow(
                [
                    SWEEP_SCHEMA_VERSION,
                    workspace.hash,
                    record.axis,
                    repr(record.axis_value),
                    record.estimator,
                    record.param,
                    repr(math.degrees(record.rmse_rad)),
                    repr(math.degrees(record.crb_rad)),
                    repr(record.ratio),
                    record.trials,
                    record.failures,
                    record.ambiguous,
                ]
            )
    _write_sidecar(workspace, prefix)
    return path


def _write_sidecar(workspace: Workspace, prefix) -> None:
    sidecar = {
        "schema_version": SWEEP_SCHEMA_VERSION,
        "config_hash": workspace.hash,
        "config": workspace.config,
        "seed": workspace.seed,
        "package": "mmadoa 0.1.0",
    }
    with open(f"{prefix}.json", "w", encoding="utf-8") as handle:
        json.dump(sidecar, handle, indent=1, sort_keys=True)
        handle.write("\n")


def run_surface(config: dict, output_prefix=None) -> list[dict]:
    """RMSE / CRB / ratio on a direction grid at fixed SNR (long format)."""
    workspace = Workspace(config)
    if workspace.planar:
        raise ConfigError("surface runs need a full-sphere antenna")
    surface = config.get("surface", {})
    thetas = _cycle_values(surface.get("theta_deg"), 10.0, 80.0, 10.0)
    phis = _cycle_values(surface.get("phi_deg"), 0.0, 330.0, 30.0)
    trials = int(config.get("trials", 50))
    signal = _signal_block(config)
    snr_db = float(signal.get("snr_db", 10.0))
    if "power_w" in signal:
        power = float(signal["power_w"])
    elif workspace.noise_power > 0.0:
        power = workspace.noise_power * 10.0 ** (snr_db / 10.0)
    else:
        raise ConfigError("zero noise power needs an explicit signal.power_w")

    rows = []
    for t_index, theta_deg in enumerate(thetas):
        for p_index, phi_deg in enumerate(phis):
            scenario = Scenario.single(
                math.radians(theta_deg),
                math.radians(phi_deg),
                power_w=power,
                snapshots=workspace.snapshots,
                noise_power_w=workspace.noise_power,
                waveform=workspace.waveform,
            )
            errors = {e["id"]: {} for e in workspace.estimators}
            crbs = {e["id"]: {} for e in workspace.estimators}
            for trial in range(trials):
                block = gen_snapshots(
                    scenario,
                    workspace.truth_co,
                    np.random.SeedSequence(workspace.seed, spawn_key=(t_index, p_index, trial, 1)),
                )
                signal_cov = realized_signal_cov(block)
                for entry in workspace.estimators:
                    try:
                        estimates = workspace.run_estimator(
                            entry,
                            scenario,
                            block,
                            np.random.SeedSequence(
                                workspace.seed, spawn_key=(t_index, p_index, trial, 2)
                            ),
                        )
                    except Exception:
                        continue
                    err = _angular_errors(estimates, scenario, workspace.planar)
                    bound = workspace.crb_for(entry, scenario, signal_cov)
                    for name in err:
                        errors[entry["id"]].setdefault(name, []).extend(np.atleast_1d(err[name]))
                        crbs[entry["id"]].setdefault(name, []).extend(np.atleast_1d(bound[name]))
            for entry in workspace.estimators:
                for name in errors[entry["id"]]:
                    errs = np.asarray(errors[entry["id"]][name])
                    bound = float(np.sqrt(np.mean(np.asarray(crbs[entry["id"]][name]))))
                    rmse = float(np.sqrt(np.mean(errs**2)))
                    for metric, value in (
                        ("rmse", math.degrees(rmse)),
                        ("crb", math.degrees(bound)),
                        ("ratio", rmse / bound if bound > 0 else math.inf),
                    ):
                        rows.append(
                            {
                                "estimator": entry["id"],
                                "theta_deg": theta_deg,
                                "phi_deg": phi_deg,
                                "param": name,
                                "metric": metric,
                                "value": value,
                            }
                        )
    if output_prefix is not None:
        _write_long_csv(rows, SURFACE_COLUMNS, workspace, output_prefix, _surface_row)
    return rows


def _surface_row(workspace, row):
    return [
        SWEEP_SCHEMA_VERSION,
        workspace.hash,
        row["estimator"],
        repr(float(row["theta_deg"])),
        repr(float(row["phi_deg"])),
        row["param"],
        row["metric"],
        repr(float(row["value"])),
    ]


def _write_long_csv(rows, columns, workspace, prefix, to_row) -> str:
    path = f"{prefix}.csv"
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow(to_row(workspace, row))
    _write_sidecar(workspace, prefix)
    return path


def run_likelihood_map(config: dict, output_prefix=None) -> list[dict]:
    """Normalized [-1, 0] non-coherent and coherent objectives on a grid."""
    workspace = Workspace(config)
    if workspace.planar:
        raise ConfigError("likelihood maps need a full-sphere antenna")
    map_cfg = config.get("likelihood_map", {})
    step_deg = float(map_cfg.get("grid_step_deg", 3.0))
    signal = _signal_block(config)
    snr_db = float(signal.get("snr_db", 15.0))
    theta_true = math.radians(float(signal.get("theta_deg", 35.0)))
    phi_true = math.radians(float(signal.get("phi_deg", 178.0)))
    power = workspace.noise_power * 10.0 ** (snr_db / 10.0)
    scenario = Scenario.single(
        theta_true,
        phi_true,
        power_w=power,
        snapshots=workspace.snapshots,
        noise_power_w=workspace.noise_power,
        waveform=workspace.waveform,
    )
    block = gen_snapshots(
        scenario, workspace.truth_co, np.random.SeedSequence(workspace.seed, spawn_key=(0, 0, 1))
    )

    low, high = workspace.fov_deg
    thetas = np.radians(np.arange(low, high + 1e-9, step_deg))
    phis = np.radians(np.arange(0.0, 360.0 - 1e-9, step_deg))
    grid_theta = np.repeat(thetas, phis.size)
    grid_phi = np.tile(phis, thetas.size)

    gains = workspace.truth_gain.gain_matrix(grid_theta, grid_phi).T
    observed = rss(block)
    var = (
        workspace.noise_power**2 + 2.0 * workspace.noise_power * power * gains
    ) / workspace.snapshots
    residual = observed[None, :] - gains * power - workspace.noise_power
    nc_values = -np.sum(np.log(var), axis=1) - np.sum(residual**2 / var, axis=1)

    responses = workspace.truth_co.response_matrix(grid_theta, grid_phi).T
    cov = sample_cov(block)
    quad = np.real(np.einsum("km,mn,kn->k", responses.conj(), cov, responses))
    norms = np.maximum(np.sum(np.abs(responses) ** 2, axis=1), 1e-300)
    coherent_values = quad / norms - float(np.real(np.trace(cov)))

    def normalize(values):
        top, bottom = float(values.max()), float(values.min())
        return (values - top) / (top - bottom)

    rows = []
    for name, values in (("noncoherent", normalize(nc_values)), ("coherent", normalize(coherent_values))):
        for k in range(grid_theta.size):
            rows.append(
                {
                    "objective": name,
                    "theta_deg": math.degrees(grid_theta[k]),
                    "phi_deg": math.degrees(grid_phi[k]),
                    "value": float(values[k]),
                }
            )
    if output_prefix is not None:
        _write_long_csv(rows, LIKEMAP_COLUMNS, workspace, output_prefix, _likemap_row)
    return rows


def _likemap_row(workspace, row):
    return [
        SWEEP_SCHEMA_VERSION,
        workspace.hash,
        row["objective"],
        repr(float(row["theta_deg"])),
        repr(float(row["phi_deg"])),
        repr(float(row["value"])),
    ]
