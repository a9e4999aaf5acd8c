"""Command-line front end.

Subcommands: ``synth`` emits a synthetic calibration file, ``fit`` fits and
stores a response model and reports residuals, ``simulate`` runs a single
scenario and prints the estimates, ``crb`` prints the bounds for a scenario,
and ``sweep`` / ``surface`` / ``likemap`` drive the Monte-Carlo harness from a
JSON config.  Any config field can be overridden with repeated
``--set dotted.key=value`` flags.

Exit codes: 0 on success, 2 for configuration errors, 3 for data errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .basis import BasisKind, BasisSpec
from .bounds import crb_coherent, fim_noncoherent
from .calibration import load_calibration, save_calibration, synth_antenna
from .errors import CalibrationFormatError, ConfigError
from .estimators import NcObservation, OptimizerOptions, c_ml, nc_ml, nc_rc
from .harness import noise_power_from_config, run_likelihood_map, run_surface, run_sweep
from .models import (
    fit_ait,
    fit_wm,
    fit_wm_gain,
    grid_residual,
    save_model,
    truncation_order,
)
from .signals import Scenario, gen_snapshots, realized_signal_cov, rss, sample_cov

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3


def _parse_override(text: str):
    if "=" not in text:
        raise ConfigError(f"override {text!r} must look like key=value")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip(), value


def _apply_override(config: dict, key: str, value) -> None:
    parts = key.split(".")
    node = config
    for part in parts[:-1]:
        if part not in node or not isinstance(node[part], dict):
            node[part] = {}
        node = node[part]
    node[parts[-1]] = value


def _load_config(path: str, overrides, extra=None) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            config = json.load(handle)
    except FileNotFoundError as exc:
        raise CalibrationFormatError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc.msg}") from exc
    if not isinstance(config, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    for item in overrides or []:
        key, value = _parse_override(item)
        _apply_override(config, key, value)
    # bare --dotted.key=value tokens override config fields directly
    for token in extra or []:
        if not token.startswith("--") or "=" not in token:
            raise ConfigError(f"unrecognized argument {token!r}; use --key=value")
        key, value = _parse_override(token[2:])
        _apply_override(config, key, value)
    return config


def _cmd_synth(args) -> int:
    cal, _ = synth_antenna(
        seed=args.seed,
        num_ports=args.ports,
        degree=args.degree,
        mode=args.mode,
        grid_step_deg=args.grid_step_deg,
        carrier_frequency_hz=args.frequency_hz,
        symmetry=args.symmetry,
        asymmetry=args.asymmetry,
    )
    save_calibration(cal, args.out)
    print(f"wrote {args.out}: {cal.num_ports} ports, {cal.grid.point_count} samples")
    return EXIT_OK


def _cmd_fit(args) -> int:
    cal = load_calibration(args.calibration)
    if args.kind == "ait":
        model = fit_ait(cal, args.sector_width_deg, args.overlap_deg)
    else:
        planar = cal.grid.is_planar
        if args.basis is not None:
            kind = BasisKind(args.basis)
        elif args.kind == "wm-gain":
            kind = BasisKind.REAL_FOURIER_1D if planar else BasisKind.REAL_SH
        else:
            kind = BasisKind.FOURIER_1D if planar else BasisKind.COMPLEX_SH
        if args.size is not None:
            size = args.size
        else:
            # |a|^2 carries twice the band limit of the response
            rule_kr = 2.0 * cal.kappa_rs if args.kind == "wm-gain" else cal.kappa_rs
            size = truncation_order(rule_kr, kind)
        spec = BasisSpec(kind, size)
        model = fit_wm_gain(cal, spec) if args.kind == "wm-gain" else fit_wm(cal, spec, args.slot)
    if args.kind == "wm":
        worst, rms = grid_residual(model, cal, args.slot)
        print(f"residual over grid: max {worst:.3e}, rms {rms:.3e}")
    save_model(model, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def _single_scenario(args, cal):
    noise_power = noise_power_from_config({"kind": "absolute", "watts": args.noise_watts})
    power = noise_power * 10.0 ** (args.snr_db / 10.0)
    theta = math.radians(args.theta_deg)
    phi = math.radians(args.phi_deg)
    return Scenario.single(
        theta, phi, power_w=power, snapshots=args.snapshots, noise_power_w=noise_power
    )


def _cmd_simulate(args) -> int:
    cal = load_calibration(args.calibration)
    planar = cal.grid.is_planar
    kind = BasisKind.FOURIER_1D if planar else BasisKind.COMPLEX_SH
    model = fit_wm(cal, BasisSpec(kind, truncation_order(cal.kappa_rs, kind)))
    scenario = _single_scenario(args, cal)
    block = gen_snapshots(scenario, model, args.seed)
    opts = OptimizerOptions()
    if args.estimator == "c-ml":
        result = c_ml(sample_cov(block), model, 1, opts)
    else:
        gain_kind = BasisKind.REAL_FOURIER_1D if planar else BasisKind.REAL_SH
        # |a|^2 carries twice the band limit of the response
        gain_model = fit_wm_gain(
            cal, BasisSpec(gain_kind, truncation_order(2.0 * cal.kappa_rs, gain_kind))
        )
        observation = NcObservation(rss(block), scenario.snapshots)
        if args.estimator == "nc-ml":
            result = nc_ml(observation, gain_model, opts)
        else:
            result = nc_rc(observation, scenario.noise_power_w, gain_model, opts)
    line = f"theta_deg={math.degrees(result.theta[0]):+.4f}"
    if result.phi is not None:
        line += f" phi_deg={math.degrees(result.phi[0]):.4f}"
    line += f" objective={result.objective:.6g} converged={result.converged}"
    print(line)
    return EXIT_OK


def _cmd_crb(args) -> int:
    cal = load_calibration(args.calibration)
    planar = cal.grid.is_planar
    kind = BasisKind.FOURIER_1D if planar else BasisKind.COMPLEX_SH
    model = fit_wm(cal, BasisSpec(kind, truncation_order(cal.kappa_rs, kind)))
    scenario = _single_scenario(args, cal)
    block = gen_snapshots(scenario, model, args.seed)
    coherent = crb_coherent(
        scenario.directions,
        model,
        realized_signal_cov(block),
        scenario.noise_power_w,
        scenario.snapshots,
    )
    print("coherent:")
    for label, std in zip(coherent.labels, coherent.std):
        print(f"  sqrt CRB({label}) = {math.degrees(std):.6f} deg")
    gain_kind = BasisKind.REAL_FOURIER_1D if planar else BasisKind.REAL_SH
    gain_model = fit_wm_gain(
        cal, BasisSpec(gain_kind, truncation_order(2.0 * cal.kappa_rs, gain_kind))
    )
    theta, phi = scenario.directions[0]
    zeta = (
        [theta, scenario.powers_w[0], scenario.noise_power_w]
        if planar
        else [theta, phi, scenario.powers_w[0], scenario.noise_power_w]
    )
    noncoherent = fim_noncoherent(zeta, gain_model, scenario.snapshots)
    print("non-coherent:")
    for label, std in zip(noncoherent.labels, noncoherent.std):
        unit = " deg" if label in ("theta", "phi") else " W"
        value = math.degrees(std) if label in ("theta", "phi") else std
        print(f"  sqrt CRB({label}) = {value:.6g}{unit}")
    return EXIT_OK


def _cmd_run(args, runner) -> int:
    config = _load_config(args.config, args.set, getattr(args, "extra", None))
    output = args.out if args.out is not None else config.get("output")
    if output is None:
        raise ConfigError("an output prefix is required (config 'output' or --out)")
    runner(config, output)
    print(f"wrote {output}.csv and {output}.json")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmadoa", description="DoA estimation with multi-mode antennas"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="generate a synthetic calibration file")
    synth.add_argument("--seed", type=int, default=1)
    synth.add_argument("--ports", type=int, default=4)
    synth.add_argument("--degree", type=int, default=5)
    synth.add_argument("--mode", choices=["full-sphere-3d", "xz-cut-2d"], default="xz-cut-2d")
    synth.add_argument("--grid-step-deg", type=float, default=5.0)
    synth.add_argument("--frequency-hz", type=float, default=7.25e9)
    synth.add_argument("--symmetry", choices=["none", "gain-mirror"], default="none")
    synth.add_argument("--asymmetry", type=float, default=0.0)
    synth.add_argument("--out", required=True)
    synth.set_defaults(func=_cmd_synth)

    fit = sub.add_parser("fit", help="fit a response model and report residuals")
    fit.add_argument("--calibration", required=True)
    fit.add_argument("--kind", choices=["wm", "wm-gain", "ait"], default="wm")
    fit.add_argument("--basis", choices=[k.value for k in BasisKind], default=None)
    fit.add_argument("--size", type=int, default=None)
    fit.add_argument("--slot", choices=["co", "cross"], default="co")
    fit.add_argument("--sector-width-deg", type=float, default=30.0)
    fit.add_argument("--overlap-deg", type=float, default=15.0)
    fit.add_argument("--out", required=True)
    fit.set_defaults(func=_cmd_fit)

    for name, help_text in (
        ("simulate", "run one scenario and print estimates"),
        ("crb", "print bounds for one scenario"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--calibration", required=True)
        cmd.add_argument("--theta-deg", type=float, default=30.0)
        cmd.add_argument("--phi-deg", type=float, default=0.0)
        cmd.add_argument("--snr-db", type=float, default=20.0)
        cmd.add_argument("--snapshots", type=int, default=1000)
        cmd.add_argument("--noise-watts", type=float, default=1.0)
        cmd.add_argument("--seed", type=int, default=1)
        if name == "simulate":
            cmd.add_argument("--estimator", choices=["nc-ml", "nc-rc", "c-ml"], default="c-ml")
            cmd.set_defaults(func=_cmd_simulate)
        else:
            cmd.set_defaults(func=_cmd_crb)

    for name, runner in (
        ("sweep", run_sweep),
        ("surface", run_surface),
        ("likemap", run_likelihood_map),
    ):
        cmd = sub.add_parser(name, help=f"run a {name} from a JSON config")
        cmd.add_argument("--config", required=True)
        cmd.add_argument("--out", default=None)
        cmd.add_argument(
            "--set",
            action="append",
            metavar="KEY=VALUE",
            help="override a config field (dotted keys, JSON values)",
        )
        cmd.set_defaults(func=lambda args, runner=runner: _cmd_run(args, runner))

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    args.extra = extra
    try:
        if extra and args.command not in ("sweep", "surface", "likemap"):
            raise ConfigError(f"unrecognized arguments: {' '.join(extra)}")
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CalibrationFormatError, FileNotFoundError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
