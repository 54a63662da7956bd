#!/usr/bin/env python3
"""
Command-line entry point.
Reads configuration and dispatches to simulate / estimate / density /
experiment / tables / check.

Exit codes: 0 success, 1 config error, 2 numerical or I/O failure,
3 acceptance-check failure.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from .core.grid import TimeGrid
from .core.hurst import HurstModel
from .density.bernstein import fit_bernstein
from .density.kernel import fit_kde
from .density.policies import resolve_bandwidth, resolve_order
from .density.transforms import transform_from_config
from .errors import AcceptanceError, ConfigError, DomainError, NumericalError, ReportError
from .estimation.mle import estimate_bundle, load_estimates, save_estimates
from .runners.acceptance import SCALES, require_all, run_acceptance
from .runners.experiment import ExperimentConfig, run_experiment, run_sweep
from .runners.replicate import build_density
from .runners.report import REPORT_FORMATS, MetricsReport, emit_report
from .simulation.drift import build_drift
from .simulation.sde import load_bundle, save_bundle, simulate_bundle
from .utils.config import ConfigManager
from .utils.logging import RunLogger
from .utils.visualization import Plotter

logger = logging.getLogger(__name__)

# CLI flag -> dotted config key
FLAG_KEYS = {
    "seed": "global.seed",
    "workers": "global.workers",
    "hurst": "model.hurst",
    "horizon": "grid.horizon",
    "steps": "grid.steps",
    "fbm_method": "simulation.fbm_method",
    "density": "density.name",
    "n_subjects": "experiment.n_subjects",
    "replicates": "experiment.replicates",
    "known_effects": "experiment.known_effects",
    "m_policy": "estimator.bernstein.m_policy",
    "m": "estimator.bernstein.m",
    "kde_policy": "estimator.kernel.kde_policy",
    "h": "estimator.kernel.h",
    "out": "output.dir",
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config-dir', type=str, default='configs',
                        help='Configuration directory (defaults.yaml, experiments/, Sweep.yaml)')
    common.add_argument('--experiment', type=str, default=None,
                        help='Experiment preset under configs/experiments/')
    common.add_argument('--set', dest='overrides', action='append', default=[], metavar='KEY=VALUE',
                        help='Override any config key, e.g. --set model.hurst=0.8')
    common.add_argument('--log-level', type=str, default='INFO',
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    common.add_argument('--seed', type=int, help='Master seed')
    common.add_argument('--workers', type=int, help='Worker processes for replicates')
    common.add_argument('--hurst', type=float, help='Hurst index H in (1/2, 1)')
    common.add_argument('--horizon', type=float, help='Observation horizon T')
    common.add_argument('--steps', type=int, help='Grid steps N')
    common.add_argument('--fbm-method', type=str, choices=['cholesky', 'davies_harte'])
    common.add_argument('--density', type=str, help='Random-effect density name')
    common.add_argument('--n-subjects', type=int, help='Number of subjects n')
    common.add_argument('--replicates', type=int, help='Monte Carlo replicates')
    common.add_argument('--known-effects', action='store_const', const=True, default=None,
                        help='Feed the true effects to the density estimators')
    common.add_argument('--m-policy', type=str, choices=['lscv', 'fixed', 'theoretical_opt'])
    common.add_argument('--m', type=int, help='Bernstein order for m_policy=fixed')
    common.add_argument('--kde-policy', type=str, choices=['silverman_paper', 'silverman_classical', 'fixed'])
    common.add_argument('--h', type=float, help='Bandwidth for kde_policy=fixed')
    common.add_argument('--out', type=str, help='Output directory')

    parser = argparse.ArgumentParser(description='Random-effect fractional SDEs: simulation, MLE and Bernstein density estimation')
    sub = parser.add_subparsers(dest='command', required=True)

    simulate = sub.add_parser('simulate', parents=[common], help='Simulate and dump a trajectory bundle')
    simulate.add_argument('--replicate', type=int, default=0)
    simulate.add_argument('--file', type=str, default='bundle.csv', help='Bundle file name inside --out')

    estimate = sub.add_parser('estimate', parents=[common], help='Bundle CSV -> effects CSV')
    estimate.add_argument('--bundle', type=str, required=True)
    estimate.add_argument('--file', type=str, default='effects.csv')

    density = sub.add_parser('density', parents=[common], help='Effects CSV -> density CSV and SVG')
    density.add_argument('--effects', type=str, required=True)
    density.add_argument('--column', type=str, default='phi_hat')

    sub.add_parser('experiment', parents=[common], help='Full pipeline for one configuration')
    tables = sub.add_parser('tables', parents=[common], help='Sweep densities x sample sizes and render the tables')
    tables.add_argument('--sweep', type=str, default='Sweep.yaml')

    check = sub.add_parser('check', parents=[common], help='Run the acceptance property suite')
    check.add_argument('--scale', type=str, default='quick', choices=sorted(SCALES))
    check.add_argument('--only', type=str, nargs='+', default=None, help='Subset of checks to run')
    return parser


def flag_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Mirrored flags keep their argparse types; only --set values are read as YAML."""
    values = [(key, getattr(args, flag)) for flag, key in FLAG_KEYS.items() if getattr(args, flag, None) is not None]
    return ConfigManager.nest(values)


def load_config(args: argparse.Namespace) -> Dict[str, Any]:
    """defaults <- experiment preset <- --set overrides <- mirrored flags."""
    manager = ConfigManager(args.config_dir)
    overrides = ConfigManager._deep_merge_dicts(ConfigManager.parse_overrides(args.overrides), flag_overrides(args))
    return manager.get_full_config(args.experiment, overrides)


def output_dir(config: Dict[str, Any]) -> Path:
    return Path(str(config.get('output', {}).get('dir', 'results')))


def write_report(report: MetricsReport, config: Dict[str, Any]) -> List[Path]:
    formats = config.get('output', {}).get('formats', list(REPORT_FORMATS))
    written = []
    for fmt in formats:
        written.extend(emit_report(report, fmt, output_dir(config)))
    return written


def save_snapshot(args: argparse.Namespace, config: Dict[str, Any]) -> Path:
    """Resolved configuration next to the reports it produced."""
    path = output_dir(config) / "config.yaml"
    ConfigManager(args.config_dir).save_config(config, path)
    return path


def cmd_simulate(args: argparse.Namespace, config: Dict[str, Any]) -> None:
    cfg = ExperimentConfig.from_mapping(config)
    bundle = simulate_bundle(
        HurstModel(cfg.hurst),
        TimeGrid(cfg.horizon, cfg.steps),
        build_drift(cfg.drift),
        build_density(cfg),
        cfg.n_subjects,
        cfg.seed,
        x0=cfg.x0,
        replicate=args.replicate,
        fbm_method=cfg.fbm_method,
        max_cholesky_steps=cfg.max_cholesky_steps,
    )
    path = output_dir(config) / args.file
    save_bundle(bundle, path)
    logger.info("Wrote %d trajectories to %s", bundle.n_subjects, path)


def cmd_estimate(args: argparse.Namespace, config: Dict[str, Any]) -> None:
    bundle = load_bundle(args.bundle)
    estimates = estimate_bundle(bundle)
    path = output_dir(config) / args.file
    save_estimates(estimates, path, bundle.true_effects)
    logger.info("Wrote %d effect estimates to %s", len(estimates), path)


def cmd_density(args: argparse.Namespace, config: Dict[str, Any]) -> None:
    cfg = ExperimentConfig.from_mapping(config)
    frame = load_estimates(args.effects)
    if args.column not in frame.columns:
        raise ConfigError(f"Effects file has no column '{args.column}'")
    samples = frame[args.column].to_numpy(dtype=float)
    transform_config = (config.get('density', {}) or {}).get('transform')
    transform = transform_from_config(transform_config) if transform_config else None
    if transform is not None:
        samples = transform.forward(samples)

    needs_truth = cfg.m_policy == 'theoretical_opt'
    truth_model = build_density(cfg).model if needs_truth else None
    m = resolve_order(samples, cfg.m_policy, cfg.m, cfg.m_grid, truth_model, cfg.bias_constant)
    h = resolve_bandwidth(samples, cfg.kde_policy, cfg.h)
    x = cfg.eval_points()
    bernstein = fit_bernstein(samples, m)(x)
    kde = fit_kde(samples, h)(x)

    truth = build_density(cfg).pdf(x) if transform is None else np.full(x.shape, np.nan)
    out = pd.DataFrame({"x": x})
    if transform is None:
        out["f_true"] = truth
    out["f_bernstein"] = bernstein
    out["f_kde"] = kde
    if transform is not None:
        interior = (x > 0.0) & (x < 1.0)
        y = np.full(x.shape, np.nan)
        y[interior] = transform.inverse(x[interior])
        jacobian = np.full(x.shape, np.nan)
        jacobian[interior] = transform.density_jacobian(y[interior])
        out["y"] = y
        out["f_bernstein_y"] = bernstein * jacobian
        out["f_kde_y"] = kde * jacobian

    directory = output_dir(config)
    try:
        directory.mkdir(parents=True, exist_ok=True)
        out.to_csv(directory / "density.csv", index=False)
    except OSError as exc:
        raise ReportError(f"Could not write density: {exc}", str(directory)) from exc

    plotter = Plotter()
    fig = plotter.plot_density_overlay(x, truth, bernstein, kde, title=f"m = {m}, h = {h:.4f}")
    plotter.save_figure(fig, directory / "density.svg")
    logger.info("Fitted m=%d, h=%.4f on %d effects; wrote %s", m, h, samples.size, directory)


def cmd_experiment(args: argparse.Namespace, config: Dict[str, Any]) -> None:
    run_logger = RunLogger(config.get('global', {}).get('log_dir', 'logs'), args.experiment)
    try:
        report = run_experiment(config, run_logger)
    finally:
        run_logger.save_logs()
    for path in write_report(report, config):
        logger.info("Wrote %s", path)
    logger.info("Wrote %s", save_snapshot(args, config))


def cmd_tables(args: argparse.Namespace, config: Dict[str, Any]) -> None:
    manager = ConfigManager(args.config_dir)
    sweep = manager.load_sweep(args.sweep)
    run_logger = RunLogger(config.get('global', {}).get('log_dir', 'logs'), args.experiment or "tables")
    try:
        report = run_sweep(config, sweep, run_logger)
    finally:
        run_logger.save_logs()
    for path in write_report(report, config):
        logger.info("Wrote %s", path)
    logger.info("Wrote %s", save_snapshot(args, config))


def cmd_check(args: argparse.Namespace, config: Dict[str, Any]) -> None:
    glob = config.get('global', {}) or {}
    results = run_acceptance(args.scale, int(glob.get('seed', 41)), int(glob.get('workers', 1)), args.only)
    for result in results:
        print(result)
    require_all(results)


COMMANDS = {
    'simulate': cmd_simulate,
    'estimate': cmd_estimate,
    'density': cmd_density,
    'experiment': cmd_experiment,
    'tables': cmd_tables,
    'check': cmd_check,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=args.log_level, format='%(asctime)s %(levelname)s %(name)s: %(message)s')

    try:
        config = load_config(args)
        COMMANDS[args.command](args, config)
    except (ConfigError, DomainError) as exc:
        logger.error("Configuration error: %s", exc)
        return 1
    except (NumericalError, ReportError) as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return 2
    except AcceptanceError as exc:
        logger.error("%s", exc)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
