"""
Command-line entry point for the coupled bosonic-bath thermodynamics simulation.
"""

import logging
import sys
from dataclasses import dataclass, replace
from multiprocessing import Pool, cpu_count
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from src.models.bipartite_model import RegimeReport, classify_regime
from src.models.thermo import (
    ThermoTrajectory,
    balance_band_count,
    balance_ratio,
    compute_trajectory,
    has_plateau,
    plateau_ratio
)
from src.models.verification import verify_analytic, verify_fock
from src.ui.cli import (
    default_output_dir,
    parse_args,
    render_presets,
    render_regime_report,
    render_sweep_summary,
    render_trajectory_summary,
    render_verification
)
from src.utils.config import ScenarioConfig, SweepConfig, load_config, load_sweep_config
from src.utils.errors import (
    ConfigError,
    EigensolverError,
    ParameterError,
    PhysicsError,
    VerificationFailure
)
from src.utils.export import (
    write_metadata,
    write_spectrum_csv,
    write_summary_csv,
    write_trajectory_csv
)
from src.utils.logging_setup import configure_logging
from src.utils.parameters import APPROACHES

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PHYSICS = 3
EXIT_VERIFICATION = 4


@dataclass
class SimulationResult:
    """Everything one `run` produces."""

    config: ScenarioConfig
    report: RegimeReport
    trajectory: ThermoTrajectory
    paths: Dict[str, Path]


def run_simulation(
    config: ScenarioConfig,
    out_dir: Path,
    tol_quad: Optional[float] = None
) -> SimulationResult:
    """
    Run the complete simulation of one scenario.

    Args:
        config: Scenario configuration
        out_dir: Directory for the CSV and metadata files
        tol_quad: Absolute md first-law tolerance (default: relative to dU^md range)

    Returns:
        SimulationResult with the regime report, trajectory and written paths
    """
    report = classify_regime(config.params)
    logger.info("scenario %s: %s coupling (|Delta|/Gamma = %.4g)",
                config.name, report.coupling_regime, report.detuning_ratio)

    trajectory = compute_trajectory(config.params, config.grid(), tol_quad=tol_quad)

    missing = int(trajectory.md_missing[1].sum() + trajectory.md_missing[2].sum())
    if missing:
        logger.warning("%d md samples flagged missing (written as empty fields)", missing)
    violations = {key: n for key, n in trajectory.first_law_violations().items() if n}
    for (x, approach), count in violations.items():
        logger.warning("first law exceeds tol_quad on %d samples (subsystem %d, %s)", count, x, approach)

    out_dir = Path(out_dir)
    paths = {
        "trajectory": write_trajectory_csv(out_dir / f"{config.name}.csv", trajectory, config),
        "spectrum": write_spectrum_csv(
            out_dir / f"{config.name}_spectrum.csv", trajectory.eigenvalues, config.params.omega1
        ),
        "metadata": write_metadata(out_dir / f"{config.name}_meta.ini", config, report, trajectory),
    }
    return SimulationResult(config=config, report=report, trajectory=trajectory, paths=paths)


def summarize_point(axis: str, value, result: SimulationResult) -> Dict:
    """Summary row of one successful sweep point."""
    trajectory = result.trajectory
    row = {
        axis: value,
        "status": "ok",
        "error": "",
        "coupling_regime": result.report.coupling_regime,
        "detuning_ratio": result.report.detuning_ratio,
        "energy_drift": trajectory.energy_drift,
        "md_missing": int(trajectory.md_missing[1].sum() + trajectory.md_missing[2].sum()),
    }
    for quantity in ("dU", "dQ", "dW"):
        for approach in APPROACHES:
            row[f"ratio_{quantity}_{approach}"] = balance_ratio(trajectory, quantity=quantity, approach=approach)
    row["balance_in_band"], row["balance_checked"] = balance_band_count(trajectory)
    for x in (1, 2):
        series = trajectory.du[(x, "wc")]
        row[f"plateau_ratio_{x}"] = plateau_ratio(series)
        row[f"plateau_{x}"] = has_plateau(series)
    return row


def _sweep_point(task: Tuple[str, object, ScenarioConfig, Path, Optional[float]]) -> Dict:
    axis, value, config, out_dir, tol_quad = task
    try:
        result = run_simulation(config, out_dir, tol_quad)
    except (ParameterError, PhysicsError, EigensolverError) as exc:
        logger.warning("sweep point %s = %g failed: %s", axis, value, exc)
        return {axis: value, "status": "failed", "error": str(exc)}
    return summarize_point(axis, value, result)


def run_sweep(
    sweep: SweepConfig,
    out_dir: Path,
    workers: int = 1,
    tol_quad: Optional[float] = None
) -> List[Dict]:
    """
    Run every point of a sweep; failed points are recorded and the sweep continues.

    Args:
        sweep: Sweep configuration
        out_dir: Root output directory (a subdirectory per sweep is created)
        workers: Maximum concurrent points
        tol_quad: Absolute md first-law tolerance

    Returns:
        Summary rows in axis order
    """
    sweep_dir = Path(out_dir) / sweep.base.name
    tasks = [(sweep.axis, value, config, sweep_dir, tol_quad) for value, config in sweep.points()]
    workers = max(1, min(workers, len(tasks), cpu_count()))
    logger.info("sweeping %s over %d values with %d worker(s)", sweep.axis, len(tasks), workers)
    if workers == 1:
        rows = [_sweep_point(task) for task in tasks]
    else:
        with Pool(processes=workers) as pool:
            rows = pool.map(_sweep_point, tasks)
    write_summary_csv(sweep_dir / "summary.csv", sweep.axis, rows)
    return rows


def _apply_seed(config: ScenarioConfig, seed: Optional[int]) -> ScenarioConfig:
    return config if seed is None else config.with_params(seed=seed)


def _run_command(args) -> int:
    if args.command == "presets":
        print(render_presets())
        return EXIT_OK

    if args.command == "sweep":
        sweep = load_sweep_config(args.config)
        sweep = replace(sweep, base=_apply_seed(sweep.base, args.seed))
        rows = run_sweep(sweep, Path(args.out or default_output_dir()), args.workers, args.tol_quad)
        print(render_sweep_summary(sweep.axis, rows))
        return EXIT_OK

    config = _apply_seed(load_config(args.config), args.seed)

    if args.command == "classify":
        print(render_regime_report(classify_regime(config.params)))
        return EXIT_OK

    if args.command == "run":
        result = run_simulation(config, Path(args.out or default_output_dir()), args.tol_quad)
        print(render_regime_report(result.report))
        print(render_trajectory_summary(result.trajectory))
        for kind, path in result.paths.items():
            print(f"{kind}: {path}")
        return EXIT_OK

    if args.command == "verify-analytic":
        report = verify_analytic(config.params, config.grid())
    else:
        report = verify_fock(config.params)
    print(render_verification(report))
    if not report.passed:
        raise VerificationFailure(f"{len(report.failures())} checks exceeded their thresholds")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Main application entry point; returns the process exit code."""
    args = parse_args(argv)
    configure_logging(1 if args.verbose else -1 if args.quiet else 0)
    try:
        return _run_command(args)
    except (ConfigError, ParameterError) as exc:
        logger.error("%s", exc)
        return EXIT_CONFIG
    except (PhysicsError, EigensolverError) as exc:
        logger.error("%s", exc)
        return EXIT_PHYSICS
    except VerificationFailure as exc:
        logger.error("verification failed: %s", exc)
        return EXIT_VERIFICATION


if __name__ == "__main__":
    sys.exit(main())
