"""
Command-line parser and text reports.
"""

import argparse
import os
from typing import List, Mapping, Optional, Sequence

import numpy as np

from src.models.bipartite_model import RegimeReport
from src.models.scenarios import SCENARIO_REGISTRY
from src.models.thermo import ThermoTrajectory
from src.models.verification import VerificationReport
from src.utils.parameters import APPROACHES, DEFAULT_OUTPUT_DIR, DEFAULT_WORKERS, OUTPUT_DIR_ENV


def default_output_dir() -> str:
    return os.environ.get(OUTPUT_DIR_ENV) or DEFAULT_OUTPUT_DIR


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    """
    Build the argument parser with one subcommand per operation.

    Returns:
        Configured ArgumentParser
    """
    parser = argparse.ArgumentParser(
        prog="thermoduet",
        description="Energy exchange between two coupled sets of thermal bosonic modes"
    )
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings only")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="scenario configuration file (INI)")
    common.add_argument("--seed", type=_non_negative_int, default=None, help="override the frequency-sampling seed")

    outputs = argparse.ArgumentParser(add_help=False)
    outputs.add_argument(
        "--out", default=None,
        help=f"output directory (default: ${OUTPUT_DIR_ENV} or ./{DEFAULT_OUTPUT_DIR})"
    )
    outputs.add_argument(
        "--tol-quad", type=_positive_float, default=None,
        help="absolute first-law tolerance for md quantities"
    )

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common, outputs], help="simulate one scenario and write CSV files")
    sub.add_parser("verify-analytic", parents=[common], help="compare with the homogeneous closed forms")
    sub.add_parser("verify-fock", parents=[common], help="compare with truncated Fock-space evolution")
    sweep = sub.add_parser("sweep", parents=[common, outputs], help="run one scenario per axis value")
    sweep.add_argument("--workers", type=_positive_int, default=DEFAULT_WORKERS,
                       help="concurrent sweep points")
    sub.add_parser("classify", parents=[common], help="print the regime report only")
    sub.add_parser("presets", help="list the named scenario presets")
    return parser


def render_regime_report(report: RegimeReport) -> str:
    """Multi-line regime summary."""
    lines = [
        "Regime",
        f"  nu1 = {report.nu1:.6g}   nu2 = {report.nu2:.6g}",
        f"  Delta = {report.delta:.6g}   Gamma = {report.big_gamma:.6g}   Omega = {report.big_omega:.6g}",
        f"  |Delta|/Gamma = {report.detuning_ratio:.4g} -> {report.coupling_regime}",
        f"  collectivity: subsystem 1 {report.collectivity[0]}, subsystem 2 {report.collectivity[1]}",
    ]
    lines.extend(f"  note: {note}" for note in report.notes)
    return "\n".join(lines)


def render_trajectory_summary(trajectory: ThermoTrajectory) -> str:
    """Final-time values and diagnostics of one run."""
    lines = [f"Final values at t = {trajectory.grid[-1]:.6g}"]
    header = "  " + "".join(f"{name:>14}" for name in ("", *APPROACHES))
    lines.append(header)
    for x in (1, 2):
        for label, table in (("dU", trajectory.du), ("dQ", trajectory.dq), ("dW", trajectory.dw)):
            cells = "".join(f"{table[(x, a)][-1]:>14.6g}" for a in APPROACHES)
            lines.append(f"  {label + '_' + str(x):>14}{cells}")
    lines.append(f"  energy drift {trajectory.energy_drift:.2e}, excitation drift {trajectory.trace_drift:.2e}")
    missing = {x: int(trajectory.md_missing[x].sum()) for x in (1, 2)}
    if any(missing.values()):
        lines.append(f"  md samples missing: {missing[1]} (subsystem 1), {missing[2]} (subsystem 2)")
    return "\n".join(lines)


def render_verification(report: VerificationReport) -> str:
    """One line per check plus the overall verdict."""
    lines = [f"Verification ({report.title})"]
    for check in report.checks:
        status = "ok" if check.passed else "FAIL"
        lines.append(f"  {check.name:<16} {check.deviation:>11.3e}  <= {check.threshold:.0e}  {status}")
    lines.extend(f"  note: {note}" for note in report.notes)
    lines.append("PASS" if report.passed else f"FAIL ({len(report.failures())} checks)")
    return "\n".join(lines)


def render_sweep_summary(axis: str, rows: Sequence[Mapping]) -> str:
    lines = [f"Sweep over {axis}"]
    for row in rows:
        value = row[axis]
        if row["status"] != "ok":
            lines.append(f"  {axis} = {value:<12g} failed: {row['error']}")
            continue
        ratios = [row.get(f"ratio_dQ_{a}") for a in APPROACHES]
        text = ", ".join(
            f"{a} {r:.2f}" for a, r in zip(APPROACHES, ratios) if r is not None and np.isfinite(r)
        )
        band = f"{row['balance_in_band']}/{row['balance_checked']} in band" if "balance_in_band" in row else ""
        lines.append(f"  {axis} = {value:<12g} {row['coupling_regime']:<12} heat balance ratio: {text}  {band}".rstrip())
    return "\n".join(lines)


def render_presets() -> str:
    lines = ["Scenario presets"]
    for name, scenario in sorted(SCENARIO_REGISTRY.items()):
        lines.append(f"  {name:<32} {scenario.description}")
    return "\n".join(lines)


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)
