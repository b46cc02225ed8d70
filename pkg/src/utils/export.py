"""
Flat-file outputs: trajectory CSV, run metadata, spectrum histogram and sweep summary.

Trajectory columns, in order (filtered by the selected output groups and roles):

    t_omega1
    dU_<x>_<approach>, dQ_<x>_<approach>, dW_<x>_<approach>   x in {1, 2}
    dU_I
    bal_dU_<approach>, bal_dQ_<approach>, bal_dW_<approach>
    K_trace_<x>

Energies are in units of omega1 and time is t * omega1. Missing md samples
are written as empty fields.
"""

import configparser
import csv
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Sequence

import numpy as np

from src.models.bipartite_model import RegimeReport
from src.models.thermo import ThermoTrajectory
from src.utils.config import ScenarioConfig
from src.utils.parameters import (
    APPROACHES,
    CSV_SCHEMA_VERSION,
    HISTOGRAM_BINS,
    OUTPUT_GROUPS,
    SUBSYSTEMS
)

logger = logging.getLogger(__name__)

_GROUP_PREFIX = {"energies": "dU", "heats": "dQ", "works": "dW"}


def format_value(value) -> str:
    """Shortest round-trip text for a float; empty for NaN."""
    value = float(value)
    if not np.isfinite(value):
        return ""
    return repr(value)


def trajectory_columns(
    outputs: Sequence[str] = OUTPUT_GROUPS,
    roles: Sequence[int] = SUBSYSTEMS
) -> List[str]:
    """Header of the trajectory CSV for a selection of groups and roles."""
    columns = ["t_omega1"]
    for group in ("energies", "heats", "works"):
        if group in outputs:
            prefix = _GROUP_PREFIX[group]
            columns.extend(f"{prefix}_{x}_{a}" for x in roles for a in APPROACHES)
    columns.append("dU_I")
    if "balances" in outputs:
        for prefix in ("dU", "dQ", "dW"):
            columns.extend(f"bal_{prefix}_{a}" for a in APPROACHES)
    if "effective_hamiltonian_trace" in outputs:
        columns.extend(f"K_trace_{x}" for x in roles)
    return columns


def trajectory_table(
    trajectory: ThermoTrajectory,
    omega1: float,
    outputs: Sequence[str] = OUTPUT_GROUPS,
    roles: Sequence[int] = SUBSYSTEMS
) -> Dict[str, np.ndarray]:
    """Column name -> series, energies scaled to units of omega1."""
    table = {"t_omega1": trajectory.grid * omega1}
    sources = {"dU": trajectory.du, "dQ": trajectory.dq, "dW": trajectory.dw}
    for group in ("energies", "heats", "works"):
        if group in outputs:
            prefix = _GROUP_PREFIX[group]
            for x in roles:
                for a in APPROACHES:
                    table[f"{prefix}_{x}_{a}"] = sources[prefix][(x, a)] / omega1
    table["dU_I"] = trajectory.u_i / omega1
    if "balances" in outputs:
        for index, prefix in enumerate(("dU", "dQ", "dW")):
            for a in APPROACHES:
                table[f"bal_{prefix}_{a}"] = trajectory.balances[a][index] / omega1
    if "effective_hamiltonian_trace" in outputs:
        for x in roles:
            table[f"K_trace_{x}"] = trajectory.k_trace[x] / omega1
    return table


def _write_csv(path: Path, fieldnames: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=list(fieldnames), extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def write_trajectory_csv(
    path: Path,
    trajectory: ThermoTrajectory,
    config: ScenarioConfig
) -> Path:
    """Write the trajectory CSV for one scenario."""
    columns = trajectory_columns(config.outputs, config.roles)
    table = trajectory_table(trajectory, config.params.omega1, config.outputs, config.roles)
    rows = (
        {name: format_value(table[name][i]) for name in columns}
        for i in range(len(trajectory))
    )
    _write_csv(Path(path), columns, rows)
    logger.info("wrote %s (%d rows, %d columns)", path, len(trajectory), len(columns))
    return Path(path)


def spectrum_histogram(eigenvalues: np.ndarray, bins: int = HISTOGRAM_BINS):
    """Normalized histogram of the eigenvalues: (bin edges, density)."""
    density, edges = np.histogram(np.asarray(eigenvalues, dtype=float), bins=bins, density=True)
    return edges, density


def write_spectrum_csv(path: Path, eigenvalues: np.ndarray, omega1: float, bins: int = HISTOGRAM_BINS) -> Path:
    """Write bin_left, bin_right, density of the spectrum in units of omega1."""
    edges, density = spectrum_histogram(np.asarray(eigenvalues) / omega1, bins)
    rows = (
        {
            "bin_left": format_value(edges[i]),
            "bin_right": format_value(edges[i + 1]),
            "density": format_value(density[i]),
        }
        for i in range(len(density))
    )
    _write_csv(Path(path), ("bin_left", "bin_right", "density"), rows)
    return Path(path)


def write_metadata(
    path: Path,
    config: ScenarioConfig,
    report: RegimeReport,
    trajectory: ThermoTrajectory
) -> Path:
    """Write run metadata (schema version, parameters, regime, diagnostics) as INI."""
    meta = configparser.ConfigParser(interpolation=None)
    meta["schema"] = {"version": CSV_SCHEMA_VERSION}
    params = config.params
    meta["scenario"] = {
        "n1": str(params.n1), "n2": str(params.n2),
        "omega1": repr(params.omega1), "omega2": repr(params.omega2),
        "g1": repr(params.g1), "g2": repr(params.g2),
        "gamma": repr(params.gamma),
        "temp1": repr(params.temp1), "temp2": repr(params.temp2),
        "sigma": repr(params.sigma), "seed": str(params.seed),
        "grid.t_max": repr(config.t_max), "grid.n_points": str(config.n_points),
        "outputs": ", ".join(config.outputs),
        "roles": ", ".join(str(x) for x in config.roles),
    }
    meta["regime"] = {
        "nu1": repr(report.nu1), "nu2": repr(report.nu2),
        "delta": repr(report.delta), "big_gamma": repr(report.big_gamma),
        "big_omega": repr(report.big_omega),
        "coupling_regime": report.coupling_regime,
        "collectivity": ", ".join(report.collectivity),
        "detuning_sign_flipped": str(report.detuning_sign_flipped).lower(),
        "nominal": str(report.nominal).lower(),
    }
    meta["diagnostics"] = {
        "energy_drift": repr(trajectory.energy_drift),
        "trace_drift": repr(trajectory.trace_drift),
        "tol_quad": repr(trajectory.tol_quad),
        "md_missing_1": str(int(trajectory.md_missing[1].sum())),
        "md_missing_2": str(int(trajectory.md_missing[2].sum())),
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        meta.write(f)
    return path


def summary_columns(axis: str) -> List[str]:
    columns = [axis, "status", "error", "coupling_regime", "detuning_ratio"]
    for prefix in ("dU", "dQ", "dW"):
        columns.extend(f"ratio_{prefix}_{a}" for a in APPROACHES)
    columns.extend(["balance_in_band", "balance_checked"])
    columns.extend(["plateau_ratio_1", "plateau_ratio_2", "plateau_1", "plateau_2",
                    "energy_drift", "md_missing"])
    return columns


def write_summary_csv(path: Path, axis: str, rows: Sequence[Mapping[str, Any]]) -> Path:
    """Write the sweep summary; floats formatted, other cells as text."""
    def cell(value):
        if isinstance(value, bool):
            return str(value).lower()
        if isinstance(value, (float, np.floating)):
            return format_value(value)
        return "" if value is None else str(value)

    formatted = ({key: cell(value) for key, value in row.items()} for row in rows)
    _write_csv(Path(path), summary_columns(axis), formatted)
    logger.info("wrote sweep summary %s (%d points)", path, len(rows))
    return Path(path)
