"""
Cross-checks of the numerical pipeline against the closed-form homogeneous
solution and against brute-force Fock-space evolution.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from src.models.analytic import (
    HomogeneousDerived,
    analytic_effective_hamiltonian,
    analytic_energies,
    analytic_heat_work,
    analytic_interaction_energy
)
from src.models.bipartite_model import HamiltonianMatrix, ModelParams, build_hamiltonian, sample_frequencies
from src.models.fock_oracle import FockConfig, FockOracle
from src.models.spectral_dynamics import GaussianDynamics
from src.models.thermo import ThermoTrajectory, compute_trajectory
from src.utils.errors import ParameterError
from src.utils.parameters import (
    FOCK_MAX_MODES,
    FOCK_ROUNDOFF_FLOOR,
    FOCK_TAIL_FACTOR,
    ORACLE_QUAD_RTOL,
    ORACLE_RTOL,
    RECONSTRUCTION_TOL
)

logger = logging.getLogger(__name__)

FOCK_PERIODS = 4
FOCK_SAMPLES = 81


@dataclass(frozen=True)
class Check:
    """One compared quantity."""

    name: str
    deviation: float
    threshold: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.deviation) and self.deviation <= self.threshold)


@dataclass
class VerificationReport:
    """Outcome of a verification run."""

    title: str
    checks: List[Check] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def add(self, name: str, deviation: float, threshold: float) -> Check:
        check = Check(name=name, deviation=float(deviation), threshold=threshold)
        self.checks.append(check)
        if not check.passed:
            logger.warning("%s: %s deviation %.3e exceeds %.1e", self.title, name, deviation, threshold)
        return check

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> List[Check]:
        return [check for check in self.checks if not check.passed]


def relative_deviation(numeric, reference) -> float:
    """
    max |numeric - reference| / max |reference| over samples finite on both sides.

    Falls back to the absolute deviation when the reference is identically zero.
    """
    numeric = np.asarray(numeric, dtype=float)
    reference = np.asarray(reference, dtype=float)
    mask = np.isfinite(numeric) & np.isfinite(reference)
    if not mask.any():
        return float("nan")
    error = float(np.max(np.abs(numeric[mask] - reference[mask])))
    scale = float(np.max(np.abs(reference[mask])))
    return error / scale if scale > 0 else error


def verify_analytic(
    params: ModelParams,
    grid: np.ndarray,
    h: Optional[HamiltonianMatrix] = None,
    trajectory: Optional[ThermoTrajectory] = None
) -> VerificationReport:
    """
    Compare the numerical pipeline with the homogeneous closed forms on one grid.

    Args:
        params: Homogeneous model parameters (sigma = 0)
        grid: Time grid starting at 0
        h: Hamiltonian to run the numerics on (defaults to the model's own)
        trajectory: Precomputed trajectory on `grid` for that Hamiltonian

    Returns:
        VerificationReport with one check per compared quantity

    Raises:
        ParameterError: sigma > 0
    """
    d = HomogeneousDerived.from_params(params)
    if h is None:
        h = build_hamiltonian(params, sample_frequencies(params))
    if trajectory is None:
        trajectory = compute_trajectory(params, grid, h=h)
    grid = trajectory.grid

    report = VerificationReport(title="analytic")
    spectrum = np.sort(np.asarray(trajectory.eigenvalues))
    scale = max(1.0, float(np.max(np.abs(d.spectrum()))))
    report.add("eigenvalues", np.max(np.abs(spectrum - d.spectrum())) / scale, RECONSTRUCTION_TOL)

    de1, de2, du1_md, du2_md = analytic_energies(grid, d)
    dq1, dw1, dq2, dw2 = analytic_heat_work(grid, d)
    reference = {
        "dU_1_wc": de1,
        "dU_2_wc": de2,
        "dU_1_int": -de2,
        "dU_2_int": -de1,
        "dU_1_bare": de1,
        "dU_2_bare": de2,
        "dW_1_bare": -analytic_interaction_energy(grid, d),
        "dU_1_md": du1_md,
        "dU_2_md": du2_md,
    }
    for name, expected in reference.items():
        kind, x, approach = name.split("_")
        table = {"dU": trajectory.du, "dW": trajectory.dw}[kind]
        report.add(name, relative_deviation(table[(int(x), approach)], expected), ORACLE_RTOL)
    report.add("dU_I", relative_deviation(trajectory.u_i, analytic_interaction_energy(grid, d)), ORACLE_RTOL)

    for x, n, eps in ((1, d.n1, d.eps1), (2, d.n2, d.eps2)):
        coefficients = analytic_effective_hamiltonian(grid, d, x)
        expected_trace = n * eps + coefficients.collective
        report.add(f"K_trace_{x}", relative_deviation(trajectory.k_trace[x], expected_trace), ORACLE_RTOL)

    quad = {"dQ_1_md": dq1, "dW_1_md": dw1, "dQ_2_md": dq2, "dW_2_md": dw2}
    for name, expected in quad.items():
        kind, x, approach = name.split("_")
        table = {"dQ": trajectory.dq, "dW": trajectory.dw}[kind]
        report.add(name, relative_deviation(table[(int(x), approach)], expected), ORACLE_QUAD_RTOL)

    missing = int(trajectory.md_missing[1].sum() + trajectory.md_missing[2].sum())
    if missing:
        report.notes.append(f"{missing} md samples missing and excluded from the comparison")
    return report


def verify_fock(
    params: ModelParams,
    n_samples: int = FOCK_SAMPLES,
    periods: int = FOCK_PERIODS,
    t_max: Optional[float] = None
) -> VerificationReport:
    """
    Compare Gaussian moments with truncated Fock-space evolution.

    The time window spans `periods` exchange periods 2 pi / Omega of the
    collective pair (or `t_max` when given or when the subsystems decouple).

    Raises:
        ParameterError: more than FOCK_MAX_MODES modes or an oversized Fock space
    """
    if params.n_modes > FOCK_MAX_MODES:
        raise ParameterError(
            f"Fock verification needs n1 + n2 <= {FOCK_MAX_MODES}, got {params.n_modes}"
        )
    h = build_hamiltonian(params, sample_frequencies(params))
    cfg = FockConfig.from_params(params, h=h)
    oracle = FockOracle(cfg)
    dynamics = GaussianDynamics.from_params(params, h)

    if t_max is None:
        spread = float(np.ptp(dynamics.spectrum.eigenvalues))
        t_max = periods * 2.0 * np.pi / spread if spread > 0 else 2.0 * np.pi * periods
    times = np.linspace(0.0, t_max, n_samples)

    moment_error = 0.0
    pair_error = 0.0
    number_drift = 0.0
    initial_number = None
    for t in times:
        measured = oracle.measure(t)
        gaussian = dynamics.moments(t).s
        moment_error = max(moment_error, float(np.max(np.abs(measured.occupations - gaussian))))
        pair_error = max(pair_error, float(np.max(np.abs(measured.pair_moments))))
        if initial_number is None:
            initial_number = measured.number
        number_drift = max(number_drift, abs(measured.number - initial_number))

    bound = FOCK_TAIL_FACTOR * max(cfg.excitation_tail, FOCK_ROUNDOFF_FLOOR)
    report = VerificationReport(title="fock")
    report.add("moments", moment_error, bound)
    report.add("pair_moments", pair_error, bound)
    report.add("number_drift", number_drift / max(1.0, initial_number), 1e-10)
    report.notes.append(
        f"n_max={cfg.n_max}, dimension={cfg.dimension}, truncation error {cfg.excitation_tail:.2e}, "
        f"window [0, {t_max:.4g}]"
    )
    return report
