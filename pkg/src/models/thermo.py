"""
Internal energy, heat and work of both subsystems under four definition sets.

    wc    weak coupling:   dU = dQ = E_x(t) - E_x(0),               dW = 0
    int   interaction:     dU = dQ = -(E_xbar(t) - E_xbar(0)),      dW = 0
    bare  bare energies:   dU = E_x(t) - E_x(0),  dQ = dQ_int,      dW = -dU_I(t)
    md    minimal dissipation, built on the renormalized Hamiltonian K_t:
          dU = Tr{K_t S_t^x} - Tr{K_0 S_0^x},
          dQ = int_0^t Tr{K dS^x/dtau},   dW = int_0^t Tr{dK/dtau S^x}
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Tuple

import numpy as np

from src.models.bipartite_model import (
    HamiltonianMatrix,
    ModelParams,
    build_hamiltonian,
    sample_frequencies
)
from src.models.reduced import effective_generator
from src.models.spectral_dynamics import (
    GaussianDynamics,
    bose_occupation,
    expectation,
    split_decoupled_modes
)
from src.utils.errors import ParameterError, SingularPropagator
from src.utils.parameters import (
    APPROACHES,
    BALANCE_BAND,
    BALANCE_BAND_SLACK,
    PLATEAU_RATIO,
    PLATEAU_WINDOW,
    REFINEMENT_LEVELS,
    SUBSYSTEMS,
    TOL_QUAD_RELATIVE
)
from src.utils.quadrature import check_uniform_grid, cumulative_integral

logger = logging.getLogger(__name__)

Series = np.ndarray
Quantities = Tuple[Series, Series, Series]


@dataclass(frozen=True)
class ThermoSample:
    """All thermodynamic quantities at one grid time."""

    t: float
    du: Dict[int, Dict[str, float]]
    dq: Dict[int, Dict[str, float]]
    dw: Dict[int, Dict[str, float]]
    u_i: float
    md_missing: Dict[int, bool]


@dataclass
class ThermoTrajectory:
    """Time series of (dU, dQ, dW) per subsystem and approach, plus net balances."""

    grid: Series
    du: Dict[Tuple[int, str], Series]
    dq: Dict[Tuple[int, str], Series]
    dw: Dict[Tuple[int, str], Series]
    u_i: Series
    md_missing: Dict[int, np.ndarray]
    energies: Dict[int, Series]
    k_trace: Dict[int, Series] = field(default_factory=dict)
    balances: Dict[str, Quantities] = field(default_factory=dict)
    tol_quad: float = 0.0
    energy_drift: float = 0.0
    trace_drift: float = 0.0
    eigenvalues: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return self.grid.size

    def residual(self, which: int, approach: str) -> Series:
        """First-law residual dU - dQ - dW."""
        key = (which, approach)
        return self.du[key] - self.dq[key] - self.dw[key]

    def first_law_violations(self) -> Dict[Tuple[int, str], int]:
        """Number of finite samples with |dU - dQ - dW| above tol_quad, per (subsystem, approach)."""
        counts = {}
        for x in SUBSYSTEMS:
            for a in APPROACHES:
                residual = self.residual(x, a)
                finite = np.isfinite(residual)
                counts[(x, a)] = int(np.sum(np.abs(residual[finite]) > self.tol_quad))
        return counts

    def sample(self, index: int) -> ThermoSample:
        """Quantities at one grid index."""
        def pick(table):
            return {
                x: {a: float(table[(x, a)][index]) for a in APPROACHES}
                for x in SUBSYSTEMS
            }
        return ThermoSample(
            t=float(self.grid[index]),
            du=pick(self.du),
            dq=pick(self.dq),
            dw=pick(self.dw),
            u_i=float(self.u_i[index]),
            md_missing={x: bool(self.md_missing[x][index]) for x in SUBSYSTEMS}
        )

    def samples(self) -> Iterable[ThermoSample]:
        for index in range(len(self)):
            yield self.sample(index)


def weak_coupling_quantities(e_x: Series) -> Quantities:
    """Weak-coupling definitions from the bare energy of the system."""
    e_x = np.asarray(e_x, dtype=float)
    du = e_x - e_x[0]
    return du, du.copy(), np.zeros_like(du)


def interaction_approach(e_xbar: Series) -> Quantities:
    """Interaction approach: heat is minus the environment's bare-energy change."""
    e_xbar = np.asarray(e_xbar, dtype=float)
    du = -(e_xbar - e_xbar[0])
    return du, du.copy(), np.zeros_like(du)


def bare_approach(e_x: Series, e_xbar: Series, u_i: Series) -> Quantities:
    """Bare approach: the interaction-energy variation is booked as work."""
    e_x = np.asarray(e_x, dtype=float)
    e_xbar = np.asarray(e_xbar, dtype=float)
    u_i = np.asarray(u_i, dtype=float)
    du = e_x - e_x[0]
    dq = -(e_xbar - e_xbar[0])
    dw = -(u_i - u_i[0])
    return du, dq, dw


def minimal_dissipation_quantities(
    energy: Series,
    heat_rate: Series,
    work_rate: Series,
    grid: Series,
    heat_integrand=None,
    work_integrand=None,
    tolerance: float = 0.0,
    levels: int = REFINEMENT_LEVELS
) -> Tuple[Series, Series, Series, np.ndarray]:
    """
    Minimal-dissipation quantities from contracted samples.

    The per-time inputs are Tr{K_t S_t^x}, Tr{K_t dS_t^x/dt} and
    Tr{dK_t/dt S_t^x}; NaN marks samples where K_t was unavailable.

    Args:
        energy: Tr{K S} samples
        heat_rate: Tr{K dS/dt} samples
        work_rate: Tr{dK/dt S} samples
        grid: Uniform time grid starting at 0
        heat_integrand: Callable t -> heat rate used to refine around gaps
        work_integrand: Callable t -> work rate used to refine around gaps
        tolerance: Convergence threshold of the refinement
        levels: Maximum refinement depth

    Returns:
        Tuple (dU, dQ, dW, missing mask)
    """
    energy = np.asarray(energy, dtype=float)
    du = energy - energy[0]
    dq = cumulative_integral(heat_rate, grid, heat_integrand, tolerance, levels)
    dw = cumulative_integral(work_rate, grid, work_integrand, tolerance, levels)
    missing = ~(np.isfinite(du) & np.isfinite(dq) & np.isfinite(dw))
    du = np.where(missing, np.nan, du)
    dq = np.where(missing, np.nan, dq)
    dw = np.where(missing, np.nan, dw)
    return du, dq, dw, missing


def net_balances(trajectory: ThermoTrajectory) -> Dict[str, Quantities]:
    """Sum of each quantity over both subsystems, per approach."""
    balances = {}
    for approach in APPROACHES:
        balances[approach] = tuple(
            table[(1, approach)] + table[(2, approach)]
            for table in (trajectory.du, trajectory.dq, trajectory.dw)
        )
    return balances


def _finite_max(values) -> float:
    """Largest finite entry, NaN when there is none."""
    values = np.asarray(values, dtype=float)
    finite = values[np.isfinite(values)]
    return float(finite.max()) if finite.size else float("nan")


def balance_ratio(trajectory: ThermoTrajectory, approach: str, quantity: str) -> float:
    """
    Largest net balance relative to the largest single-subsystem exchange.

    Args:
        trajectory: Computed trajectory
        approach: One of APPROACHES
        quantity: "dU", "dQ" or "dW"

    Returns:
        max_t |q_1 + q_2| / max_t max_x |q_x| (NaN when nothing is exchanged)
    """
    table = {"dU": trajectory.du, "dQ": trajectory.dq, "dW": trajectory.dw}[quantity]
    index = ("dU", "dQ", "dW").index(quantity)
    balance = trajectory.balances[approach][index]
    exchange = _finite_max([_finite_max(np.abs(table[(x, approach)])) for x in SUBSYSTEMS])
    if not np.isfinite(exchange) or exchange == 0:
        return float("nan")
    return _finite_max(np.abs(balance)) / exchange


def plateau_ratio(series: Series, window: float = PLATEAU_WINDOW) -> float:
    """Variance of the last `window` fraction of a series over that of the first."""
    series = np.asarray(series, dtype=float)
    width = max(2, int(round(window * series.size)))
    early = np.nanvar(series[:width])
    late = np.nanvar(series[-width:])
    if early == 0:
        return 0.0 if late == 0 else float("inf")
    return float(late / early)


def has_plateau(series: Series, window: float = PLATEAU_WINDOW, ratio: float = PLATEAU_RATIO) -> bool:
    """Late-window variance drop below `ratio` of the early window."""
    return bool(plateau_ratio(series, window) < ratio)


def balance_band_count(
    trajectory: ThermoTrajectory,
    band: Tuple[float, float] = BALANCE_BAND,
    slack: float = BALANCE_BAND_SLACK
) -> Tuple[int, int]:
    """
    How many defined balance ratios fall inside `band` widened by `slack`.

    The bare work balance equals -2 dU_I and is left out, as are ratios
    that are undefined because nothing is exchanged.

    Returns:
        (ratios in band, ratios checked)
    """
    low, high = band[0] - slack, band[1] + slack
    inside = checked = 0
    for quantity in ("dU", "dQ", "dW"):
        for approach in APPROACHES:
            if (quantity, approach) == ("dW", "bare"):
                continue
            ratio = balance_ratio(trajectory, approach=approach, quantity=quantity)
            if not np.isfinite(ratio):
                continue
            checked += 1
            inside += int(low <= ratio <= high)
    return inside, checked


class _MdSampler:
    """Evaluates the contracted md integrands of one subsystem at arbitrary times."""

    def __init__(self, dynamics: GaussianDynamics, which: int):
        self.dynamics = dynamics
        self.which = which

    def _generator(self, t: float):
        return effective_generator(self.dynamics.spectrum, self.dynamics.h, t, self.which)

    def heat_rate(self, t: float) -> float:
        gen = self._generator(t)
        _, s_dot = self.dynamics.block_moments(t, self.which, with_rate=True)
        return expectation(gen.k, s_dot)

    def work_rate(self, t: float) -> float:
        gen = self._generator(t)
        s, _ = self.dynamics.block_moments(t, self.which)
        return expectation(gen.k_dot, s)


def compute_trajectory(
    params: ModelParams,
    grid: Series,
    h: Optional[HamiltonianMatrix] = None,
    tol_quad: Optional[float] = None,
    levels: int = REFINEMENT_LEVELS
) -> ThermoTrajectory:
    """
    Evolve the model and evaluate all four definition sets on a time grid.

    Modes that exchange nothing with the other subsystem keep their thermal
    occupation and are added back as constants; only the exchanging modes
    are propagated.

    Args:
        params: Model parameters
        grid: Uniform time grid starting at 0 (physical time units)
        h: Prebuilt Hamiltonian; sampled from params when omitted
        tol_quad: Absolute first-law tolerance for md; defaults to
            TOL_QUAD_RELATIVE times the dynamic range of dU^md
        levels: Refinement depth around singular md samples

    Returns:
        ThermoTrajectory with balances filled in
    """
    grid = np.asarray(grid, dtype=float)
    check_uniform_grid(grid)
    if grid[0] != 0.0:
        raise ParameterError("time grid must start at t = 0")

    if h is None:
        h = build_hamiltonian(params, sample_frequencies(params))
    modes = split_decoupled_modes(h)
    frozen_energy, frozen_number, frozen_level_sum = {}, {}, {}
    for x in SUBSYSTEMS:
        occupations = bose_occupation(modes.frozen[x], params.temperature(x))
        frozen_energy[x] = float(np.sum(modes.frozen[x] * occupations))
        frozen_number[x] = float(np.sum(occupations))
        frozen_level_sum[x] = float(np.sum(modes.frozen[x]))
    coupled = modes.h
    dynamics = GaussianDynamics.from_params(params, coupled)
    logger.info("evolving %d+%d exchanging modes (%d frozen) on %d time points",
                coupled.n1, coupled.n2, modes.n_frozen, grid.size)

    n = grid.size
    energies = {x: np.empty(n) for x in SUBSYSTEMS}
    u_i = np.empty(n)
    trace = np.zeros(n)
    md_energy = {x: np.full(n, np.nan) for x in SUBSYSTEMS}
    md_heat_rate = {x: np.full(n, np.nan) for x in SUBSYSTEMS}
    md_work_rate = {x: np.full(n, np.nan) for x in SUBSYSTEMS}
    k_trace = {x: np.full(n, np.nan) for x in SUBSYSTEMS}
    singular_count = 0

    for i, t in enumerate(grid):
        u_i[i] = dynamics.interaction_energy(t)
        for x in SUBSYSTEMS:
            s_block, s_dot = dynamics.block_moments(t, x, with_rate=True)
            energies[x][i] = frozen_energy[x] + expectation(coupled.block(x), s_block)
            trace[i] += frozen_number[x] + float(np.real(np.trace(s_block)))
            try:
                gen = effective_generator(dynamics.spectrum, coupled, t, x)
            except SingularPropagator as exc:
                singular_count += 1
                logger.debug("md sample missing for subsystem %d: %s", x, exc)
                continue
            md_energy[x][i] = frozen_energy[x] + expectation(gen.k, s_block)
            md_heat_rate[x][i] = expectation(gen.k, s_dot)
            md_work_rate[x][i] = expectation(gen.k_dot, s_block)
            k_trace[x][i] = frozen_level_sum[x] + float(np.real(np.trace(gen.k)))
    total = energies[1] + energies[2] + u_i

    if singular_count:
        logger.warning("%d md samples fell in singular windows", singular_count)

    if tol_quad is None:
        ranges = [_finite_max(md_energy[x]) + _finite_max(-md_energy[x]) for x in SUBSYSTEMS]
        ranges = [r for r in ranges if np.isfinite(r)] or [0.0]
        tol_quad = TOL_QUAD_RELATIVE * max(max(ranges), np.finfo(float).tiny)

    du, dq, dw = {}, {}, {}
    md_missing = {}
    for x in SUBSYSTEMS:
        xbar = 2 if x == 1 else 1
        quantities = {
            "wc": weak_coupling_quantities(energies[x]),
            "int": interaction_approach(energies[xbar]),
            "bare": bare_approach(energies[x], energies[xbar], u_i),
        }
        sampler = _MdSampler(dynamics, x)
        md_du, md_dq, md_dw, missing = minimal_dissipation_quantities(
            md_energy[x], md_heat_rate[x], md_work_rate[x], grid,
            heat_integrand=sampler.heat_rate,
            work_integrand=sampler.work_rate,
            tolerance=tol_quad,
            levels=levels
        )
        quantities["md"] = (md_du, md_dq, md_dw)
        md_missing[x] = missing
        for approach, (a_du, a_dq, a_dw) in quantities.items():
            du[(x, approach)] = a_du
            dq[(x, approach)] = a_dq
            dw[(x, approach)] = a_dw

    scale = max(abs(total[0]), np.finfo(float).tiny)
    trajectory = ThermoTrajectory(
        grid=grid,
        du=du,
        dq=dq,
        dw=dw,
        u_i=u_i - u_i[0],
        md_missing=md_missing,
        energies=energies,
        k_trace=k_trace,
        tol_quad=float(tol_quad),
        energy_drift=float(np.max(np.abs(total - total[0])) / scale),
        trace_drift=float(np.max(np.abs(trace - trace[0])) / max(abs(trace[0]), np.finfo(float).tiny)),
        eigenvalues=np.sort(np.concatenate([dynamics.spectrum.eigenvalues, modes.frozen[1], modes.frozen[2]]))
    )
    trajectory.balances = net_balances(trajectory)
    logger.info("energy drift %.2e, excitation drift %.2e, tol_quad %.2e",
                trajectory.energy_drift, trajectory.trace_drift, trajectory.tol_quad)
    return trajectory
