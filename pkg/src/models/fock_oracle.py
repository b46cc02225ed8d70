"""
Brute-force check of the Gaussian engine on a handful of modes.

The one-particle Hamiltonian is lifted to H = sum_ij h_ij a_i^dag a_j on a
truncated Fock space built from Kronecker products of ladder operators, the
initial state is the product of the two subsystems' thermal states, and the
evolution uses the spectral decomposition of the (small) many-body matrix.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg
from scipy import sparse

from src.models.bipartite_model import HamiltonianMatrix, ModelParams, build_hamiltonian, sample_frequencies
from src.models.spectral_dynamics import bose_occupation
from src.utils.errors import FockDimensionError, PhysicsError
from src.utils.parameters import FOCK_DIMENSION_CAP, FOCK_MAX_MODES, FOCK_TAIL_WEIGHT

logger = logging.getLogger(__name__)

# hard stop for the automatic truncation search
_N_MAX_SEARCH = 400


def _mode_occupations(h: HamiltonianMatrix, temps: Tuple[float, float]) -> np.ndarray:
    """Thermal occupations of the normal modes of each uncoupled block."""
    occupations = []
    for which in (1, 2):
        energies = scipy.linalg.eigvalsh(h.block(which))
        if np.any(energies <= 0):
            raise PhysicsError("thermal state undefined for non-positive mode energy")
        occupations.append(bose_occupation(energies, temps[which - 1]))
    return np.concatenate(occupations)


def single_mode_tail(occupation: float, n_max: int) -> float:
    """Thermal weight above n_max: (n / (n + 1))^(n_max + 1)."""
    return float((occupation / (occupation + 1.0)) ** (n_max + 1))


def truncation_error(occupations: np.ndarray, n_max: int) -> float:
    """
    Excitations carried by states whose total number exceeds n_max.

    Exchange coupling can move every excitation into one mode, so the
    per-mode cutoff is exact on all sectors with total number <= n_max.
    """
    k = np.arange(n_max + 1)
    pmf = np.zeros(n_max + 1)
    pmf[0] = 1.0
    for n in occupations:
        r = n / (n + 1.0)
        geometric = (1.0 - r) * r ** k
        pmf = np.convolve(pmf, geometric)[:n_max + 1]
    kept_mean = float(np.dot(k, pmf))
    excess = float(np.sum(occupations)) - kept_mean
    tail = max(1.0 - float(pmf.sum()), 0.0)
    return max(excess, tail, 0.0)


@dataclass(frozen=True)
class FockConfig:
    """Truncated Fock-space setup of a tiny bipartite model."""

    h: HamiltonianMatrix
    temps: Tuple[float, float]
    n_max: int

    @property
    def dims(self) -> int:
        return self.h.dim

    @property
    def dimension(self) -> int:
        return (self.n_max + 1) ** self.dims

    @property
    def tail_weight(self) -> float:
        """Largest single-mode thermal weight beyond the cutoff."""
        return max(single_mode_tail(n, self.n_max) for n in _mode_occupations(self.h, self.temps))

    @property
    def excitation_tail(self) -> float:
        """Truncation error of this cutoff for the initial thermal state."""
        return truncation_error(_mode_occupations(self.h, self.temps), self.n_max)

    @classmethod
    def from_params(
        cls,
        params: ModelParams,
        h: Optional[HamiltonianMatrix] = None,
        n_max: Optional[int] = None
    ) -> "FockConfig":
        """
        Build a configuration, choosing n_max from the temperatures when omitted.

        Raises:
            FockDimensionError: too many modes or too large a truncated space
        """
        if h is None:
            h = build_hamiltonian(params, sample_frequencies(params))
        if h.dim > FOCK_MAX_MODES:
            raise FockDimensionError(
                f"Fock oracle handles at most {FOCK_MAX_MODES} modes, got {h.dim}"
            )
        temps = (params.temp1, params.temp2)
        if n_max is None:
            n_max = choose_n_max(_mode_occupations(h, temps))
        dimension = (n_max + 1) ** h.dim
        if dimension > FOCK_DIMENSION_CAP:
            raise FockDimensionError(
                f"truncated Fock space has dimension {dimension} > {FOCK_DIMENSION_CAP}; "
                f"lower the temperatures or the mode count"
            )
        logger.debug("Fock truncation n_max=%d, dimension %d", n_max, dimension)
        return cls(h=h, temps=temps, n_max=int(n_max))


def choose_n_max(occupations: np.ndarray, target: float = FOCK_TAIL_WEIGHT) -> int:
    """Smallest cutoff whose truncation error is below `target`."""
    for n_max in range(1, _N_MAX_SEARCH + 1):
        if truncation_error(occupations, n_max) < target:
            return n_max
    raise FockDimensionError("no Fock truncation reaches the tail target; temperatures too high")


def ladder_operators(n_max: int, modes: int) -> List[sparse.csc_matrix]:
    """Annihilation operators of each mode on the product space (mode 0 leftmost)."""
    local = sparse.diags(np.sqrt(np.arange(1, n_max + 1)), offsets=1, format="csc")
    eye = sparse.eye(n_max + 1, format="csc")
    operators = []
    for mode in range(modes):
        op = sparse.eye(1, format="csc")
        for other in range(modes):
            op = sparse.kron(op, local if other == mode else eye, format="csc")
        operators.append(op)
    return operators


def build_fock_hamiltonian(cfg: FockConfig) -> np.ndarray:
    """Dense H = sum_ij h_ij a_i^dag a_j on the truncated space."""
    a = ladder_operators(cfg.n_max, cfg.dims)
    h = cfg.h.h
    total = sparse.csc_matrix((cfg.dimension, cfg.dimension))
    for i in range(cfg.dims):
        for j in range(cfg.dims):
            if h[i, j] != 0:
                total = total + h[i, j] * (a[i].T @ a[j])
    return total.toarray()


def number_operator(cfg: FockConfig) -> np.ndarray:
    a = ladder_operators(cfg.n_max, cfg.dims)
    return sum((op.T @ op) for op in a).toarray()


@dataclass(frozen=True)
class FockMeasurement:
    """Moments of the truncated evolution at one time."""

    t: float
    occupations: np.ndarray
    pair_moments: np.ndarray
    number: float


class FockOracle:
    """Exact evolution of a tiny model in the truncated Fock basis."""

    def __init__(self, cfg: FockConfig):
        """
        Initialize oracle.

        Args:
            cfg: Truncated Fock configuration
        """
        self.cfg = cfg
        a = ladder_operators(cfg.n_max, cfg.dims)
        hamiltonian = build_fock_hamiltonian(cfg)
        self.energies, self.vectors = scipy.linalg.eigh(hamiltonian)

        # product of thermal states: exp(-sum_x beta_x H_x) with H_x the local lift
        local = np.zeros(cfg.h.h.shape)
        for which in (1, 2):
            sl = cfg.h.block_slice(which)
            local[sl, sl] = cfg.h.h[sl, sl] / cfg.temps[which - 1]
        weighted = sparse.csc_matrix((cfg.dimension, cfg.dimension))
        for i in range(cfg.dims):
            for j in range(cfg.dims):
                if local[i, j] != 0:
                    weighted = weighted + local[i, j] * (a[i].T @ a[j])
        w_values, w_vectors = scipy.linalg.eigh(weighted.toarray())
        boltzmann = np.exp(-(w_values - w_values.min()))
        rho0 = (w_vectors * (boltzmann / boltzmann.sum())) @ w_vectors.T

        v = self.vectors
        self._rho0 = v.T @ rho0 @ v
        self._gaps = self.energies[:, None] - self.energies[None, :]
        # observables in the energy eigenbasis, transposed for trace contraction
        self._hopping = {
            (i, j): (v.T @ (a[i].T @ a[j]).toarray() @ v).T
            for i in range(cfg.dims) for j in range(cfg.dims)
        }
        self._pairs = {
            (i, j): (v.T @ (a[i] @ a[j]).toarray() @ v).T
            for i in range(cfg.dims) for j in range(i, cfg.dims)
        }
        self._number = (v.T @ number_operator(cfg) @ v).T

    def state(self, t: float) -> np.ndarray:
        """Density matrix at time t in the energy eigenbasis."""
        return self._rho0 * np.exp(-1j * self._gaps * t)

    def measure(self, t: float) -> FockMeasurement:
        rho = self.state(t)
        dims = self.cfg.dims
        occupations = np.empty((dims, dims), dtype=complex)
        for (i, j), op in self._hopping.items():
            occupations[i, j] = np.sum(rho * op)
        pairs = np.zeros((dims, dims), dtype=complex)
        for (i, j), op in self._pairs.items():
            pairs[i, j] = pairs[j, i] = np.sum(rho * op)
        number = float(np.real(np.sum(rho * self._number)))
        return FockMeasurement(t=float(t), occupations=occupations, pair_moments=pairs, number=number)


def evolve_and_measure(cfg: FockConfig, t: float) -> FockMeasurement:
    """One-shot evolution and measurement of <a_i^dag a_j>_t."""
    return FockOracle(cfg).measure(t)
