"""
Bipartite model of two linearly coupled sets of bosonic modes.

Builds the real symmetric one-particle Hamiltonian matrix

    H = | H1  G  |
        | G^T H2 |

where block x carries the mode frequencies on its diagonal and the
intra-coupling g_x off the diagonal, and every cross-block entry is gamma.
"""

import logging
from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np

from src.utils.errors import ParameterError, SamplingError
from src.utils.parameters import (
    COLLECTIVE_RATIO,
    DISPERSIVE_RATIO,
    NON_COLLECTIVE_RATIO,
    SAMPLING_RETRY_CAP,
    ULTRASTRONG_RATIO
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModelParams:
    """Full physical parameter set of the bipartite model (hbar = k_B = 1)."""

    n1: int
    n2: int
    omega1: float
    omega2: float
    g1: float
    g2: float
    gamma: float
    temp1: float
    temp2: float
    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for name in ("n1", "n2"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise ParameterError(f"{name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        for name in ("omega1", "omega2", "temp1", "temp2"):
            value = float(getattr(self, name))
            if not np.isfinite(value) or value <= 0:
                raise ParameterError(f"{name} must be positive and finite, got {value!r}")
        for name in ("g1", "g2", "gamma"):
            if not np.isfinite(float(getattr(self, name))):
                raise ParameterError(f"{name} must be finite")
        if not np.isfinite(self.sigma) or self.sigma < 0:
            raise ParameterError(f"sigma must be non-negative, got {self.sigma!r}")
        seed = self.seed
        if isinstance(seed, bool) or not isinstance(seed, (int, np.integer, float)) \
                or int(seed) != seed or seed < 0:
            raise ParameterError(f"seed must be a non-negative integer, got {seed!r}")
        object.__setattr__(self, "seed", int(seed))

    @property
    def n_modes(self) -> int:
        return self.n1 + self.n2

    @property
    def beta1(self) -> float:
        return 1.0 / self.temp1

    @property
    def beta2(self) -> float:
        return 1.0 / self.temp2

    def block_size(self, which: int) -> int:
        return self.n1 if which == 1 else self.n2

    def temperature(self, which: int) -> float:
        return self.temp1 if which == 1 else self.temp2

    def with_overrides(self, **changes) -> "ModelParams":
        """Return a copy with some fields replaced (validated again)."""
        return replace(self, **changes)

    def swapped(self) -> "ModelParams":
        """Return the same model with the roles of the two subsystems exchanged."""
        return ModelParams(
            n1=self.n2, n2=self.n1,
            omega1=self.omega2, omega2=self.omega1,
            g1=self.g2, g2=self.g1,
            gamma=self.gamma,
            temp1=self.temp2, temp2=self.temp1,
            sigma=self.sigma, seed=self.seed
        )


@dataclass(frozen=True)
class HamiltonianMatrix:
    """Real symmetric (n1+n2)x(n1+n2) one-particle Hamiltonian with its block layout."""

    h: np.ndarray
    n1: int
    n2: int

    def __post_init__(self):
        h = np.array(self.h, dtype=float)
        if h.shape != (self.n1 + self.n2, self.n1 + self.n2):
            raise ParameterError(
                f"Hamiltonian shape {h.shape} does not match blocks ({self.n1}, {self.n2})"
            )
        h.setflags(write=False)
        object.__setattr__(self, "h", h)

    @property
    def dim(self) -> int:
        return self.n1 + self.n2

    def block_slice(self, which: int) -> slice:
        """Index range of subsystem `which` (1 or 2)."""
        if which == 1:
            return slice(0, self.n1)
        if which == 2:
            return slice(self.n1, self.n1 + self.n2)
        raise ParameterError(f"subsystem label must be 1 or 2, got {which!r}")

    def block(self, which: int) -> np.ndarray:
        """Bare Hamiltonian matrix H_x of subsystem `which`."""
        s = self.block_slice(which)
        return self.h[s, s]

    @property
    def h1(self) -> np.ndarray:
        return self.block(1)

    @property
    def h2(self) -> np.ndarray:
        return self.block(2)

    @property
    def coupling(self) -> np.ndarray:
        """Cross block G (n1 x n2)."""
        return self.h[:self.n1, self.n1:]

    @property
    def local(self) -> np.ndarray:
        """H1 (+) H2 with the cross blocks removed."""
        out = np.zeros_like(self.h)
        for which in (1, 2):
            s = self.block_slice(which)
            out[s, s] = self.h[s, s]
        return out

    @classmethod
    def from_blocks(
        cls,
        h1: np.ndarray,
        h2: np.ndarray,
        coupling: np.ndarray
    ) -> "HamiltonianMatrix":
        """Assemble from H1, H2 and the cross block G."""
        h1 = np.asarray(h1, dtype=float)
        h2 = np.asarray(h2, dtype=float)
        coupling = np.asarray(coupling, dtype=float)
        n1, n2 = h1.shape[0], h2.shape[0]
        if coupling.shape != (n1, n2):
            raise ParameterError(
                f"coupling block shape {coupling.shape} does not match ({n1}, {n2})"
            )
        return cls(h=np.block([[h1, coupling], [coupling.T, h2]]), n1=n1, n2=n2)


@dataclass(frozen=True)
class RegimeReport:
    """Collective eigenvalues, effective detuning/coupling and regime labels."""

    nu1: float
    nu2: float
    delta: float
    big_gamma: float
    big_omega: float
    coupling_regime: str
    collectivity: Tuple[str, str]
    bare_detuning: float = 0.0
    detuning_sign_flipped: bool = False
    nominal: bool = False
    notes: Tuple[str, ...] = ()

    @property
    def detuning_ratio(self) -> float:
        """|Delta| / Gamma (infinite for decoupled subsystems)."""
        if self.big_gamma == 0:
            return float("inf")
        return abs(self.delta) / self.big_gamma


def sample_frequencies(params: ModelParams) -> np.ndarray:
    """
    Draw the n1+n2 mode frequencies.

    Block x is drawn i.i.d. from normal(omega_x, sigma * omega_x); non-positive
    draws are redrawn. With sigma = 0 the central values are returned exactly.

    Args:
        params: Model parameters (uses n1, n2, omega1, omega2, sigma, seed)

    Returns:
        Array of n1+n2 positive frequencies

    Raises:
        SamplingError: a mode needed more than SAMPLING_RETRY_CAP redraws
    """
    if params.sigma == 0:
        return np.concatenate([
            np.full(params.n1, float(params.omega1)),
            np.full(params.n2, float(params.omega2))
        ])

    rng = np.random.default_rng(params.seed)
    blocks = []
    for which, (n, omega) in enumerate(
        ((params.n1, params.omega1), (params.n2, params.omega2)), start=1
    ):
        scale = params.sigma * omega
        draws = rng.normal(omega, scale, size=n)
        retries = 0
        bad = draws <= 0
        while bad.any():
            if retries >= SAMPLING_RETRY_CAP:
                raise SamplingError(which, retries)
            draws[bad] = rng.normal(omega, scale, size=int(bad.sum()))
            bad = draws <= 0
            retries += 1
        if retries:
            logger.debug("subsystem %d: %d redraw rounds for non-positive frequencies",
                         which, retries)
        blocks.append(draws)
    return np.concatenate(blocks)


def build_hamiltonian(params: ModelParams, freqs) -> HamiltonianMatrix:
    """
    Assemble the Hamiltonian matrix from sampled frequencies.

    Args:
        params: Model parameters (block sizes and couplings)
        freqs: n1+n2 positive mode frequencies

    Returns:
        HamiltonianMatrix with h[i][i] = freqs[i], g_x within blocks, gamma across
    """
    freqs = np.asarray(freqs, dtype=float)
    if freqs.shape != (params.n_modes,):
        raise ParameterError(
            f"expected {params.n_modes} frequencies, got shape {freqs.shape}"
        )
    if np.any(freqs <= 0):
        raise ParameterError("mode frequencies must be positive")

    h1 = np.full((params.n1, params.n1), float(params.g1))
    np.fill_diagonal(h1, freqs[:params.n1])
    h2 = np.full((params.n2, params.n2), float(params.g2))
    np.fill_diagonal(h2, freqs[params.n1:])
    coupling = np.full((params.n1, params.n2), float(params.gamma))
    return HamiltonianMatrix.from_blocks(h1, h2, coupling)


def collective_eigenvalues(params: ModelParams) -> Tuple[float, float]:
    """nu_x = omega_x + (N_x - 1) g_x for the homogeneous blocks."""
    nu1 = params.omega1 + (params.n1 - 1) * params.g1
    nu2 = params.omega2 + (params.n2 - 1) * params.g2
    return nu1, nu2


def _collectivity_label(n: int, g: float, omega: float) -> str:
    ratio = n * abs(g) / omega
    if ratio >= COLLECTIVE_RATIO:
        return "collective"
    if ratio <= NON_COLLECTIVE_RATIO:
        return "non-collective"
    return "intermediate"


def classify_regime(params: ModelParams) -> RegimeReport:
    """
    Classify coupling and collectivity regimes from the central parameters.

    Args:
        params: Model parameters; central frequencies are used even when sigma > 0

    Returns:
        RegimeReport (flagged nominal when sigma > 0)
    """
    nu1, nu2 = collective_eigenvalues(params)
    delta = nu1 - nu2
    big_gamma = 2.0 * np.sqrt(params.n1 * params.n2) * abs(params.gamma)
    big_omega = float(np.sqrt(delta * delta + big_gamma * big_gamma))

    if big_gamma == 0:
        ratio = float("inf")
    else:
        ratio = abs(delta) / big_gamma
    if ratio >= DISPERSIVE_RATIO:
        coupling_regime = "dispersive"
    elif ratio <= ULTRASTRONG_RATIO:
        coupling_regime = "ultrastrong"
    else:
        coupling_regime = "intermediate"

    bare_detuning = params.omega1 - params.omega2
    flipped = bool(np.sign(delta) != np.sign(bare_detuning) and delta != 0 and bare_detuning != 0)

    notes = []
    if params.sigma > 0:
        notes.append("nominal: computed from central frequencies, sigma > 0")
    if flipped:
        notes.append("collective effects reverse the sign of the bare detuning")

    return RegimeReport(
        nu1=float(nu1),
        nu2=float(nu2),
        delta=float(delta),
        big_gamma=float(big_gamma),
        big_omega=big_omega,
        coupling_regime=coupling_regime,
        collectivity=(
            _collectivity_label(params.n1, params.g1, params.omega1),
            _collectivity_label(params.n2, params.g2, params.omega2)
        ),
        bare_detuning=float(bare_detuning),
        detuning_sign_flipped=flipped,
        nominal=params.sigma > 0,
        notes=tuple(notes)
    )
