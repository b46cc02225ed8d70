"""
Reduced first-moment dynamics of one subsystem and its renormalized Hamiltonian.

For subsystem x the first moments evolve with the diagonal block of U_t,

    <r_x>_t = Phi_t <r_x>_0 ,   Phi_t = [U_t]_xx ,

and the time-local generator L_t = dPhi_t/dt Phi_t^{-1} yields the
renormalized Hamiltonian K_t = (L_t^dag - L_t) / (2i).
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from src.models.bipartite_model import HamiltonianMatrix
from src.models.spectral_dynamics import Spectrum
from src.utils.errors import SingularPropagator
from src.utils.parameters import CONDITION_MAX

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EffectiveGenerator:
    """Reduced propagator, generator and renormalized Hamiltonian of one subsystem at time t."""

    which: int
    t: float
    phi: np.ndarray
    l: np.ndarray
    k: np.ndarray
    k_dot: Optional[np.ndarray]
    condition: float


def _propagator_blocks(spec: Spectrum, h: HamiltonianMatrix, t: float, which: int, orders):
    """Diagonal blocks of d^k U_t / dt^k for each requested order."""
    z_x = spec.z[h.block_slice(which), :]
    phases = np.exp(-1j * spec.eigenvalues * t)
    rate = -1j * spec.eigenvalues
    blocks = []
    for order in orders:
        weights = phases * rate ** order
        # real products on the real eigenvectors
        blocks.append((z_x * weights.real) @ z_x.T + 1j * ((z_x * weights.imag) @ z_x.T))
    return blocks


def hermitian_part_of_generator(l: np.ndarray) -> np.ndarray:
    """(A^dag - A) / (2i), Hermitian by construction."""
    return (l.conj().T - l) / 2j


def propagator_condition(phi: np.ndarray) -> float:
    """
    Inverse of the smallest singular value of Phi_t.

    Phi_t is a block of a unitary matrix, so its norm is at most one and this
    bounds the usual condition number from above; unlike the latter it also
    flags a vanishing 1x1 block.
    """
    smallest = float(scipy.linalg.svdvals(phi)[-1])
    return 1.0 / smallest if smallest > 0 else float("inf")


def reduced_propagator(spec: Spectrum, h: HamiltonianMatrix, t: float, which: int) -> np.ndarray:
    """
    Reduced propagator Phi_t of subsystem `which`.

    Args:
        spec: Spectrum of the full Hamiltonian
        h: Hamiltonian matrix (block layout)
        t: Time
        which: Subsystem label (1 or 2)

    Returns:
        Complex N_x x N_x block of U_t
    """
    (phi,) = _propagator_blocks(spec, h, t, which, (0,))
    return phi


def effective_generator(
    spec: Spectrum,
    h: HamiltonianMatrix,
    t: float,
    which: int,
    with_rate: bool = True,
    condition_max: float = CONDITION_MAX
) -> EffectiveGenerator:
    """
    Compute Phi_t, L_t, K_t and (optionally) dK_t/dt from one LU factorization.

    L_t solves L_t Phi_t = dPhi_t/dt; its derivative follows from the exact
    chain rule dL/dt = (d^2 U/dt^2)_xx Phi_t^{-1} - L_t^2.

    Args:
        spec: Spectrum of the full Hamiltonian
        h: Hamiltonian matrix (block layout)
        t: Time
        which: Subsystem label (1 or 2)
        with_rate: Also compute dK_t/dt
        condition_max: Largest accepted condition number of Phi_t

    Returns:
        EffectiveGenerator

    Raises:
        SingularPropagator: Phi_t is too ill-conditioned to invert
    """
    orders = (0, 1, 2) if with_rate else (0, 1)
    blocks = _propagator_blocks(spec, h, t, which, orders)
    phi, phi_dot = blocks[0], blocks[1]

    condition = propagator_condition(phi)
    if not np.isfinite(condition) or condition > condition_max:
        logger.debug("subsystem %d: singular propagator at t=%.6g (cond %.3e)",
                     which, t, condition)
        raise SingularPropagator(t, condition)

    # X Phi = B  <=>  Phi^T X^T = B^T
    lu = scipy.linalg.lu_factor(phi.T)
    l = scipy.linalg.lu_solve(lu, phi_dot.T).T
    k = hermitian_part_of_generator(l)

    k_dot = None
    if with_rate:
        l_dot = scipy.linalg.lu_solve(lu, blocks[2].T).T - l @ l
        k_dot = hermitian_part_of_generator(l_dot)

    return EffectiveGenerator(
        which=which, t=t, phi=phi, l=l, k=k, k_dot=k_dot, condition=condition
    )


def generator(
    spec: Spectrum,
    h: HamiltonianMatrix,
    t: float,
    which: int,
    condition_max: float = CONDITION_MAX
):
    """
    Time-local generator L_t = dPhi_t/dt Phi_t^{-1}.

    Returns:
        Tuple (L_t, condition number of Phi_t)
    """
    gen = effective_generator(spec, h, t, which, with_rate=False, condition_max=condition_max)
    return gen.l, gen.condition


def effective_hamiltonian(l: np.ndarray) -> np.ndarray:
    """Renormalized Hamiltonian K_t = (L_t^dag - L_t) / (2i)."""
    return hermitian_part_of_generator(l)


def effective_hamiltonian_rate(
    spec: Spectrum,
    h: HamiltonianMatrix,
    t: float,
    which: int,
    condition_max: float = CONDITION_MAX
) -> np.ndarray:
    """dK_t/dt by the exact chain rule."""
    return effective_generator(spec, h, t, which, condition_max=condition_max).k_dot
