"""
Exact Gaussian dynamics of the coupled modes through the normal-mode
decomposition H = Z diag(eps) Z^T.

Second moments are stored as S_ij = <a_i^dag a_j>. With a(t) = U_t a(0) and
U_t = Z exp(-i eps t) Z^T (complex symmetric), they evolve as

    S_t = conj(U_t) S_0 U_t .

First moments and <a a> moments vanish for thermal initial states and stay
zero under the number-conserving evolution, so they are not stored.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
import scipy.linalg

from src.models.bipartite_model import HamiltonianMatrix, ModelParams
from src.utils.errors import EigensolverError, PhysicsError
from src.utils.parameters import (
    DECOUPLING_TOL,
    DEGENERACY_TOL,
    HERMITICITY_TOL,
    IMAGINARY_RESIDUE_TOL,
    ORTHOGONALITY_TOL,
    PSD_TOL,
    RECONSTRUCTION_TOL,
    REORTHOGONALIZE_TOL
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Spectrum:
    """Orthogonal eigenvector matrix (columns) and ascending eigenvalues."""

    z: np.ndarray
    eigenvalues: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.z * self.eigenvalues) @ self.z.T


@dataclass(frozen=True)
class MomentMatrix:
    """Hermitian matrix of <a_i^dag a_j> at time t."""

    s: np.ndarray
    t: float = 0.0

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.s)))

    def block(self, h: HamiltonianMatrix, which: int) -> np.ndarray:
        """Reduced moments of subsystem `which` (partial trace over the other)."""
        sl = h.block_slice(which)
        return self.s[sl, sl]

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.s - self.s.conj().T)))

    def min_eigenvalue(self) -> float:
        herm = 0.5 * (self.s + self.s.conj().T)
        return float(np.min(np.linalg.eigvalsh(herm)))

    def validate(self) -> "MomentMatrix":
        """
        Check that the moments describe a physical state.

        Raises:
            PhysicsError: S is not Hermitian or has a negative eigenvalue beyond round-off
        """
        scale = max(1.0, self.trace)
        error = self.hermiticity_error()
        if error > HERMITICITY_TOL * scale:
            raise PhysicsError(f"moment matrix not Hermitian (error {error:.2e})")
        lowest = self.min_eigenvalue()
        if lowest < -PSD_TOL * scale:
            raise PhysicsError(f"moment matrix not positive semidefinite (eigenvalue {lowest:.3e})")
        return self


def bose_occupation(energy, temperature: float):
    """
    Thermal occupation 1/(exp(E/T) - 1).

    Args:
        energy: Mode energy (scalar or array), must be positive
        temperature: Temperature (k_B = 1)

    Returns:
        Mean excitation number with the same shape as `energy`
    """
    energy = np.asarray(energy, dtype=float)
    if np.any(energy <= 0):
        raise PhysicsError("thermal state undefined for non-positive mode energy")
    with np.errstate(over="ignore"):
        occupation = 1.0 / np.expm1(energy / temperature)
    return occupation if occupation.ndim else float(occupation)


def _reorthogonalize(z: np.ndarray, eigenvalues: np.ndarray) -> np.ndarray:
    """Orthonormalize eigenvectors inside each cluster of (near-)degenerate eigenvalues."""
    scale = max(1.0, float(np.max(np.abs(eigenvalues))))
    tol = DEGENERACY_TOL * scale
    z = z.copy()
    start = 0
    n = len(eigenvalues)
    while start < n:
        stop = start + 1
        while stop < n and eigenvalues[stop] - eigenvalues[stop - 1] <= tol:
            stop += 1
        if stop - start > 1:
            q, r = scipy.linalg.qr(z[:, start:stop], mode="economic")
            # keep the orientation of the original columns
            q *= np.sign(np.where(np.diag(r) == 0, 1.0, np.diag(r)))
            z[:, start:stop] = q
        start = stop
    return z


def diagonalize(h: HamiltonianMatrix) -> Spectrum:
    """
    Diagonalize the symmetric Hamiltonian matrix.

    Args:
        h: Hamiltonian matrix

    Returns:
        Spectrum with ascending eigenvalues (stable order on ties)

    Raises:
        EigensolverError: non-convergence or failed residual checks
    """
    try:
        eigenvalues, z = scipy.linalg.eigh(h.h)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigensolverError(f"symmetric eigensolver failed: {exc}") from exc

    order = np.argsort(eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    z = z[:, order]

    identity = np.eye(h.dim)
    orth_error = float(np.max(np.abs(z.T @ z - identity)))
    if orth_error > REORTHOGONALIZE_TOL:
        logger.debug("re-orthogonalizing eigenvectors (error %.2e)", orth_error)
        z = _reorthogonalize(z, eigenvalues)
        orth_error = float(np.max(np.abs(z.T @ z - identity)))
    if orth_error > ORTHOGONALITY_TOL:
        raise EigensolverError(f"eigenvectors not orthogonal (error {orth_error:.2e})")

    scale = max(1.0, float(np.max(np.abs(h.h))))
    residual = float(np.max(np.abs((z * eigenvalues) @ z.T - h.h)))
    if residual > RECONSTRUCTION_TOL * scale:
        raise EigensolverError(f"spectral reconstruction residual {residual:.2e}")

    z.setflags(write=False)
    eigenvalues.setflags(write=False)
    return Spectrum(z=z, eigenvalues=eigenvalues)


@dataclass(frozen=True)
class CoupledModes:
    """
    Local normal modes split into those that take part in the exchange and
    those that do not.

    `h` is the Hamiltonian restricted to the exchanging modes, written in the
    basis of local normal modes of each block. `frozen[x]` holds the energies
    of the modes of subsystem x without any matrix element to another mode;
    their occupations never change.
    """

    h: HamiltonianMatrix
    frozen: Dict[int, np.ndarray]

    @property
    def n_frozen(self) -> int:
        return int(sum(values.size for values in self.frozen.values()))


def _align_degenerate_modes(values: np.ndarray, vectors: np.ndarray, cross: np.ndarray) -> np.ndarray:
    """Rotate each degenerate cluster so its coupling to the other block sits in the fewest modes."""
    scale = max(1.0, float(np.max(np.abs(values))))
    vectors = vectors.copy()
    start = 0
    n = len(values)
    while start < n:
        stop = start + 1
        while stop < n and values[stop] - values[start] <= DEGENERACY_TOL * scale:
            stop += 1
        if stop - start > 1:
            cluster = vectors[:, start:stop]
            rotation, _, _ = scipy.linalg.svd(cluster.T @ cross)
            vectors[:, start:stop] = cluster @ rotation
        start = stop
    return vectors


def split_decoupled_modes(h: HamiltonianMatrix, tol: float = DECOUPLING_TOL) -> CoupledModes:
    """
    Separate the local normal modes that exchange nothing with the rest.

    With homogeneous frequencies every block has a degenerate eigenspace
    orthogonal to the uniform cross coupling, and only the two collective
    modes remain. The thermal state is diagonal in the local normal modes,
    so the frozen ones keep their initial occupation at all times.

    Args:
        h: Hamiltonian matrix
        tol: Largest off-diagonal element, relative to the energy scale, of a frozen mode

    Returns:
        CoupledModes; all modes are kept when either block would be left empty
    """
    bases = []
    for which in (1, 2):
        try:
            values, vectors = scipy.linalg.eigh(h.block(which))
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise EigensolverError(f"block eigensolver failed: {exc}") from exc
        cross = h.coupling if which == 1 else h.coupling.T
        bases.append(_align_degenerate_modes(values, vectors, cross))
    rotation = scipy.linalg.block_diag(*bases)
    local = rotation.T @ h.h @ rotation
    local = 0.5 * (local + local.T)

    energies = np.diag(local)
    scale = max(1.0, float(np.max(np.abs(energies))))
    off_diagonal = np.abs(local - np.diag(energies))
    coupled = np.max(off_diagonal, axis=1) > tol * scale
    first = np.arange(h.dim) < h.n1
    m1 = int(np.sum(coupled & first))
    m2 = int(np.sum(coupled & ~first))
    if m1 == 0 or m2 == 0:
        coupled[:] = True
        m1, m2 = h.n1, h.n2

    index = np.flatnonzero(coupled)
    frozen = {1: energies[~coupled & first], 2: energies[~coupled & ~first]}
    logger.debug("%d+%d exchanging modes, %d+%d frozen",
                 m1, m2, frozen[1].size, frozen[2].size)
    return CoupledModes(h=HamiltonianMatrix(h=local[np.ix_(index, index)], n1=m1, n2=m2), frozen=frozen)


def unitary_derivative(spec: Spectrum, t: float, order: int = 0) -> np.ndarray:
    """
    k-th time derivative of U_t = Z exp(-i eps t) Z^T.

    Args:
        spec: Spectrum of the full Hamiltonian
        t: Time
        order: Derivative order (0 gives U_t itself)

    Returns:
        Complex (n x n) matrix
    """
    phases = np.exp(-1j * spec.eigenvalues * t)
    if order:
        phases = phases * (-1j * spec.eigenvalues) ** order
    return (spec.z * phases) @ spec.z.T


def one_particle_unitary(spec: Spectrum, t: float) -> np.ndarray:
    """One-particle propagator U_t with a(t) = U_t a(0)."""
    return unitary_derivative(spec, t, order=0)


def thermal_initial_moments(params: ModelParams, h: HamiltonianMatrix) -> MomentMatrix:
    """
    Second moments of the product of two thermal states at t = 0.

    Block x is P_x diag(n_x(eigenvalues of H_x)) P_x^T where P_x diagonalizes
    H_x; the cross blocks vanish.

    Args:
        params: Model parameters (temperatures)
        h: Hamiltonian matrix (only the diagonal blocks are used)

    Returns:
        MomentMatrix at t = 0

    Raises:
        PhysicsError: a block eigenvalue is not positive
    """
    s = np.zeros((h.dim, h.dim), dtype=complex)
    for which in (1, 2):
        block_values, block_vectors = scipy.linalg.eigh(h.block(which))
        if np.any(block_values <= 0):
            raise PhysicsError(
                f"thermal state undefined for non-positive mode energy "
                f"(subsystem {which}, min eigenvalue {block_values.min():.4g})"
            )
        occupations = bose_occupation(block_values, params.temperature(which))
        sl = h.block_slice(which)
        s[sl, sl] = (block_vectors * occupations) @ block_vectors.T
    return MomentMatrix(s=s, t=0.0)


def evolve_moments(
    s0: MomentMatrix,
    u: np.ndarray,
    t: Optional[float] = None
) -> MomentMatrix:
    """S_t = conj(U_t) S_0 U_t."""
    if u.shape != s0.s.shape:
        raise PhysicsError(f"propagator shape {u.shape} does not match moments {s0.s.shape}")
    return MomentMatrix(s=np.conj(u) @ s0.s @ u, t=s0.t if t is None else t)


def moment_time_derivative(s0: MomentMatrix, spec: Spectrum, t: float) -> np.ndarray:
    """Exact dS/dt = conj(dU/dt) S_0 U + conj(U) S_0 dU/dt."""
    u = unitary_derivative(spec, t, order=0)
    u_dot = unitary_derivative(spec, t, order=1)
    return np.conj(u_dot) @ s0.s @ u + np.conj(u) @ s0.s @ u_dot


def expectation(operator: np.ndarray, s: np.ndarray) -> float:
    """
    Expectation of sum_ij O_ij a_i^dag a_j given S_ij = <a_i^dag a_j>.

    Raises:
        PhysicsError: the imaginary part exceeds round-off (operator not Hermitian)
    """
    value = np.sum(operator * s)
    if abs(value.imag) > IMAGINARY_RESIDUE_TOL * max(1.0, abs(value.real)):
        raise PhysicsError(f"expectation value has imaginary residue {value.imag:.3e}")
    return float(value.real)


def subsystem_energy(s: MomentMatrix, h: HamiltonianMatrix, which: int) -> float:
    """Bare energy E_x(t) = Tr{H_x Tr_xbar S_t}."""
    sl = h.block_slice(which)
    return expectation(h.h[sl, sl], s.s[sl, sl])


def interaction_energy(s: MomentMatrix, h: HamiltonianMatrix) -> float:
    """U_I(t) = 2 Re sum_{i in 1, k in 2} G_ik S_ik."""
    cross = h.coupling * s.s[:h.n1, h.n1:]
    return float(2.0 * np.real(np.sum(cross)))


def total_energy(s: MomentMatrix, h: HamiltonianMatrix) -> float:
    """<H>(t) = Tr{H S_t}."""
    return expectation(h.h, s.s)


class GaussianDynamics:
    """Moment propagation from a fixed initial state, evaluated in the eigenbasis."""

    def __init__(self, h: HamiltonianMatrix, spectrum: Spectrum, s0: MomentMatrix):
        """
        Initialize dynamics.

        Args:
            h: Hamiltonian matrix
            spectrum: Its spectral decomposition
            s0: Initial second moments

        Raises:
            PhysicsError: s0 is not a valid moment matrix
        """
        self.h = h
        self.spectrum = spectrum
        self.s0 = s0.validate()
        z = spectrum.z
        # initial moments in the normal-mode basis
        m0 = z.T @ s0.s @ z
        self._m0 = m0 if np.any(m0.imag) else m0.real
        self._gaps = spectrum.eigenvalues[:, None] - spectrum.eigenvalues[None, :]
        self._rows = {which: z[h.block_slice(which)] for which in (1, 2)}
        cross = h.h - scipy.linalg.block_diag(h.block(1), h.block(2))
        self._interaction_weights = (z.T @ cross @ z) * self._m0

    @classmethod
    def from_params(cls, params: ModelParams, h: HamiltonianMatrix) -> "GaussianDynamics":
        spectrum = diagonalize(h)
        logger.debug("diagonalized %dx%d Hamiltonian, spectrum [%.6g, %.6g]",
                     h.dim, h.dim, spectrum.eigenvalues[0], spectrum.eigenvalues[-1])
        return cls(h, spectrum, thermal_initial_moments(params, h))

    def _to_site_basis(self, m: np.ndarray) -> np.ndarray:
        z = self.spectrum.z
        # real and imaginary parts separately keep the products real
        return z @ m.real @ z.T + 1j * (z @ m.imag @ z.T)

    def _times_m0(self, b: np.ndarray) -> np.ndarray:
        """m0 @ b with real products when m0 is real."""
        if np.iscomplexobj(self._m0):
            return self._m0 @ b
        return self._m0 @ b.real + 1j * (self._m0 @ b.imag)

    def moments(self, t: float) -> MomentMatrix:
        """S_t."""
        phases = np.exp(1j * self._gaps * t)
        return MomentMatrix(s=self._to_site_basis(self._m0 * phases), t=t)

    def moments_rate(self, t: float) -> np.ndarray:
        """dS/dt at time t."""
        phases = 1j * self._gaps * np.exp(1j * self._gaps * t)
        return self._to_site_basis(self._m0 * phases)

    def block_moments(
        self,
        t: float,
        which: int,
        with_rate: bool = False
    ) -> Tuple[np.ndarray, Optional[np.ndarray]]:
        """
        Reduced moments S_xx(t) and optionally dS_xx/dt, without the full matrix.

        With W = Z_x exp(i eps t): S_xx = W m0 W^dag and
        dS_xx/dt = i (X - X^dag), X = W eps m0 W^dag.

        Args:
            t: Time
            which: Subsystem label
            with_rate: Also return the time derivative

        Returns:
            (S_xx, dS_xx/dt or None)
        """
        w = self._rows[which] * np.exp(1j * self.spectrum.eigenvalues * t)
        right = self._times_m0(w.conj().T)
        s = w @ right
        s = 0.5 * (s + s.conj().T)
        if not with_rate:
            return s, None
        x = (w * self.spectrum.eigenvalues) @ right
        return s, 1j * (x - x.conj().T)

    def interaction_energy(self, t: float) -> float:
        """U_I(t) from the normal-mode moments."""
        phases = np.exp(1j * self.spectrum.eigenvalues * t)
        weights = self._interaction_weights
        if np.iscomplexobj(weights):
            inner = weights @ phases.conj()
        else:
            inner = weights @ phases.real - 1j * (weights @ phases.imag)
        return float(np.real(phases @ inner))
