"""
Closed-form solution of the homogeneous model (sigma = 0).

Each block x has eigenvalue eps_x = omega_x - g_x (multiplicity N_x - 1) and
one collective eigenvalue nu_x = omega_x + (N_x - 1) g_x on the uniform
vector. Only the two collective modes couple, through Gamma / 2 with
Gamma = 2 sqrt(N1 N2) gamma, so everything reduces to a 2x2 exchange problem
with detuning Delta = nu1 - nu2 and Rabi frequency Omega = sqrt(Delta^2 + Gamma^2).

All time functions accept scalars or numpy arrays.
"""

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from src.models.bipartite_model import ModelParams, collective_eigenvalues
from src.models.spectral_dynamics import bose_occupation
from src.utils.errors import ParameterError, PhysicsError
from src.utils.parameters import ALPHA_UNDERFLOW, GUARD_BAND

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HomogeneousDerived:
    """Derived constants of the homogeneous model."""

    n1: int
    n2: int
    eps1: float
    eps2: float
    nu1: float
    nu2: float
    gamma_sign: float
    nu: float
    delta: float
    big_gamma: float
    big_omega: float
    lam: float
    mu: float
    f_plus: float
    f_minus: float
    n_eps1: float
    n_eps2: float
    n_nu1: float
    n_nu2: float

    @classmethod
    def from_params(cls, params: ModelParams) -> "HomogeneousDerived":
        """
        Build the derived constants.

        Raises:
            ParameterError: sigma > 0 (no closed form for distributed frequencies)
            PhysicsError: a populated eigenvalue is not positive
        """
        if params.sigma != 0:
            raise ParameterError("closed forms require homogeneous frequencies (sigma = 0)")

        nu1, nu2 = collective_eigenvalues(params)
        eps1 = params.omega1 - params.g1
        eps2 = params.omega2 - params.g2
        # eps_x only exists as an eigenvalue when N_x > 1
        for label, value, present in (
            ("eps1", eps1, params.n1 > 1),
            ("eps2", eps2, params.n2 > 1),
            ("nu1", nu1, True),
            ("nu2", nu2, True),
        ):
            if present and value <= 0:
                raise PhysicsError(
                    f"thermal state undefined for non-positive mode energy ({label} = {value:.4g})"
                )

        delta = nu1 - nu2
        big_gamma = 2.0 * np.sqrt(params.n1 * params.n2) * abs(params.gamma)
        big_omega = float(np.hypot(delta, big_gamma))
        nu = nu1 + nu2
        if big_omega == 0:
            f_plus, f_minus = 1.0, 0.0
        else:
            f_plus = float(np.sqrt(0.5 * (1.0 + delta / big_omega)))
            f_minus = float(np.sqrt(0.5 * (1.0 - delta / big_omega)))

        def occupation(energy, temperature, present):
            return bose_occupation(energy, temperature) if present else 0.0

        return cls(
            n1=params.n1,
            n2=params.n2,
            eps1=float(eps1),
            eps2=float(eps2),
            nu1=float(nu1),
            nu2=float(nu2),
            gamma_sign=1.0 if params.gamma >= 0 else -1.0,
            nu=float(nu),
            delta=float(delta),
            big_gamma=float(big_gamma),
            big_omega=big_omega,
            lam=0.5 * (nu + big_omega),
            mu=0.5 * (nu - big_omega),
            f_plus=f_plus,
            f_minus=f_minus,
            n_eps1=occupation(eps1, params.temp1, params.n1 > 1),
            n_eps2=occupation(eps2, params.temp2, params.n2 > 1),
            n_nu1=bose_occupation(nu1, params.temp1),
            n_nu2=bose_occupation(nu2, params.temp2)
        )

    @property
    def occupation_gap(self) -> float:
        """A = n2(nu2) - n1(nu1)."""
        return self.n_nu2 - self.n_nu1

    @property
    def period(self) -> float:
        """2 pi / Omega (infinite for decoupled resonant blocks)."""
        return 2.0 * np.pi / self.big_omega if self.big_omega else float("inf")

    def block_size(self, which: int) -> int:
        return self.n1 if which == 1 else self.n2

    def initial_energy(self, which: int) -> float:
        """E_x(0) = (N_x - 1) eps_x n_x(eps_x) + nu_x n_x(nu_x)."""
        if which == 1:
            return (self.n1 - 1) * self.eps1 * self.n_eps1 + self.nu1 * self.n_nu1
        return (self.n2 - 1) * self.eps2 * self.n_eps2 + self.nu2 * self.n_nu2

    def spectrum(self) -> np.ndarray:
        """Ascending eigenvalues of the full Hamiltonian matrix."""
        values = np.concatenate([
            np.full(self.n1 - 1, self.eps1),
            np.full(self.n2 - 1, self.eps2),
            [self.lam, self.mu]
        ])
        return np.sort(values, kind="stable")


class EffectiveCoefficients(NamedTuple):
    """K_t^(x) = diagonal * I + collective * J / N_x."""

    diagonal: float
    collective: np.ndarray
    collective_rate: np.ndarray
    singular: np.ndarray


class UltrastrongTerms(NamedTuple):
    du: np.ndarray
    dq: np.ndarray
    dw: np.ndarray
    singular: np.ndarray


def _half_angle(t, d: HomogeneousDerived):
    t = np.asarray(t, dtype=float)
    return 0.5 * d.big_omega * t


def alpha_xi(t, d: HomogeneousDerived):
    """
    Collective-mode propagator entries.

    Args:
        t: Time (scalar or array)
        d: Derived constants

    Returns:
        Tuple (alpha1, alpha2, xi) of complex values
    """
    t = np.asarray(t, dtype=float)
    e_lam = np.exp(-1j * d.lam * t)
    e_mu = np.exp(-1j * d.mu * t)
    fp2 = d.f_plus ** 2
    fm2 = d.f_minus ** 2
    alpha1 = e_lam * fp2 + e_mu * fm2
    alpha2 = e_lam * fm2 + e_mu * fp2
    xi = d.gamma_sign * d.f_plus * d.f_minus * (e_lam - e_mu)
    return alpha1, alpha2, xi


def alpha_modulus_squared(t, d: HomogeneousDerived):
    """|alpha(t)|^2 = (Delta^2 + Gamma^2 cos^2(Omega t / 2)) / Omega^2."""
    if d.big_omega == 0:
        return np.ones_like(np.asarray(t, dtype=float))
    cos2 = np.cos(_half_angle(t, d)) ** 2
    return (d.delta ** 2 + d.big_gamma ** 2 * cos2) / d.big_omega ** 2


def g_b_functions(t, d: HomogeneousDerived):
    """
    Exchange function G(t) = G1(t) = -G2(t) and renormalization function B(t).

    G = A (Gamma^2 / Omega^2) sin^2(Omega t / 2)
    B = -Gamma^2 sin^2(Omega t / 2) / (2 (Delta^2 + Gamma^2 cos^2(Omega t / 2)))

    Returns:
        Tuple (G, B); B is NaN where |alpha|^2 underflows
    """
    angle = _half_angle(t, d)
    if d.big_omega == 0:
        zero = np.zeros_like(angle)
        return zero, zero.copy()
    sin2 = np.sin(angle) ** 2
    cos2 = np.cos(angle) ** 2
    g = d.occupation_gap * (d.big_gamma ** 2 / d.big_omega ** 2) * sin2
    denominator = d.delta ** 2 + d.big_gamma ** 2 * cos2
    with np.errstate(divide="ignore", invalid="ignore"):
        b = np.where(
            denominator > ALPHA_UNDERFLOW * d.big_omega ** 2,
            -d.big_gamma ** 2 * sin2 / (2.0 * denominator),
            np.nan
        )
    return g, b


def collective_occupations(t, d: HomogeneousDerived):
    """Collective-mode occupations (n1(nu1) + G, n2(nu2) - G)."""
    g, _ = g_b_functions(t, d)
    return d.n_nu1 + g, d.n_nu2 - g


def analytic_energies(t, d: HomogeneousDerived):
    """
    Bare and minimal-dissipation internal-energy variations.

    dE1 = nu1 G,  dE2 = -nu2 G,
    dU1^md = nu1 G - Delta B (n1 + G),  dU2^md = -nu2 G + Delta B (n2 - G)

    Returns:
        Tuple (dE1, dE2, dU1_md, dU2_md)
    """
    g, b = g_b_functions(t, d)
    de1 = d.nu1 * g
    de2 = -d.nu2 * g
    du1 = de1 - d.delta * b * (d.n_nu1 + g)
    du2 = de2 + d.delta * b * (d.n_nu2 - g)
    return de1, de2, du1, du2


def analytic_interaction_energy(t, d: HomogeneousDerived):
    """Interaction-energy variation dU_I = -dE1 - dE2 = -Delta G."""
    g, _ = g_b_functions(t, d)
    return -d.delta * g


def analytic_heat_work(t, d: HomogeneousDerived):
    """
    Exact minimal-dissipation heat and work of both subsystems.

    dQ1 = (nu/2) G - (Delta A / 2) ln|alpha|^2
    dQ2 = -(nu/2) G - (Delta A / 2) ln|alpha|^2
    dW_x = dU_x^md - dQ_x

    Returns:
        Tuple (dQ1, dW1, dQ2, dW2)
    """
    g, _ = g_b_functions(t, d)
    _, _, du1, du2 = analytic_energies(t, d)
    alpha2 = alpha_modulus_squared(t, d)
    with np.errstate(divide="ignore"):
        log_term = np.where(alpha2 > ALPHA_UNDERFLOW, np.log(alpha2), np.nan)
    shared = -0.5 * d.delta * d.occupation_gap * log_term
    dq1 = 0.5 * d.nu * g + shared
    dq2 = -0.5 * d.nu * g + shared
    return dq1, du1 - dq1, dq2, du2 - dq2


def analytic_effective_hamiltonian(t, d: HomogeneousDerived, which: int) -> EffectiveCoefficients:
    """
    Coefficients of the renormalized Hamiltonian of subsystem `which`.

    The collective eigenvalue is kappa = nu/2 +- Delta / (2 |alpha|^2)
    (+ for subsystem 1); the returned collective coefficient is kappa - eps_x.

    Args:
        t: Time (scalar or array)
        d: Derived constants
        which: Subsystem label (1 or 2)

    Returns:
        EffectiveCoefficients; collective entries are NaN where flagged singular
    """
    if which not in (1, 2):
        raise ParameterError(f"subsystem label must be 1 or 2, got {which!r}")
    sign = 1.0 if which == 1 else -1.0
    eps = d.eps1 if which == 1 else d.eps2
    alpha2 = np.asarray(alpha_modulus_squared(t, d), dtype=float)
    singular = alpha2 < ALPHA_UNDERFLOW
    safe = np.where(singular, 1.0, alpha2)

    kappa = 0.5 * d.nu + sign * 0.5 * d.delta / safe
    if d.big_omega == 0:
        alpha2_rate = np.zeros_like(safe)
    else:
        alpha2_rate = -d.big_gamma ** 2 * np.sin(d.big_omega * np.asarray(t, dtype=float)) / (2.0 * d.big_omega)
    kappa_rate = -sign * 0.5 * d.delta * alpha2_rate / safe ** 2

    return EffectiveCoefficients(
        diagonal=eps,
        collective=np.where(singular, np.nan, kappa - eps),
        collective_rate=np.where(singular, np.nan, kappa_rate),
        singular=singular
    )


def dispersive_expansions(t, d: HomogeneousDerived, which: int = 1):
    """
    Leading-order dispersive forms (|Delta| >> Gamma).

    dQ_x^md ~ nu_x [n_xbar(nu_xbar) - n_x(nu_x)] (Gamma^2 / Delta^2) sin^2(Delta t / 2)
    B ~ -(Gamma^2 / (2 Delta^2)) sin^2(Omega t / 2)

    Returns:
        Tuple (dQ_md approximation, B approximation)
    """
    t = np.asarray(t, dtype=float)
    if d.big_gamma == 0:
        zero = np.zeros_like(t)
        return zero, zero.copy()
    if d.delta == 0:
        raise ParameterError("dispersive expansion needs a nonzero detuning")
    ratio2 = (d.big_gamma / d.delta) ** 2
    if which == 1:
        dq = d.nu1 * d.occupation_gap * ratio2 * np.sin(0.5 * d.delta * t) ** 2
    else:
        dq = -d.nu2 * d.occupation_gap * ratio2 * np.sin(0.5 * d.delta * t) ** 2
    b = -0.5 * ratio2 * np.sin(_half_angle(t, d)) ** 2
    return dq, b


def in_guard_band(t, d: HomogeneousDerived):
    """True where Gamma^2 cos^2(Omega t / 2) < GUARD_BAND Delta^2."""
    cos2 = np.cos(_half_angle(t, d)) ** 2
    return d.big_gamma ** 2 * cos2 < GUARD_BAND * d.delta ** 2


def ultrastrong_expansions(t, d: HomogeneousDerived) -> UltrastrongTerms:
    """
    Leading-order ultrastrong forms (|Delta| << Gamma) for subsystem 1.

    dU1 ~ (nu/2) A sin^2(Gamma t / 2) + (Delta/2) n2(nu2) tan^2(Gamma t / 2)
    dQ1 ~ A [(nu/2) sin^2(Gamma t / 2) - Delta ln|cos(Gamma t / 2)|]
    dW1 ~ Delta A ln|cos(Gamma t / 2)| + (Delta/2) n2(nu2) tan^2(Gamma t / 2)

    Values inside the guard band around t = (2n+1) pi / Gamma are NaN and flagged.
    """
    t = np.asarray(t, dtype=float)
    singular = np.asarray(in_guard_band(t, d))
    half = 0.5 * d.big_gamma * t
    cos = np.where(singular, 1.0, np.cos(half))
    sin2 = np.sin(half) ** 2
    tan2 = sin2 / cos ** 2
    log_cos = np.log(np.abs(cos))
    a = d.occupation_gap

    du = 0.5 * d.nu * a * sin2 + 0.5 * d.delta * d.n_nu2 * tan2
    dq = a * (0.5 * d.nu * sin2 - d.delta * log_cos)
    dw = d.delta * a * log_cos + 0.5 * d.delta * d.n_nu2 * tan2
    return UltrastrongTerms(
        du=np.where(singular, np.nan, du),
        dq=np.where(singular, np.nan, dq),
        dw=np.where(singular, np.nan, dw),
        singular=singular
    )


def _uniform(n: int) -> np.ndarray:
    return np.full((n, n), 1.0 / n)


def propagator_block(t: float, d: HomogeneousDerived, which: int) -> np.ndarray:
    """U_xx = e^{-i eps_x t} I + (alpha_x - e^{-i eps_x t}) J / N_x."""
    n = d.block_size(which)
    eps = d.eps1 if which == 1 else d.eps2
    alpha1, alpha2, _ = alpha_xi(t, d)
    alpha = alpha1 if which == 1 else alpha2
    phase = np.exp(-1j * eps * t)
    return phase * np.eye(n) + (alpha - phase) * _uniform(n)


def reduced_moments(t: float, d: HomogeneousDerived, which: int) -> np.ndarray:
    """S_t^(x) = n_x(eps_x) (I - J/N_x) + collective occupation J / N_x."""
    n = d.block_size(which)
    n_eps = d.n_eps1 if which == 1 else d.n_eps2
    occupations = collective_occupations(t, d)
    collective = float(occupations[which - 1])
    j = _uniform(n)
    return n_eps * (np.eye(n) - j) + collective * j


def effective_hamiltonian_block(t: float, d: HomogeneousDerived, which: int) -> np.ndarray:
    """K_t^(x) as an N_x x N_x matrix."""
    coefficients = analytic_effective_hamiltonian(t, d, which)
    n = d.block_size(which)
    return coefficients.diagonal * np.eye(n) + float(coefficients.collective) * _uniform(n)
