"""Desk-scale parameter builders shared by the test modules."""

import numpy as np

from src.models.analytic import HomogeneousDerived
from src.models.bipartite_model import ModelParams, build_hamiltonian, sample_frequencies


def desk_params(**overrides) -> ModelParams:
    """4 + 6 modes, strong exchange, hot subsystem 2."""
    values = dict(
        n1=4, n2=6,
        omega1=1.0, omega2=0.3,
        g1=1e-3, g2=1e-3,
        gamma=0.05,
        temp1=0.6, temp2=4.0,
    )
    values.update(overrides)
    return ModelParams(**values)


def period_grid(params: ModelParams, n_points: int = 2001, periods: float = 1.0) -> np.ndarray:
    """Grid over whole exchange periods 2 pi / Omega of the collective pair."""
    d = HomogeneousDerived.from_params(params)
    return np.linspace(0.0, periods * d.period, n_points)


def hamiltonian_of(params: ModelParams):
    return build_hamiltonian(params, sample_frequencies(params))
