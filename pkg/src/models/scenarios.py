"""
Named parameter sets of the two-bath model. Most share the reference sizes
and temperatures (N1=200, N2=300, T1 omega1=0.6, T2 omega1=4).
"""

from typing import Dict

from src.models.bipartite_model import ModelParams
from src.utils.errors import ParameterError


class Scenario:
    """A named model configuration with a suggested time window."""

    def __init__(
        self,
        name: str,
        description: str,
        params: ModelParams,
        t_max: float
    ):
        """
        Initialize scenario.

        Args:
            name: Registry key
            description: One-line summary of the regime
            params: Model parameters
            t_max: Suggested time window in units of 1/omega1
        """
        self.name = name
        self.description = description
        self.params = params
        self.t_max = t_max

    def __repr__(self):
        return f"Scenario(name='{self.name}', t_max={self.t_max:g})"


def _reference_params(**changes) -> ModelParams:
    base = dict(
        n1=200, n2=300,
        omega1=1.0, omega2=0.3,
        g1=1e-5, g2=1e-5,
        gamma=1e-5,
        temp1=0.6, temp2=4.0,
        sigma=0.0, seed=0
    )
    base.update(changes)
    return ModelParams(**base)


DISPERSIVE = Scenario(
    name="dispersive",
    description="far detuned, weak coupling, homogeneous frequencies",
    params=_reference_params(),
    t_max=2000.0
)

DISPERSIVE_DISTRIBUTED = Scenario(
    name="dispersive_distributed",
    description="far detuned, weak coupling, frequency spread sigma=0.1",
    params=_reference_params(sigma=0.1, seed=1),
    t_max=2000.0
)

STRONG_POSITIVE_DETUNING = Scenario(
    name="strong_positive_detuning",
    description="gamma=2e-3, omega2=0.3 omega1 (positive detuning)",
    params=_reference_params(gamma=2e-3),
    t_max=60.0
)

STRONG_NEGATIVE_DETUNING = Scenario(
    name="strong_negative_detuning",
    description="gamma=2e-3, omega2=1.7 omega1 (negative detuning)",
    params=_reference_params(omega2=1.7, gamma=2e-3),
    t_max=60.0
)

ULTRASTRONG_NEGATIVE_DETUNING = Scenario(
    name="ultrastrong_negative_detuning",
    description="gamma=5e-3, omega2=1.7 omega1, secondary md dips",
    params=_reference_params(omega2=1.7, gamma=5e-3),
    t_max=30.0
)

STRONG_NEGATIVE_DETUNING_WIDE = Scenario(
    name="strong_negative_detuning_wide",
    description="gamma=2e-3, omega2=1.7 omega1, frequency spread sigma=0.3",
    params=_reference_params(omega2=1.7, gamma=2e-3, sigma=0.3, seed=4),
    t_max=60.0
)

ULTRASTRONG_NEGATIVE_DETUNING_WIDE = Scenario(
    name="ultrastrong_negative_detuning_wide",
    description="gamma=5e-3, omega2=1.7 omega1, frequency spread sigma=0.3",
    params=_reference_params(omega2=1.7, gamma=5e-3, sigma=0.3, seed=4),
    t_max=30.0
)

DISPERSIVE_WIDE = Scenario(
    name="dispersive_wide",
    description="g=1e-4, gamma=5e-4, frequency spread sigma=0.3",
    params=_reference_params(g1=1e-4, g2=1e-4, gamma=5e-4, sigma=0.3, seed=5),
    t_max=2000.0
)

COLLECTIVE = Scenario(
    name="collective",
    description="intra-coupling g=0.1 omega1 reverses the effective detuning",
    params=_reference_params(g1=0.1, g2=0.1, gamma=2e-3),
    t_max=200.0
)

THERMALIZATION_NONCOLLECTIVE = Scenario(
    name="thermalization_noncollective",
    description="sigma=0.1, g=1e-5, gamma=5e-5: energy plateaus",
    params=_reference_params(gamma=5e-5, sigma=0.1, seed=2),
    t_max=3000.0
)

THERMALIZATION_COLLECTIVE = Scenario(
    name="thermalization_collective",
    description="sigma=0.1, g=1e-2, gamma=5e-5: persistent oscillations",
    params=_reference_params(g1=1e-2, g2=1e-2, gamma=5e-5, sigma=0.1, seed=2),
    t_max=3000.0
)

BALANCE_WEAK = Scenario(
    name="balance_weak",
    description="balances at gamma=1e-5, omega2=1.7 omega1, sigma=0.1",
    params=_reference_params(omega2=1.7, sigma=0.1, seed=3),
    t_max=2000.0
)

BALANCE_STRONG = Scenario(
    name="balance_strong",
    description="balances at gamma=2e-3, omega2=1.7 omega1, sigma=0.1",
    params=_reference_params(omega2=1.7, gamma=2e-3, sigma=0.1, seed=3),
    t_max=60.0
)

IDENTICAL = Scenario(
    name="identical",
    description="identical subsystems at different temperatures (nu1 = nu2)",
    params=_reference_params(n2=200, omega2=1.0, gamma=1e-3),
    t_max=40.0
)

# Registry of all scenarios
SCENARIO_REGISTRY: Dict[str, Scenario] = {
    scenario.name: scenario
    for scenario in (
        DISPERSIVE,
        DISPERSIVE_DISTRIBUTED,
        STRONG_POSITIVE_DETUNING,
        STRONG_NEGATIVE_DETUNING,
        ULTRASTRONG_NEGATIVE_DETUNING,
        STRONG_NEGATIVE_DETUNING_WIDE,
        ULTRASTRONG_NEGATIVE_DETUNING_WIDE,
        DISPERSIVE_WIDE,
        COLLECTIVE,
        THERMALIZATION_NONCOLLECTIVE,
        THERMALIZATION_COLLECTIVE,
        BALANCE_WEAK,
        BALANCE_STRONG,
        IDENTICAL,
    )
}


def get_scenario(name: str) -> Scenario:
    """Get scenario by name."""
    try:
        return SCENARIO_REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(SCENARIO_REGISTRY))
        raise ParameterError(f"unknown scenario '{name}' (known: {known})") from None
