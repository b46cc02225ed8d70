"""
Shared desk-scale model fixtures.

Sizes are kept small so the whole suite runs in seconds; the full-size
acceptance runs live in test_acceptance.py behind the `slow` marker.
"""

import pytest

from src.models.bipartite_model import ModelParams
from tests.helpers import desk_params


@pytest.fixture
def strong_params() -> ModelParams:
    """Delta > 0, |Delta| / Gamma ~ 1.4."""
    return desk_params()


@pytest.fixture
def negative_detuning_params() -> ModelParams:
    """Delta < 0 with the same coupling strength."""
    return desk_params(omega2=1.7)


@pytest.fixture
def dispersive_params() -> ModelParams:
    """|Delta| / Gamma ~ 143."""
    return desk_params(g1=1e-5, g2=1e-5, gamma=5e-4)


@pytest.fixture
def identical_params() -> ModelParams:
    """Two identical subsystems at the same temperature."""
    return ModelParams(
        n1=3, n2=3, omega1=1.0, omega2=1.0, g1=0.01, g2=0.01,
        gamma=0.05, temp1=0.6, temp2=0.6
    )


@pytest.fixture
def scenario_file(tmp_path):
    """Write a scenario INI file and return its path."""
    def write(text: str, name: str = "desk") -> str:
        path = tmp_path / f"{name}.ini"
        path.write_text(text, encoding="utf-8")
        return str(path)
    return write
