"""
Exception hierarchy for the bipartite oscillator simulation.
"""

from typing import Optional


class ThermoDuetError(Exception):
    """Base class for all simulation errors."""


class ParameterError(ThermoDuetError, ValueError):
    """Invalid model parameters, grid, or matrix dimensions."""


class SamplingError(ParameterError):
    """Frequency rejection sampling exhausted its retry cap."""

    def __init__(self, subsystem: int, retries: int):
        self.subsystem = subsystem
        self.retries = retries
        super().__init__(
            f"frequency sampling for subsystem {subsystem} produced no positive "
            f"draw after {retries} retries; sigma is too large"
        )


class ConfigError(ThermoDuetError):
    """Scenario or sweep configuration could not be parsed."""

    def __init__(
        self,
        message: str,
        path: Optional[str] = None,
        key: Optional[str] = None,
        line: Optional[int] = None
    ):
        self.path = path
        self.key = key
        self.line = line
        location = []
        if path:
            location.append(str(path))
        if line is not None:
            location.append(f"line {line}")
        if key:
            location.append(f"key '{key}'")
        prefix = ", ".join(location)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class PhysicsError(ThermoDuetError):
    """The requested physical state is undefined."""


class EigensolverError(ThermoDuetError):
    """Eigendecomposition failed or did not pass its residual check."""


class SingularPropagator(ThermoDuetError):
    """Reduced propagator too ill-conditioned to invert."""

    def __init__(self, t: float, condition: float):
        self.t = t
        self.condition = condition
        super().__init__(
            f"reduced propagator is singular at t={t:.6g} "
            f"(condition number {condition:.3e})"
        )


class FockDimensionError(ParameterError):
    """Truncated Fock space is too large for dense evolution."""


class VerificationFailure(ThermoDuetError):
    """A verification run exceeded its tolerance."""
