"""
Tests for cumulative Simpson integration and gap refinement.
"""

import numpy as np
import pytest

from src.utils.errors import ParameterError, SingularPropagator
from src.utils.quadrature import (
    approach_singularity,
    check_uniform_grid,
    cumulative_integral,
    simpson_segment
)


class TestGrid:

    def test_step(self):
        assert check_uniform_grid(np.linspace(0.0, 2.0, 5)) == pytest.approx(0.5)

    def test_non_uniform(self):
        with pytest.raises(ParameterError, match="uniform"):
            check_uniform_grid(np.array([0.0, 0.1, 0.3]))

    def test_decreasing(self):
        with pytest.raises(ParameterError, match="increasing"):
            check_uniform_grid(np.array([0.0, -0.1, -0.2]))

    def test_too_short(self):
        with pytest.raises(ParameterError):
            check_uniform_grid(np.array([0.0]))

    def test_length_mismatch(self):
        with pytest.raises(ParameterError):
            cumulative_integral(np.ones(4), np.linspace(0.0, 1.0, 5))


class TestCumulativeIntegral:

    def test_sine(self):
        grid = np.linspace(0.0, 2 * np.pi, 2001)
        result = cumulative_integral(np.sin(grid), grid)
        np.testing.assert_allclose(result, 1.0 - np.cos(grid), atol=1e-10)

    def test_starts_at_zero(self):
        grid = np.linspace(0.0, 1.0, 11)
        assert cumulative_integral(np.exp(grid), grid)[0] == 0.0

    def test_polynomial_convergence(self):
        def error(n):
            grid = np.linspace(0.0, 3.0, n)
            return np.max(np.abs(cumulative_integral(np.cos(3 * grid), grid) - np.sin(3 * grid) / 3))
        assert error(41) / error(81) >= 4.0

    def test_gap_without_integrand_propagates(self):
        grid = np.linspace(0.0, 1.0, 101)
        values = np.cos(grid)
        values[50] = np.nan
        result = cumulative_integral(values, grid)
        assert np.all(np.isfinite(result[:50]))
        assert np.all(np.isnan(result[50:]))
        np.testing.assert_allclose(result[:50], np.sin(grid[:50]), atol=1e-9)

    def test_gap_refined_through_integrand(self):
        grid = np.linspace(0.0, 1.0, 101)
        values = np.cos(grid)
        values[50] = np.nan
        tolerance = 1e-5
        result = cumulative_integral(values, grid, integrand=np.cos, tolerance=tolerance)
        assert np.all(np.isfinite(result))
        np.testing.assert_allclose(result, np.sin(grid), atol=3 * tolerance)

    def test_non_integrable_gap_flags_the_rest(self):
        grid = np.linspace(0.0, 1.0, 101)
        singular = grid[60]
        with np.errstate(divide="ignore"):
            values = 1.0 / (grid - singular) ** 2
        values[60] = np.nan

        def integrand(t):
            return 1.0 / (t - singular) ** 2

        result = cumulative_integral(values, grid, integrand=integrand, tolerance=1e-6, levels=8)
        assert np.all(np.isfinite(result[:60]))
        assert np.all(np.isnan(result[60:]))

    def test_isolated_pair_uses_trapezoid(self):
        grid = np.linspace(0.0, 0.4, 5)
        values = np.array([1.0, 3.0, np.nan, np.nan, np.nan])
        result = cumulative_integral(values, grid)
        assert result[1] == pytest.approx(0.2)
        assert np.all(np.isnan(result[2:]))


class TestSingularApproach:

    def test_simpson_segment_is_exact_for_cubics(self):
        assert simpson_segment(lambda t: t ** 3, 0.0, 2.0) == pytest.approx(4.0, rel=1e-14)

    def test_log_singularity_converges(self):
        # integral of ln(t) from 1 down to 0 is +1
        value = approach_singularity(np.log, 1.0, 0.0, tolerance=1e-6, levels=40)
        assert value is not None
        assert value == pytest.approx(1.0, abs=5e-4)

    def test_divergent_returns_none(self):
        assert approach_singularity(lambda t: 1.0 / t ** 2, 1.0, 0.0, tolerance=1e-6) is None

    def test_singular_window_returns_none(self):
        def integrand(t):
            if t < 0.1:
                raise SingularPropagator(t, 1e13)
            return 1.0
        assert approach_singularity(integrand, 1.0, 0.0, tolerance=1e-12) is None
