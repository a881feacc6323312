"""
Tests for the fundamental-solution integrator.
"""

import numpy as np
import pytest

from cyclegraph.errors import OverflowGuardError
from cyclegraph.model import GridFunction
from cyclegraph.ode import (
    integrate_fundamental,
    integrate_with_derivative,
    lambda_derivative,
    solution_trace,
    zero_potential_endpoints,
)


@pytest.fixture
def wavy() -> GridFunction:
    return GridFunction.from_callable(lambda x: 2.0 * np.cos(2 * np.pi * x) + np.sin(5 * x), 1.0, 257)


class TestIntegrateFundamental:
    """Endpoint values S, S', C, C'."""

    def test_constant_potential_is_exact(self):
        """Test q = c against sin(k T)/k with k^2 = lambda - c."""
        c, length = 3.0, 1.3
        q = GridFunction(length, np.full(65, c))
        lam = np.array([20.0, -4.0 + 0j, 150.0 + 7.0j])
        k = np.sqrt(lam - c + 0j)
        ends = integrate_fundamental(q, lam)
        np.testing.assert_allclose(ends.S, np.sin(k * length) / k, rtol=1e-11)
        np.testing.assert_allclose(ends.Sp, np.cos(k * length), rtol=1e-11, atol=1e-12)
        np.testing.assert_allclose(ends.C, np.cos(k * length), rtol=1e-11, atol=1e-12)
        np.testing.assert_allclose(ends.Cp, -k * np.sin(k * length), rtol=1e-11, atol=1e-11)

    def test_zero_potential_matches_closed_form(self):
        """Test the zero potential reproduces the entire closed forms."""
        q = GridFunction.zeros(0.8, 33)
        lam = np.array([0.0, 1e-12, 25.0, -9.0, 400.0 - 3.0j])
        ends, closed = integrate_fundamental(q, lam), zero_potential_endpoints(lam, 0.8)
        np.testing.assert_allclose(ends.S, closed.S, rtol=1e-13)
        assert closed.S[0] == pytest.approx(0.8)

    def test_shape_follows_input(self, wavy):
        """Test scalar and 2-D inputs keep their shapes."""
        assert integrate_fundamental(wavy, 4.0).S.shape == ()
        assert integrate_fundamental(wavy, np.ones((2, 3))).C.shape == (2, 3)

    def test_wronskian(self, wavy):
        """Test C S' - C' S stays 1 over a wide lambda range."""
        lam = np.concatenate([np.linspace(-300, 3000, 40), np.linspace(0, 2000, 20) + 40j])
        ends = integrate_fundamental(wavy, lam)
        scale = np.abs(ends.C * ends.Sp) + np.abs(ends.Cp * ends.S) + 1.0
        assert np.max(ends.wronskian_defect() / scale) < 1e-10

    def test_step_halving_converges(self, wavy):
        """Test doubling the substeps changes S(T) only slightly."""
        lam = np.array([20.0, 200.0])
        coarse = integrate_fundamental(wavy, lam, substeps=1).S
        fine = integrate_fundamental(wavy, lam, substeps=2).S
        np.testing.assert_allclose(coarse, fine, rtol=1e-6)

    def test_overflow_guard(self, wavy):
        """Test large |Im rho| T is refused."""
        with pytest.raises(OverflowGuardError):
            integrate_fundamental(wavy, -(800.0 ** 2))


class TestLambdaDerivative:
    """Derivatives in lambda from the variational system."""

    def test_against_finite_differences(self, wavy):
        """Test dS/dlambda and dS'/dlambda against central differences."""
        lam, h = 37.0 + 2.0j, 1e-5
        derivs = lambda_derivative(wavy, lam)
        plus, minus = integrate_fundamental(wavy, lam + h), integrate_fundamental(wavy, lam - h)
        assert derivs.S == pytest.approx((plus.S - minus.S) / (2 * h), rel=1e-6)
        assert derivs.Sp == pytest.approx((plus.Sp - minus.Sp) / (2 * h), rel=1e-6)
        assert derivs.C == pytest.approx((plus.C - minus.C) / (2 * h), rel=1e-6)

    def test_combined_call_agrees(self, wavy):
        """Test values and derivatives from one pass match the separate calls."""
        lam = np.array([5.0, 90.0])
        values, derivs = integrate_with_derivative(wavy, lam)
        np.testing.assert_allclose(values.S, integrate_fundamental(wavy, lam).S, rtol=1e-14)
        np.testing.assert_allclose(derivs.Sp, lambda_derivative(wavy, lam).Sp, rtol=1e-14)

    def test_zero_potential_dirichlet_derivative(self):
        """Test dS/dlambda at (pi n)^2 for q = 0 on [0, 1]."""
        n = np.arange(1, 6)
        derivs = lambda_derivative(GridFunction.zeros(1.0, 33), (np.pi * n) ** 2)
        expected = np.cos(np.pi * n) / (2 * (np.pi * n) ** 2)
        np.testing.assert_allclose(derivs.S.real, expected, rtol=1e-10)


class TestSolutionTrace:
    """Interior values on a node set."""

    def test_last_row_is_endpoint(self, wavy):
        """Test the trace at x = T equals the endpoint data."""
        lam = np.array([12.0, 60.0 + 1j])
        trace = solution_trace(wavy, lam, with_c=True)
        ends = integrate_fundamental(wavy, lam)
        assert trace.S_vals.shape == (wavy.n_nodes, 2)
        np.testing.assert_allclose(trace.S_vals[-1], ends.S, rtol=1e-13)
        np.testing.assert_allclose(trace.Cp_vals[-1], ends.Cp, rtol=1e-13)
        np.testing.assert_allclose(trace.S_vals[0], 0.0, atol=0)

    def test_custom_grid(self):
        """Test a constant potential sampled at off-grid nodes."""
        q = GridFunction(1.0, np.full(17, -2.0))
        nodes = np.array([0.0, 0.123, 0.5, 0.77])
        k = np.sqrt(10.0 + 2.0)
        trace = solution_trace(q, 10.0, grid=nodes)
        np.testing.assert_allclose(trace.S_vals, np.sin(k * nodes) / k, rtol=1e-11, atol=1e-15)
        assert trace.C_vals is None
