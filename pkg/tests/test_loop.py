"""
Tests for quasiperiodic-to-Dirichlet conversion and the loop reconstruction.
"""

import numpy as np
import pytest
from scipy.integrate import simpson

from cyclegraph.errors import InconsistentNormingError, NotRealizableError
from cyclegraph.inverse import (
    DirichletData,
    QuasiData,
    dirichlet_kernel,
    gl_dirichlet_reconstruct,
    quasi_to_dirichlet,
    unscale_loop_potential,
    verify_sigma_condition,
)
from cyclegraph.model import GraphGeometry, GridFunction, PotentialSet, project_mean_zero
from cyclegraph.ode import integrate_fundamental, lambda_derivative, solution_trace
from cyclegraph.spectral import CharFnSet, find_real_zeros, signs_sigma

N_ZERO = np.arange(1, 9)


def zero_loop_data(a: float = 2.0, count: int = 8) -> QuasiData:
    n = np.arange(1, count + 1)
    return QuasiData(
        d_eval=lambda lam: (a + 1.0 / a) * np.cos(np.sqrt(np.asarray(lam, dtype=complex))),
        lambda_n=(np.pi * n) ** 2,
        sigma=(-1) ** n,
        a=a,
    )


def zero_h_dot(lam):
    rho = np.sqrt(np.asarray(lam, dtype=float))
    return (rho * np.cos(rho) - np.sin(rho)) / (2 * rho ** 3)


def wavy_loop(n_nodes: int = 257) -> GridFunction:
    x = np.linspace(0.0, 1.0, n_nodes)
    return project_mean_zero(GridFunction(1.0, 0.5 * np.cos(2 * np.pi * x) + 0.2 * np.sin(2 * np.pi * x)))


def exact_dirichlet(q: GridFunction, count: int) -> DirichletData:
    lam = find_real_zeros(lambda mu: integrate_fundamental(q, mu).S, (-10.0, (np.pi * (count + 0.5)) ** 2)).values
    alpha = (lambda_derivative(q, lam).S * integrate_fundamental(q, lam).Sp).real
    return DirichletData(lambda_n=lam[:count], alpha_n=alpha[:count])


class TestQuasiToDirichlet:
    """Norming constants from d, sigma and h_dot."""

    def test_zero_loop(self):
        """Test the zero loop gives alpha_n = 1/(2 pi^2 n^2)."""
        dd = quasi_to_dirichlet(zero_loop_data(), zero_h_dot)
        np.testing.assert_allclose(dd.alpha_n, 1.0 / (2 * np.pi ** 2 * N_ZERO ** 2), rtol=1e-12)
        np.testing.assert_allclose(dd.reference_ratio, 1.0, rtol=1e-12)

    def test_not_realizable(self):
        """Test |d| < 2 at a Dirichlet zero is refused."""
        qd = QuasiData(d_eval=lambda lam: np.ones_like(lam), lambda_n=np.array([10.0, 40.0]),
                       sigma=np.array([1, -1]), a=2.0)
        with pytest.raises(NotRealizableError) as exc:
            quasi_to_dirichlet(qd, zero_h_dot)
        assert exc.value.n == 1

    def test_inconsistent_sign(self):
        """Test a negated h_dot makes alpha_n negative."""
        with pytest.raises(InconsistentNormingError):
            quasi_to_dirichlet(zero_loop_data(), lambda lam: -zero_h_dot(lam))

    def test_optional_pairs_are_cut(self):
        """Test a failing pair past the required count shortens the data instead of raising."""
        qd = zero_loop_data()
        failing = QuasiData(
            d_eval=lambda lam: np.where(np.real(lam) < (6.5 * np.pi) ** 2, qd.d_eval(lam), 1.0),
            lambda_n=qd.lambda_n, sigma=qd.sigma, a=qd.a,
        )
        dd = quasi_to_dirichlet(failing, zero_h_dot, required=5)
        assert dd.lambda_n.size == 6
        with pytest.raises(NotRealizableError) as exc:
            quasi_to_dirichlet(failing, zero_h_dot, required=7)
        assert exc.value.n == 7

    def test_matches_integral_of_S_squared(self):
        """Test alpha_n = int_0^1 S(x, lambda_n)^2 dx for a non-zero loop."""
        geometry = GraphGeometry(m=1, T=(1.0, 1.0), a=2.0)
        q = wavy_loop()
        cf = CharFnSet(PotentialSet(geometry, (q, GridFunction.zeros(1.0, 257))))
        lam = find_real_zeros(cf.eval_h, (-10.0, (6.5 * np.pi) ** 2)).values
        qd = QuasiData(d_eval=cf.eval_d, lambda_n=lam, sigma=signs_sigma(cf, lam).sigma, a=geometry.a)
        dd = quasi_to_dirichlet(qd, cf.eval_h_dot)
        trace = solution_trace(q, lam).S_vals.real
        expected = simpson(trace ** 2, x=q.x, axis=0)
        np.testing.assert_allclose(dd.alpha_n, expected, rtol=1e-5)


class TestDirichletReconstruction:
    """Gelfand-Levitan on the unit interval with zero reference."""

    def test_zero_data_kernel_vanishes(self):
        """Test reference pairs give F = 0 and q = 0."""
        n = np.arange(1, 21)
        dd = DirichletData(lambda_n=(np.pi * n) ** 2, alpha_n=1.0 / (2 * np.pi ** 2 * n ** 2))
        x = np.linspace(0.0, 1.0, 65)
        assert dirichlet_kernel(dd, 20, x).max_abs() < 1e-12
        result = gl_dirichlet_reconstruct(dd, 20, 257)
        assert result.q0.l2_norm() < 1e-6
        assert result.n_pairs == 20

    def test_reconstructs_smooth_potential(self):
        """Test 40 exact pairs recover a smooth loop potential."""
        q = wavy_loop()
        result = gl_dirichlet_reconstruct(exact_dirichlet(q, 40), 40, 257)
        assert (result.q0 - q).l2_norm() / q.l2_norm() < 0.1
        assert abs(result.mean) < 0.1

    def test_convergence_check(self):
        """Test the comparison against twice the pairs is reported."""
        result = gl_dirichlet_reconstruct(exact_dirichlet(wavy_loop(), 24), 12, 257, convergence_check=True)
        assert result.n_pairs == 12
        assert result.refinement_pairs == 24
        assert result.refinement_difference is not None
        assert result.refinement_difference < 0.5

    def test_convergence_check_sees_higher_pairs(self):
        """Test content only in pairs past N is caught, which a comparison with N/2 pairs misses."""
        x = np.linspace(0.0, 1.0, 257)
        q = GridFunction(1.0, 3.0 * np.cos(24 * np.pi * x))
        dd = exact_dirichlet(q, 16)
        result = gl_dirichlet_reconstruct(dd, 8, 257, convergence_check=True)
        assert result.refinement_pairs == 16
        assert result.refinement_difference > 0.2
        assert any("differs from 16 pairs" in w for w in result.warnings)
        coarse = gl_dirichlet_reconstruct(dd, 4, 257)
        assert (result.q0 - coarse.q0).l2_norm() < 0.5 * result.refinement_difference

    def test_convergence_check_without_extra_pairs(self):
        """Test data with exactly N pairs skip the comparison with a warning."""
        n = np.arange(1, 6)
        dd = DirichletData(lambda_n=(np.pi * n) ** 2, alpha_n=1.0 / (2 * np.pi ** 2 * n ** 2))
        result = gl_dirichlet_reconstruct(dd, 5, 65, convergence_check=True)
        assert result.refinement_difference is None
        assert any("no Dirichlet pairs beyond 5" in w for w in result.warnings)

    def test_pairs_capped_by_data(self):
        """Test asking for more pairs than given uses what is there."""
        n = np.arange(1, 6)
        dd = DirichletData(lambda_n=(np.pi * n) ** 2, alpha_n=1.0 / (2 * np.pi ** 2 * n ** 2))
        assert gl_dirichlet_reconstruct(dd, 40, 65).n_pairs == 5


class TestLoopHelpers:
    def test_unscale(self):
        """Test q(x) = q_unit(x / T0) / T0^2 on a loop of length 2."""
        x = np.linspace(0.0, 1.0, 257)
        q_unit = project_mean_zero(GridFunction(1.0, np.cos(2 * np.pi * x)))
        q = unscale_loop_potential(q_unit, 2.0, 513)
        assert q.length == 2.0 and q.n_nodes == 513
        np.testing.assert_allclose(q.values, np.cos(np.pi * q.x) / 4.0, atol=1e-4)

    def test_sigma_condition_holds(self):
        """Test the zero loop reproduces its own sign data."""
        report = verify_sigma_condition(zero_loop_data(), GridFunction.zeros(1.0, 129))
        assert report.ok
        assert report.checked == 8
        assert report.zero_signs == 0
        assert report.max_d_deviation < 1e-8

    def test_sigma_condition_mismatch(self):
        """Test flipped signs are reported by index."""
        qd = zero_loop_data()
        flipped = QuasiData(d_eval=qd.d_eval, lambda_n=qd.lambda_n, sigma=-qd.sigma, a=qd.a)
        report = verify_sigma_condition(flipped, GridFunction.zeros(1.0, 129))
        assert not report.ok
        assert report.mismatches == list(range(1, 9))
