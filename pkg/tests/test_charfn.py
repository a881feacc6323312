"""
Tests for the characteristic-function family and the sign data.
"""

import numpy as np
import pytest

from cyclegraph.errors import DataInconsistencyError
from cyclegraph.model import GraphGeometry, PotentialSet
from cyclegraph.spectral import (
    CharFnSet,
    boundary_products,
    eval_delta0,
    eval_delta0_k,
    find_real_zeros,
    signs_sigma,
    spectral_lower_bound,
)


class TestZeroPotentialClosedForms:
    """Direct evaluation against the closed forms."""

    @pytest.fixture
    def uneven(self) -> GraphGeometry:
        return GraphGeometry(m=2, T=(1.0, 1.3, 0.7), a=2.0)

    def test_delta(self, uneven):
        """Test Delta for distinct edge lengths."""
        cf = CharFnSet(PotentialSet.zeros(uneven, 129))
        lam = np.linspace(-50.0, 2000.0, 40) + 5.0j
        closed = eval_delta0(uneven, lam)
        np.testing.assert_allclose(cf.eval_delta(lam), closed, rtol=0, atol=1e-10 * np.max(np.abs(closed)))

    @pytest.mark.parametrize("k", [1, 2])
    def test_delta_k(self, uneven, k):
        """Test Delta_k for each pendant edge."""
        cf = CharFnSet(PotentialSet.zeros(uneven, 129))
        lam = np.linspace(-50.0, 2000.0, 40) - 3.0j
        closed = eval_delta0_k(uneven, k, lam)
        np.testing.assert_allclose(cf.eval_delta_k(k, lam), closed, rtol=0, atol=1e-10 * np.max(np.abs(closed)))

    def test_pendant_index_checked(self, uneven):
        """Test k outside 1..m is refused."""
        with pytest.raises(IndexError):
            eval_delta0_k(uneven, 3, 1.0)
        with pytest.raises(IndexError):
            CharFnSet(PotentialSet.zeros(uneven, 65)).eval_delta_k(0, 1.0)


class TestCharFnSet:
    """Evaluators on smooth potentials."""

    def test_d_H_identity(self, smooth_potentials):
        """Test d^2 - H^2 = 4 C_0 S_0' at complex lambda."""
        cf = CharFnSet(smooth_potentials)
        lam = np.array([-10.0, 3.0 + 1j, 77.0, 400.0 - 2j])
        values = cf.evaluate(lam)
        loop = cf.endpoints(lam)[0]
        np.testing.assert_allclose(values.d ** 2 - values.H ** 2, 4 * loop.C * loop.Sp, rtol=1e-9)

    def test_single_evaluators_agree(self, smooth_potentials):
        """Test the individual evaluators match the batch evaluation."""
        cf = CharFnSet(smooth_potentials)
        lam = np.array([12.0, 150.0 + 4j])
        values = cf.evaluate(lam)
        np.testing.assert_allclose(cf.eval_d(lam), values.d, rtol=1e-14)
        np.testing.assert_allclose(cf.eval_h(lam), values.h, rtol=1e-14)
        np.testing.assert_allclose(cf.eval_pi(lam), values.products.pi, rtol=1e-14)
        np.testing.assert_allclose(cf.eval_K_k(2, lam), values.products.K_k[1], rtol=1e-14)

    def test_delta_assembly(self, smooth_potentials):
        """Test Delta = (d - 2) Pi + a h K."""
        cf = CharFnSet(smooth_potentials)
        lam = np.array([5.0, 60.0 + 1j])
        a = cf.geometry.a
        expected = (cf.eval_d(lam) - 2) * cf.eval_pi(lam) + a * cf.eval_h(lam) * cf.eval_K(lam)
        np.testing.assert_allclose(cf.eval_delta(lam), expected, rtol=1e-12)

    def test_boundary_products_need_no_loop(self, smooth_potentials):
        """Test pendant products from the boundary potentials alone."""
        lam = np.array([9.0, 90.0 + 2j])
        products = boundary_products(smooth_potentials.boundary, lam)
        np.testing.assert_allclose(products.K, CharFnSet(smooth_potentials).eval_K(lam), rtol=1e-14)

    def test_spectral_lower_bound(self, smooth_potentials):
        """Test neither Delta nor Delta_1 vanishes below the bound."""
        cf = CharFnSet(smooth_potentials)
        bound = spectral_lower_bound(smooth_potentials)
        assert bound < 0
        assert len(find_real_zeros(cf.eval_delta, (bound - 300.0, bound))) == 0
        assert len(find_real_zeros(lambda lam: cf.eval_delta_k(1, lam), (bound - 300.0, bound))) == 0


class TestSignsSigma:
    """Sign data at the Dirichlet zeros of the loop."""

    def test_zero_loop_alternates(self):
        """Test sigma_n = (-1)^n for the zero loop with a = 2."""
        geometry = GraphGeometry(m=1, T=(1.0, 1.0), a=2.0)
        cf = CharFnSet(PotentialSet.zeros(geometry, 129))
        report = signs_sigma(cf, (np.pi * np.arange(1, 11)) ** 2)
        np.testing.assert_array_equal(report.sigma, [(-1) ** n for n in range(1, 11)])
        assert report.max_defect < 1e-9

    def test_smooth_loop_zeros(self, smooth_potentials):
        """Test sigma at numerically located Dirichlet zeros."""
        cf = CharFnSet(smooth_potentials)
        dirichlet = find_real_zeros(cf.eval_h, (-50.0, (8.5 * np.pi) ** 2))
        report = signs_sigma(cf, dirichlet)
        assert report.sigma.size == len(dirichlet) == 8
        assert set(report.sigma.tolist()) <= {-1, 0, 1}
        np.testing.assert_allclose(report.d_values ** 2 - report.H_values ** 2, 4.0, atol=1e-6)

    def test_not_dirichlet_zeros(self):
        """Test points that are not zeros of h fail the cross-check."""
        geometry = GraphGeometry(m=1, T=(1.0, 1.0), a=2.0)
        cf = CharFnSet(PotentialSet.zeros(geometry, 65))
        with pytest.raises(DataInconsistencyError, match="expected 4"):
            signs_sigma(cf, [2.0, 30.0])

    def test_symmetric_coupling_gives_zero_sigma(self):
        """Test a = 1 makes H vanish at the Dirichlet zeros of the zero loop."""
        geometry = GraphGeometry(m=1, T=(1.0, 1.0), a=1.0)
        cf = CharFnSet(PotentialSet.zeros(geometry, 65))
        report = signs_sigma(cf, (np.pi * np.arange(1, 6)) ** 2)
        np.testing.assert_array_equal(report.sigma, np.zeros(5))

    def test_empty(self, smooth_potentials):
        """Test an empty zero list."""
        assert signs_sigma(CharFnSet(smooth_potentials), []).sigma.size == 0
