"""
Tests for real zero finding in s = sign(lambda) sqrt|lambda|.
"""

import numpy as np
import pytest

from cyclegraph.spectral import find_real_zeros, scan_grid


def sin_sqrt(lam):
    return np.sin(np.sqrt(np.abs(lam)))


class TestScanGrid:
    def test_equal_steps_in_s(self):
        """Test nodes are equally spaced in the signed square root."""
        grid = scan_grid((-4.0, 100.0), 0.1)
        s = np.sign(grid) * np.sqrt(np.abs(grid))
        assert grid[0] == pytest.approx(-4.0)
        assert grid[-1] == pytest.approx(100.0)
        assert np.max(np.diff(s)) <= 0.1 + 1e-12
        assert np.allclose(np.diff(s), np.diff(s)[0])

    def test_empty_window(self):
        """Test an inverted window is refused."""
        with pytest.raises(ValueError):
            scan_grid((5.0, 1.0), 0.1)


class TestFindRealZeros:
    """Simple, close and double zeros."""

    def test_simple_zeros(self):
        """Test sin(sqrt lambda) vanishes at (pi n)^2."""
        result = find_real_zeros(sin_sqrt, (1.0, (10.5 * np.pi) ** 2))
        expected = (np.pi * np.arange(1, 11)) ** 2
        assert len(result) == 10
        np.testing.assert_allclose(result.values, expected, rtol=1e-9)
        assert np.all(result.multiplicity == 1)
        assert result.warnings == []

    def test_double_zero(self):
        """Test a touching zero is reported once with multiplicity 2."""
        result = find_real_zeros(lambda lam: (lam - 4.3) ** 2, (0.0, 10.0))
        assert len(result) == 2
        assert result.roots.size == 1
        assert result.multiplicity[0] == 2
        assert result.roots[0] == pytest.approx(4.3, abs=1e-5)
        np.testing.assert_allclose(result.values, [result.roots[0]] * 2)

    def test_close_pair_is_split(self):
        """Test two zeros closer than the scan step are both found."""
        result = find_real_zeros(lambda lam: (lam - 5.0) * (lam - 5.001), (0.0, 10.0))
        assert len(result) == 2
        assert np.all(result.multiplicity == 1)
        np.testing.assert_allclose(result.values, [5.0, 5.001], atol=1e-8)

    def test_negative_zero(self):
        """Test zeros below the origin."""
        result = find_real_zeros(lambda lam: lam + 7.25, (-20.0, 20.0))
        np.testing.assert_allclose(result.values, [-7.25], rtol=1e-10)

    def test_expected_count_warning(self):
        """Test a count far from the expectation adds a warning."""
        result = find_real_zeros(sin_sqrt, (1.0, (10.5 * np.pi) ** 2), expected_count=20)
        assert len(result) == 10
        assert len(result.warnings) == 1
        assert "expected about 20" in result.warnings[0]

    def test_count_within_slack(self):
        """Test no warning inside the slack."""
        result = find_real_zeros(sin_sqrt, (1.0, (10.5 * np.pi) ** 2), expected_count=11, count_slack=1)
        assert result.warnings == []

    def test_precomputed_scan_values(self):
        """Test scan samples can be supplied by the caller."""
        window = (1.0, (6.5 * np.pi) ** 2)
        grid = scan_grid(window, 0.02)
        result = find_real_zeros(sin_sqrt, window, scan_values=sin_sqrt(grid))
        assert len(result) == 6

    def test_scan_values_shape_checked(self):
        """Test mismatched scan samples are refused."""
        with pytest.raises(ValueError, match="scan grid"):
            find_real_zeros(sin_sqrt, (1.0, 100.0), scan_values=np.ones(3))

    def test_first(self):
        """Test the leading-values accessor."""
        result = find_real_zeros(sin_sqrt, (1.0, (5.5 * np.pi) ** 2))
        np.testing.assert_allclose(result.first(2), (np.pi * np.arange(1, 3)) ** 2, rtol=1e-9)
