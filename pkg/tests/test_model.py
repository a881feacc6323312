"""
Tests for geometry, grid functions, potential sets and the text storage format.
"""

import numpy as np
import pytest

from cyclegraph.errors import DatasetParseError, DatasetValidationError, GeometryError
from cyclegraph.model import (
    GraphGeometry,
    GridFunction,
    PotentialSet,
    SpectralDataset,
    load_dataset,
    load_potentials,
    nodes_for_length,
    project_mean_zero,
    save_dataset,
    save_potentials,
)


def tiny_dataset() -> SpectralDataset:
    return SpectralDataset(
        geometry=GraphGeometry(m=1, T=(1.0, 0.5), a=2.0),
        lambda_main=np.array([-1.25, 9.5, 9.5, 40.0]),
        lambda_k=(np.array([3.0, 30.0 + 1e-9]),),
        sigma=np.array([1, -1, 0]),
        remainder_grid=np.array([-2.0, 0.0, 2.0]),
        kappa_main=np.array([0.1, 1.0 / 3.0, -0.2]),
        kappa_k=(np.array([0.0, 1e-17, 2.5]),),
    )


class TestGraphGeometry:
    """Shape validation of the loop-plus-pendants graph."""

    def test_valid(self, geometry):
        """Test the shared fixture geometry."""
        assert geometry.m == 2
        assert geometry.total_length == 3.0
        assert geometry.supports_loop_inversion

    def test_length_count_mismatch(self):
        """Test the number of lengths must be m + 1."""
        with pytest.raises(ValueError, match="edge lengths"):
            GraphGeometry(m=2, T=(1.0, 1.0), a=2.0)

    def test_non_positive_length(self):
        """Test lengths must be positive."""
        with pytest.raises(ValueError):
            GraphGeometry(m=1, T=(1.0, 0.0), a=2.0)

    def test_zero_coupling(self):
        """Test a = 0 is rejected at construction."""
        with pytest.raises(ValueError):
            GraphGeometry(m=1, T=(1.0, 1.0), a=0.0)

    @pytest.mark.parametrize("a", [1.0, -1.0])
    def test_periodic_coupling_blocks_loop_inversion(self, a):
        """Test periodic and antiperiodic couplings are flagged."""
        geometry = GraphGeometry(m=1, T=(1.0, 1.0), a=a)
        assert not geometry.supports_loop_inversion
        with pytest.raises(GeometryError):
            geometry.require_loop_inversion()


class TestGridFunction:
    """Uniform-grid samples and mean-zero projection."""

    def test_nodes_for_length(self):
        """Test node counts scale with the edge length."""
        assert nodes_for_length(1.0, 129) == 129
        assert nodes_for_length(0.5, 129) == 65
        assert nodes_for_length(0.01, 129) == 17

    def test_values_are_read_only(self):
        """Test samples cannot be mutated after construction."""
        fn = GridFunction(1.0, np.zeros(5))
        with pytest.raises(ValueError):
            fn.values[0] = 1.0

    def test_too_few_nodes(self):
        """Test a single sample is rejected."""
        with pytest.raises(GeometryError):
            GridFunction(1.0, np.zeros(1))

    def test_mean_zero_flag_checked(self):
        """Test the mean-zero flag is verified."""
        with pytest.raises(GeometryError, match="mean-zero"):
            GridFunction(1.0, np.ones(9), mean_zero=True)

    def test_project_mean_zero(self):
        """Test projection removes the trapezoid mean."""
        fn = GridFunction.from_callable(lambda x: 2.0 + np.cos(3 * x), 2.0, 101)
        centered = project_mean_zero(fn)
        assert centered.mean_zero
        assert abs(centered.integral()) < 1e-12
        np.testing.assert_allclose(np.diff(centered.values), np.diff(fn.values), atol=1e-14)

    def test_project_constant(self):
        """Test a constant projects to zero."""
        centered = project_mean_zero(GridFunction(1.0, np.full(33, 7.0)))
        assert np.max(np.abs(centered.values)) < 1e-12

    def test_l2_norm(self):
        """Test the trapezoid L2 norm of sin(pi x) on [0, 1]."""
        fn = GridFunction.from_callable(lambda x: np.sin(np.pi * x), 1.0, 2001)
        assert fn.l2_norm() == pytest.approx(np.sqrt(0.5), rel=1e-6)

    def test_arithmetic_needs_same_grid(self):
        """Test adding functions on different grids fails."""
        with pytest.raises(GeometryError, match="grid mismatch"):
            GridFunction(1.0, np.zeros(5)) + GridFunction(1.0, np.zeros(7))

    def test_resample(self):
        """Test linear resampling preserves linear functions."""
        fn = GridFunction.from_callable(lambda x: 3 * x - 1, 1.0, 11)
        np.testing.assert_allclose(fn.resample(21).values, 3 * np.linspace(0, 1, 21) - 1, atol=1e-14)


class TestPotentialSet:
    """Per-edge potentials bound to a geometry."""

    def test_zeros(self, geometry):
        """Test the zero set has one mean-zero function per edge."""
        potentials = PotentialSet.zeros(geometry, 65)
        assert len(potentials.q) == 3
        assert len(potentials.boundary) == 2
        assert all(fn.is_zero for fn in potentials.q)
        np.testing.assert_array_equal(potentials.norms(), np.zeros(3))

    def test_wrong_count(self, geometry):
        """Test the number of edges must match."""
        with pytest.raises(GeometryError, match="expected 3"):
            PotentialSet(geometry, (GridFunction.zeros(1.0, 9),))

    def test_wrong_length(self, geometry):
        """Test each function must live on its edge."""
        q = (GridFunction.zeros(1.0, 9), GridFunction.zeros(2.0, 9), GridFunction.zeros(1.0, 9))
        with pytest.raises(GeometryError, match=r"q\[1\]"):
            PotentialSet(geometry, q)

    def test_not_mean_zero(self, geometry):
        """Test raw non-centered samples are rejected."""
        q = (GridFunction.zeros(1.0, 9), GridFunction(1.0, np.ones(9)), GridFunction.zeros(1.0, 9))
        with pytest.raises(GeometryError, match="mean-zero"):
            PotentialSet(geometry, q)

    def test_from_values_projects(self, geometry):
        """Test from_values centers each edge."""
        x = np.linspace(0, 1, 33)
        potentials = PotentialSet.from_values(geometry, [x, x ** 2, np.ones(33)])
        assert all(fn.is_mean_zero() for fn in potentials.q)

    def test_replace(self, zero_potentials, smooth_potentials):
        """Test replacing one edge keeps the others."""
        replaced = zero_potentials.replace(1, smooth_potentials.q[1])
        assert replaced.q[1] == smooth_potentials.q[1]
        assert replaced.q[0] == zero_potentials.q[0]
        assert replaced != zero_potentials


class TestDatasetStorage:
    """Text storage of spectral datasets and potentials."""

    def test_round_trip_is_exact(self, tmp_path):
        """Test every double survives a save/load cycle."""
        dataset = tiny_dataset()
        path = save_dataset(dataset, tmp_path / "dataset.txt")
        assert load_dataset(path) == dataset

    def test_header_and_sections(self, tmp_path):
        """Test the documented layout."""
        path = save_dataset(tiny_dataset(), tmp_path / "dataset.txt")
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "cyclegraph-spectral v1"
        for section in ("GEOMETRY", "EIGENVALUES", "SIGMA", "REMAINDERS"):
            assert section in lines
        assert "lambda_main[4]" in lines
        assert "kappa_k.1[3]" in lines

    def test_comments_and_blank_lines_ignored(self, tmp_path):
        """Test '#' comments and blank lines are skipped."""
        path = save_dataset(tiny_dataset(), tmp_path / "dataset.txt")
        text = path.read_text(encoding="utf-8").replace("EIGENVALUES", "# spectra\n\nEIGENVALUES")
        path.write_text(text, encoding="utf-8")
        assert load_dataset(path) == tiny_dataset()

    def test_parse_error_names_line(self, tmp_path):
        """Test a malformed value reports its field and 1-based line."""
        path = save_dataset(tiny_dataset(), tmp_path / "dataset.txt")
        lines = path.read_text(encoding="utf-8").splitlines()
        bad = lines.index("lambda_main[4]") + 2
        lines[bad] = "not-a-number"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        with pytest.raises(DatasetParseError) as exc:
            load_dataset(path)
        assert exc.value.field == "lambda_main"
        assert exc.value.line == bad + 1

    def test_bad_header(self, tmp_path):
        """Test an unknown header is rejected on line 1."""
        path = tmp_path / "dataset.txt"
        path.write_text("something else\n", encoding="utf-8")
        with pytest.raises(DatasetParseError) as exc:
            load_dataset(path)
        assert exc.value.line == 1

    def test_truncated_file(self, tmp_path):
        """Test a file cut short is a parse error."""
        path = save_dataset(tiny_dataset(), tmp_path / "dataset.txt")
        text = path.read_text(encoding="utf-8")
        path.write_text(text[: text.index("SIGMA")], encoding="utf-8")
        with pytest.raises(DatasetParseError, match="SIGMA"):
            load_dataset(path)

    def test_unsorted_eigenvalues(self, tmp_path):
        """Test descending eigenvalues fail validation."""
        path = save_dataset(tiny_dataset(), tmp_path / "dataset.txt")
        text = path.read_text(encoding="utf-8").replace("\n40\n", "\n-40\n")
        path.write_text(text, encoding="utf-8")
        with pytest.raises(DatasetValidationError) as exc:
            load_dataset(path)
        assert exc.value.field == "lambda_main"

    def test_sigma_out_of_range(self):
        """Test sigma must lie in {-1, 0, 1}."""
        with pytest.raises(DatasetValidationError):
            SpectralDataset(
                geometry=GraphGeometry(m=1, T=(1.0, 1.0), a=2.0),
                lambda_main=[1.0], lambda_k=([2.0],), sigma=[2],
                remainder_grid=[0.0], kappa_main=[0.0], kappa_k=([0.0],),
            )

    def test_not_utf8(self, tmp_path):
        """Test bytes that are not UTF-8 are a parse error, not a decode crash."""
        path = save_dataset(tiny_dataset(), tmp_path / "dataset.txt")
        raw = path.read_bytes().replace(b"SIGMA", b"SIGMA\n\xff\xfe")
        path.write_bytes(raw)
        with pytest.raises(DatasetParseError) as exc:
            load_dataset(path)
        assert exc.value.field == "encoding"
        assert exc.value.line == raw[: raw.index(b"\xff")].count(b"\n") + 1

    @pytest.mark.parametrize("token", ["nan", "inf", "-inf"])
    def test_non_finite_eigenvalue(self, tmp_path, token):
        """Test nan and inf eigenvalues are rejected on their line."""
        path = save_dataset(tiny_dataset(), tmp_path / "dataset.txt")
        lines = path.read_text(encoding="utf-8").splitlines()
        bad = lines.index("lambda_main[4]") + 3
        lines[bad] = token
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        with pytest.raises(DatasetValidationError) as exc:
            load_dataset(path)
        assert exc.value.field == "lambda_main"
        assert exc.value.line == bad + 1

    def test_non_finite_in_memory(self):
        """Test the constructor rejects non-finite eigenvalues and remainder samples."""
        geometry = GraphGeometry(m=1, T=(1.0, 1.0), a=2.0)
        with pytest.raises(DatasetValidationError, match="eigenvalue 2 is not finite"):
            SpectralDataset(geometry=geometry, lambda_main=[1.0, np.nan], lambda_k=([2.0],), sigma=[1],
                            remainder_grid=[0.0], kappa_main=[0.0], kappa_k=([0.0],))
        with pytest.raises(DatasetValidationError, match="not finite"):
            SpectralDataset(geometry=geometry, lambda_main=[1.0], lambda_k=([2.0],), sigma=[1],
                            remainder_grid=[0.0], kappa_main=[np.inf], kappa_k=([0.0],))

    def test_eigenvalues_only_round_trip(self, tmp_path):
        """Test a dataset without remainder samples is written and read without the REMAINDERS section."""
        dataset = SpectralDataset(
            geometry=GraphGeometry(m=1, T=(1.0, 0.5), a=2.0),
            lambda_main=[-1.25, 9.5], lambda_k=([3.0],), sigma=[1],
            remainder_grid=[], kappa_main=[], kappa_k=([],),
        )
        assert not dataset.has_remainders
        path = save_dataset(dataset, tmp_path / "dataset.txt")
        assert "REMAINDERS" not in path.read_text(encoding="utf-8")
        loaded = load_dataset(path)
        assert loaded == dataset
        assert not loaded.has_remainders
        assert loaded.remainder_radius == 0.0

    def test_spectrum_accessors(self):
        """Test k = 0 selects Delta and k >= 1 selects Delta_k."""
        dataset = tiny_dataset()
        np.testing.assert_array_equal(dataset.spectrum(0), dataset.lambda_main)
        np.testing.assert_array_equal(dataset.spectrum(1), dataset.lambda_k[0])
        np.testing.assert_array_equal(dataset.remainder(1), dataset.kappa_k[0])
        assert dataset.remainder_radius == 2.0

    def test_potentials_round_trip(self, tmp_path, smooth_potentials):
        """Test potentials survive a save/load cycle."""
        path = save_potentials(smooth_potentials, tmp_path / "potentials.txt")
        assert path.read_text(encoding="utf-8").startswith("cyclegraph-potentials v1\n")
        assert load_potentials(path) == smooth_potentials
