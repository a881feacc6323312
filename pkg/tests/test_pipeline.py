"""
Tests for the inversion workflow: state, routing, failures and round trips.
"""

import dataclasses
from functools import partial

import numpy as np
import pytest

from cyclegraph.errors import InversionFailedError
from cyclegraph.harness.forward import compute_dataset
from cyclegraph.inverse import recover_boundary_edge
from cyclegraph.model import GraphGeometry, SpectralDataset
from cyclegraph.pipeline import (
    InversionRunner,
    InversionStatus,
    create_initial_state,
    create_workflow,
    dataset_reference,
    format_report,
    run_inversion,
    zero_reference,
)
from cyclegraph.pipeline.nodes import (
    boundary_node,
    route_after_boundary,
    route_after_loop,
    route_after_transition,
    transition_node,
)
from cyclegraph.spectral import eval_delta0, eval_delta0_k, remainder_charfns


def eigenvalues_only(dataset: SpectralDataset) -> SpectralDataset:
    empty = np.empty(0)
    return dataclasses.replace(dataset, remainder_grid=empty, kappa_main=empty,
                               kappa_k=tuple(empty for _ in dataset.kappa_k))


def placeholder_dataset(geometry: GraphGeometry) -> SpectralDataset:
    return SpectralDataset(
        geometry=geometry,
        lambda_main=[1.0, 2.0],
        lambda_k=tuple([1.5] for _ in range(geometry.m)),
        sigma=[1, -1],
        remainder_grid=[-1.0, 0.0, 1.0],
        kappa_main=np.zeros(3),
        kappa_k=tuple(np.zeros(3) for _ in range(geometry.m)),
    )


class TestInversionState:
    """Initial state and routing."""

    def test_initial_state(self, geometry, small_config):
        """Test a fresh state is pending with empty accumulators."""
        reference = zero_reference(geometry, small_config)
        state = create_initial_state(placeholder_dataset(geometry), small_config, reference)
        assert state["status"] == InversionStatus.PENDING
        assert state["boundary"] == []
        assert state["warnings"] == [] and state["messages"] == []
        assert state["truth"] is None and state["report"] is None

    @pytest.mark.parametrize("route, onward", [
        (route_after_boundary, "transition_node"),
        (route_after_transition, "loop_node"),
        (route_after_loop, "report_node"),
    ])
    def test_routing(self, route, onward):
        """Test each step continues unless it failed."""
        assert route({"status": InversionStatus.BOUNDARY_DONE}) == onward
        assert route({"status": InversionStatus.FAILED}) == "end"

    def test_workflow_compiles(self):
        """Test the graph has the four steps."""
        graph = create_workflow().get_graph()
        for name in ("boundary_node", "transition_node", "loop_node", "report_node"):
            assert name in graph.nodes


class TestFailures:
    """Failures become FAILED states with a step label and hint."""

    def test_reference_geometry_mismatch(self, geometry, small_config):
        """Test a reference for another graph fails in the boundary step."""
        other = GraphGeometry(m=2, T=(1.0, 1.0, 0.5), a=2.0)
        state = InversionRunner(small_config).run(
            placeholder_dataset(geometry), reference=zero_reference(other, small_config),
        )
        assert state["status"] == InversionStatus.FAILED
        assert state["failed_step"] == "boundary"
        assert "different graphs" in state["error_message"]
        assert state["hint"]
        assert state["recovered"] is None

    def test_run_inversion_raises(self, geometry, small_config):
        """Test the convenience wrapper raises with the step label."""
        other = GraphGeometry(m=1, T=(1.0, 1.0), a=2.0)
        with pytest.raises(InversionFailedError) as exc:
            run_inversion(placeholder_dataset(geometry), small_config, reference=zero_reference(other, small_config))
        assert exc.value.step == "boundary"
        assert exc.value.hint

    def test_periodic_coupling_stops_at_transition(self, small_config):
        """Test a = 1 cannot invert the loop."""
        periodic = GraphGeometry(m=1, T=(1.0, 1.0), a=1.0)
        update = transition_node({"dataset": placeholder_dataset(periodic), "config": small_config})
        assert update["status"] == InversionStatus.FAILED
        assert update["failed_step"] == "transition"
        assert "not in {-1, 0, 1}" in update["hint"]


class TestRoundTrips:
    """Forward data inverted back."""

    def test_zero_potentials(self, zero_potentials, small_config):
        """Test zero data invert to zero potentials with the cold-start reference."""
        dataset = compute_dataset(zero_potentials, small_config).dataset
        updates = []
        state = InversionRunner(small_config).run(dataset, truth=zero_potentials, on_update=updates.append)
        assert state["status"] == InversionStatus.COMPLETED
        assert state["target_source"] == "remainders"
        assert [m["stage"] for m in state["messages"]] == ["boundary", "transition", "loop", "report"]
        assert len(updates) >= 4
        report = state["report"]
        assert report.reference_kind == "zero"
        assert np.max(report.recovered.norms()) < 1e-4
        assert report.max_relative_error < 1e-4
        assert all(entry["quadrature_error"] < 1e-4 for entry in report.boundary)
        assert report.transition["truncation_D"] < 1e-4
        text = format_report(report)
        assert text.startswith("reference: zero; targets from remainders\n")
        assert "quad_err=" in text
        assert "q_0:" in text

    def test_zero_potentials_from_eigenvalues(self, zero_potentials, small_config):
        """Test a dataset without remainders inverts through the product over its zeros."""
        dataset = eigenvalues_only(compute_dataset(zero_potentials, small_config).dataset)
        state = InversionRunner(small_config).run(dataset, truth=zero_potentials)
        assert state["status"] == InversionStatus.COMPLETED
        assert state["target_source"] == "eigenvalues"
        assert state["report"].max_relative_error < 1e-4
        text = format_report(state["report"])
        assert "targets from eigenvalues" in text
        assert "rebuild vs stored" not in text

    def test_identical_data_local_mode(self, smooth_potentials, small_config):
        """Test eigenvalues equal to the reference's give back the reference pendants."""
        dataset = eigenvalues_only(compute_dataset(smooth_potentials, small_config).dataset)
        reference = dataset_reference(smooth_potentials, dataset)
        update = boundary_node(create_initial_state(dataset, small_config, reference))
        assert update["status"] == InversionStatus.BOUNDARY_DONE
        assert update["target_source"] == "eigenvalues"
        assert [r.k for r in update["boundary"]] == [1, 2]
        for result in update["boundary"]:
            np.testing.assert_allclose(result.q.values, smooth_potentials.q[result.k].values, atol=1e-12)
            assert result.F_max < 1e-12
            assert result.quadrature_error < 1e-12

    def test_quadrature_estimate(self, geometry, smooth_potentials, small_config):
        """Test the boundary step reports how q_k moves when the contour nodes double."""
        dataset = compute_dataset(smooth_potentials, small_config).dataset
        reference = zero_reference(geometry, small_config)
        update = boundary_node(create_initial_state(dataset, small_config, reference))
        assert update["status"] == InversionStatus.BOUNDARY_DONE
        contour = update["contour"]
        main, per_edge = remainder_charfns(dataset)
        tol = small_config.tolerances

        def recover(c):
            return recover_boundary_edge(
                1, reference.potentials.q[1],
                reference=(partial(eval_delta0, geometry), partial(eval_delta0_k, geometry, 1)),
                target=(main, per_edge[0]), contour=c, m=geometry.m,
                contour_floor=tol.contour_floor, condition_max=tol.gl_condition_max,
                substeps=small_config.grid.ode_substeps,
            )

        expected = (recover(contour.refined()).q - recover(contour).q).l2_norm()
        first = update["boundary"][0]
        assert first.quadrature_error == pytest.approx(expected, rel=1e-6, abs=1e-12)

    @pytest.mark.slow
    def test_smooth_potentials_cold_start(self, smooth_potentials, medium_config):
        """Test smooth potentials are recovered from their own data against zero."""
        dataset = compute_dataset(smooth_potentials, medium_config).dataset
        state = run_inversion(dataset, medium_config, truth=smooth_potentials)
        errors = state["report"].errors_rel
        assert np.all(errors[1:] < 0.1)
        assert errors[0] < 0.2
