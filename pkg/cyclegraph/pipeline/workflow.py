"""
LangGraph workflow for the three-step reconstruction.

    boundary -> transition -> loop -> report
        |            |          |
        +------------+----------+--> END on failure
"""

import logging
from typing import Any, Callable, Dict, Optional

from langgraph.graph import END, StateGraph

from cyclegraph.config import RunConfig
from cyclegraph.errors import InversionFailedError
from cyclegraph.model import PotentialSet, SpectralDataset
from cyclegraph.pipeline.nodes import (
    boundary_node,
    loop_node,
    report_node,
    route_after_boundary,
    route_after_loop,
    route_after_transition,
    transition_node,
)
from cyclegraph.pipeline.reference import ReferenceProblem, zero_reference
from cyclegraph.pipeline.state import InversionState, InversionStatus, create_initial_state

logger = logging.getLogger(__name__)


def create_workflow():
    """
    Build and compile the inversion graph.

    Returns:
        Compiled StateGraph; no checkpointer, every run starts from a fresh state
    """
    workflow = StateGraph(InversionState)

    workflow.add_node("boundary_node", boundary_node)
    workflow.add_node("transition_node", transition_node)
    workflow.add_node("loop_node", loop_node)
    workflow.add_node("report_node", report_node)

    workflow.set_entry_point("boundary_node")

    workflow.add_conditional_edges(
        "boundary_node",
        route_after_boundary,
        {"transition_node": "transition_node", "end": END},
    )
    workflow.add_conditional_edges(
        "transition_node",
        route_after_transition,
        {"loop_node": "loop_node", "end": END},
    )
    workflow.add_conditional_edges(
        "loop_node",
        route_after_loop,
        {"report_node": "report_node", "end": END},
    )
    workflow.add_edge("report_node", END)

    return workflow.compile()


class InversionRunner:
    """
    Runs the inversion workflow for one configuration.

    The compiled graph is reused across datasets.
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self.workflow = create_workflow()

    def run(self, dataset: SpectralDataset, reference: Optional[ReferenceProblem] = None,
            truth: Optional[PotentialSet] = None,
            on_update: Optional[Callable[[Dict[str, Any]], None]] = None) -> InversionState:
        """
        Invert one dataset.

        Args:
            dataset: Spectral data
            reference: Known problem; zero potentials when omitted
            truth: Potentials behind the data, for the error report
            on_update: Called with the full state after every step

        Returns:
            Final state; status is COMPLETED or FAILED
        """
        if reference is None:
            reference = zero_reference(dataset.geometry, self.config)
        initial = create_initial_state(dataset, self.config, reference, truth)

        final = None
        for values in self.workflow.stream(initial, stream_mode="values"):
            final = values
            if on_update:
                on_update(values)
        for message in final.get("messages", []):
            logger.debug("[Pipeline] %s: %s (%.2fs)", message["stage"], message["content"], message["elapsed"])
        return final


def run_inversion(dataset: SpectralDataset, config: RunConfig, reference: Optional[ReferenceProblem] = None,
                  truth: Optional[PotentialSet] = None) -> InversionState:
    """
    Convenience wrapper that raises on failure.

    Raises:
        InversionFailedError: Some step failed; carries the step label and hint
    """
    state = InversionRunner(config).run(dataset, reference, truth)
    if state["status"] == InversionStatus.FAILED:
        raise InversionFailedError(state["failed_step"], state["error_message"], state["hint"])
    return state
