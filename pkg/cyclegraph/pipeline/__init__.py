"""Three-step reconstruction as a langgraph workflow."""

from .reference import ReferenceProblem, dataset_reference, zero_reference
from .report import InversionReport, format_report
from .state import InversionState, InversionStatus, create_initial_state
from .workflow import InversionRunner, create_workflow, run_inversion

__all__ = [
    "InversionReport",
    "InversionRunner",
    "InversionState",
    "InversionStatus",
    "ReferenceProblem",
    "create_initial_state",
    "create_workflow",
    "dataset_reference",
    "format_report",
    "run_inversion",
    "zero_reference",
]
