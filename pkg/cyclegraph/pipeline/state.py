"""
Inversion state shared by the pipeline nodes.

Each node reads what earlier steps produced and returns the keys it adds.
warnings and messages are appended rather than replaced.
"""

import operator
from enum import Enum
from typing import Annotated, List, Optional, Tuple, TypedDict, Union

from cyclegraph.config import RunConfig
from cyclegraph.inverse import BoundaryResult, ContourSpec, LoopKernels, LoopReconstruction, SigmaReport
from cyclegraph.model import PotentialSet, SpectralDataset
from cyclegraph.pipeline.reference import ReferenceProblem
from cyclegraph.pipeline.report import InversionReport
from cyclegraph.spectral import EigenvalueList, RebuiltCharFn, RemainderCharFn

TargetCharFn = Union[RebuiltCharFn, RemainderCharFn]


class InversionStatus(str, Enum):
    """Where the inversion currently stands."""
    PENDING = "pending"
    BOUNDARY_DONE = "boundary_done"
    TRANSITION_DONE = "transition_done"
    LOOP_DONE = "loop_done"
    COMPLETED = "completed"
    FAILED = "failed"


class StageMessage(TypedDict):
    stage: str
    content: str
    elapsed: float


class InversionState(TypedDict):
    # Inputs
    dataset: SpectralDataset
    config: RunConfig
    reference: ReferenceProblem
    truth: Optional[PotentialSet]

    # Boundary step; target_source is "remainders" or "eigenvalues"
    target_source: Optional[str]
    target_delta: Optional[TargetCharFn]
    target_delta_k: Optional[Tuple[TargetCharFn, ...]]
    contour: Optional[ContourSpec]
    boundary: List[BoundaryResult]

    # Vertex transition
    kernels: Optional[LoopKernels]
    dirichlet: Optional[EigenvalueList]

    # Loop
    loop: Optional[LoopReconstruction]
    sigma_report: Optional[SigmaReport]
    recovered: Optional[PotentialSet]

    # Report
    report: Optional[InversionReport]

    # Control
    status: InversionStatus
    failed_step: Optional[str]
    error_message: Optional[str]
    hint: Optional[str]

    warnings: Annotated[List[str], operator.add]
    messages: Annotated[List[StageMessage], operator.add]


def create_initial_state(dataset: SpectralDataset, config: RunConfig, reference: ReferenceProblem,
                         truth: Optional[PotentialSet] = None) -> InversionState:
    """
    Fresh state for one inversion.

    Args:
        dataset: Spectral data to invert
        config: Run configuration (resolutions, tolerances)
        reference: Known problem the data are compared with
        truth: Potentials that generated the data, for the error report
    """
    return InversionState(
        dataset=dataset,
        config=config,
        reference=reference,
        truth=truth,
        target_source=None,
        target_delta=None,
        target_delta_k=None,
        contour=None,
        boundary=[],
        kernels=None,
        dirichlet=None,
        loop=None,
        sigma_report=None,
        recovered=None,
        report=None,
        status=InversionStatus.PENDING,
        failed_step=None,
        error_message=None,
        hint=None,
        warnings=[],
        messages=[],
    )
