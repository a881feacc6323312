"""Forward runs, perturbations, sweeps and self-checks behind the command line."""

from .forward import ForwardResult, build_potentials, cmd_forward, compute_dataset, geometry_from_config
from .invert import cmd_invert
from .perturb import cmd_perturb, perturb_potentials
from .sweep import SweepPointResult, SweepSummary, cmd_stability_sweep

__all__ = [
    "ForwardResult",
    "SweepPointResult",
    "SweepSummary",
    "build_potentials",
    "cmd_forward",
    "cmd_invert",
    "cmd_perturb",
    "cmd_stability_sweep",
    "compute_dataset",
    "geometry_from_config",
    "perturb_potentials",
]
