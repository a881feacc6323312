"""Inverse steps: pendant edges, vertex transition and the loop."""

from .boundary import (
    BoundaryResult,
    MSMReport,
    RecoveredEdge,
    assemble_F,
    recover_boundary_edge,
    quadrature_error,
    recover_qk,
    verify_msm_identity,
)
from .contour import ContourSpec, WeylDiffSamples, contour_integral, spectral_floor, weyl_diff
from .gelfand_levitan import KernelGrid, deriv14_const_dx, gl_residual, potential_shift, solve_gl
from .loop import (
    DirichletData,
    LoopReconstruction,
    QuasiData,
    SigmaReport,
    dirichlet_kernel,
    gl_dirichlet_reconstruct,
    quasi_to_dirichlet,
    unscale_loop_potential,
    verify_sigma_condition,
)
from .transition import (
    CramerValues,
    LoopKernels,
    RieszNodes,
    check_E_identity,
    cramer_dh,
    dirichlet_from_h,
    extract_loop_kernels,
    kernels_from_coefficients,
    riesz_coefficients,
    riesz_synthesize,
)

__all__ = [
    "BoundaryResult",
    "ContourSpec",
    "CramerValues",
    "DirichletData",
    "KernelGrid",
    "LoopKernels",
    "LoopReconstruction",
    "MSMReport",
    "QuasiData",
    "RecoveredEdge",
    "RieszNodes",
    "SigmaReport",
    "WeylDiffSamples",
    "assemble_F",
    "check_E_identity",
    "contour_integral",
    "cramer_dh",
    "deriv14_const_dx",
    "dirichlet_from_h",
    "dirichlet_kernel",
    "extract_loop_kernels",
    "gl_dirichlet_reconstruct",
    "gl_residual",
    "kernels_from_coefficients",
    "potential_shift",
    "quadrature_error",
    "quasi_to_dirichlet",
    "recover_boundary_edge",
    "recover_qk",
    "riesz_coefficients",
    "riesz_synthesize",
    "solve_gl",
    "spectral_floor",
    "unscale_loop_potential",
    "verify_msm_identity",
    "verify_sigma_condition",
    "weyl_diff",
]
