"""
Recovery of a pendant-edge potential from Delta and Delta_k.

The Weyl function difference on the contour gives the kernel

    F(x, t) = -(1/2 pi i) int_Gamma M_hat(mu) S(x, mu) S(t, mu) dmu

built from the reference solutions S. The Gelfand-Levitan equation then
yields K(x, t) and q_tilde = q + 2 d/dx K(x, x).
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid

from cyclegraph.inverse.contour import ContourSpec, Evaluator, WeylDiffSamples, contour_integral, weyl_diff
from cyclegraph.inverse.gelfand_levitan import KernelGrid, potential_shift, solve_gl, trapezoid_weights
from cyclegraph.model.geometry import GridFunction, project_mean_zero
from cyclegraph.ode import solution_trace

logger = logging.getLogger(__name__)


def assemble_F(weyl: WeylDiffSamples, q_ref: GridFunction, x_nodes: Optional[np.ndarray] = None,
               t_nodes: Optional[np.ndarray] = None, substeps: int = 1) -> KernelGrid:
    """
    Contour quadrature of F(x, t) with the reference solutions S(., mu).

    Args:
        weyl: M_hat sampled on the contour
        q_ref: Reference potential on the pendant edge
        x_nodes, t_nodes: Grids on [0, T]; default to the grid of q_ref

    Returns:
        Real KernelGrid F(x_i, t_j)
    """
    x_nodes = q_ref.x if x_nodes is None else np.asarray(x_nodes, dtype=float)
    t_nodes = x_nodes if t_nodes is None else np.asarray(t_nodes, dtype=float)
    lam = weyl.contour.lam

    if not np.any(weyl.values):
        return KernelGrid(x_nodes, t_nodes, np.zeros((x_nodes.size, t_nodes.size)))

    Sx = solution_trace(q_ref, lam, grid=x_nodes, substeps=substeps).S_vals
    St = Sx if t_nodes is x_nodes else solution_trace(q_ref, lam, grid=t_nodes, substeps=substeps).S_vals
    weighted = Sx * (weyl.values * weyl.contour.weights)[None, :]
    F = -(weighted @ St.T) / (2j * np.pi)
    return KernelGrid(x_nodes, t_nodes, F.real)


@dataclass(frozen=True)
class RecoveredEdge:
    """Potential recovered on one pendant edge plus diagnostics."""

    q: GridFunction
    mean: float
    recentered: bool
    diagonal_defect: float


def recover_qk(K: KernelGrid, q_ref: GridFunction, recenter: bool = True) -> RecoveredEdge:
    """
    q_tilde = q_ref + 2 d/dx K(x, x).

    The raw result need not integrate to zero; its mean is reported and,
    with recenter, removed.
    """
    shift = potential_shift(K)
    base = q_ref.values if q_ref.n_nodes == shift.size else q_ref.resample(shift.size).values
    raw = GridFunction(q_ref.length, base + shift)
    mean = raw.integral() / raw.length

    # K(x, x) = 1/2 int_0^x (q_tilde - q)
    running = 0.5 * cumulative_trapezoid(shift, K.x_nodes, initial=0.0)
    diagonal = K.diagonal().real
    scale = max(float(np.max(np.abs(diagonal))), 1e-300)
    defect = float(np.max(np.abs(running - (diagonal - diagonal[0])))) / scale if np.any(diagonal) else 0.0

    q = project_mean_zero(raw) if recenter else raw
    return RecoveredEdge(q=q, mean=mean, recentered=recenter, diagonal_defect=defect)


@dataclass
class BoundaryResult:
    """Everything produced while recovering one pendant edge."""

    k: int
    recovered: RecoveredEdge
    weyl: WeylDiffSamples
    F_max: float
    K_max: float
    # L2 change of q_k when the contour nodes are doubled
    quadrature_error: Optional[float] = None

    @property
    def q(self) -> GridFunction:
        return self.recovered.q


def quadrature_error(coarse: BoundaryResult, fine: BoundaryResult) -> float:
    """L2 distance between the potentials of one edge recovered on a contour and on its refinement."""
    return (fine.q - coarse.q).l2_norm()


def recover_boundary_edge(k: int, q_ref: GridFunction, reference: Tuple[Evaluator, Evaluator],
                          target: Tuple[Evaluator, Evaluator], contour: ContourSpec, m: int,
                          contour_floor: float = 1e-3, condition_max: float = 1e8,
                          substeps: int = 1) -> BoundaryResult:
    """
    One pass of the boundary step for edge k.

    Args:
        reference: (Delta, Delta_k) of the known reference problem
        target: (Delta, Delta_k) of the problem being recovered
    """
    weyl = weyl_diff(reference[0], reference[1], target[0], target[1], contour, m, contour_floor)
    F = assemble_F(weyl, q_ref, substeps=substeps)
    K = solve_gl(F, condition_max=condition_max)
    recovered = recover_qk(K, q_ref)
    logger.info(
        "[Boundary] edge %d: |M_hat|_2=%.3e max|F|=%.3e max|K|=%.3e mean=%.2e",
        k, weyl.l2_norm(), F.max_abs(), K.max_abs(), recovered.mean,
    )
    return BoundaryResult(k=k, recovered=recovered, weyl=weyl, F_max=F.max_abs(), K_max=K.max_abs())


@dataclass
class MSMReport:
    """Reconstruction-formula and main-equation residuals."""

    defect_l2: float
    difference_l2: float
    predicted: np.ndarray
    probe_residuals: List[float] = field(default_factory=list)

    @property
    def relative_defect(self) -> float:
        return self.defect_l2 / self.difference_l2 if self.difference_l2 > 0 else self.defect_l2

    @property
    def max_probe_residual(self) -> float:
        return max(self.probe_residuals) if self.probe_residuals else 0.0


_PROBE_FRACTIONS = (0.2, 0.4, 0.6, 0.8, 1.0)
_PROBE_LAMBDAS = (1.0, 10.0, 40.0, 90.0, 160.0)


def verify_msm_identity(q: GridFunction, q_tilde: GridFunction, weyl: WeylDiffSamples,
                        probes: Sequence[Tuple[float, float]] = (), substeps: int = 1) -> MSMReport:
    """
    Check q_tilde - q = (2 / 2 pi i) int_Gamma M_hat (S S_tilde)' dmu and the
    main equation S_tilde = S + (1/2 pi i) int_Gamma R S_tilde dmu.

    weyl must be M - M_tilde with M built from q and M_tilde from q_tilde.

    Args:
        probes: (x fraction of T, lambda) points for the main equation;
            five default points when empty
    """
    lam = weyl.contour.lam
    nodes = q.x
    tr = solution_trace(q, lam, grid=nodes, substeps=substeps)
    tr_t = solution_trace(q_tilde, lam, grid=nodes, substeps=substeps)
    w = weyl.values * weyl.contour.weights

    derivative = tr.Sp_vals * tr_t.S_vals + tr.S_vals * tr_t.Sp_vals
    predicted = 2.0 * contour_integral(derivative * weyl.values[None, :], weyl.contour).real
    actual = q_tilde.values - (q.values if q.n_nodes == q_tilde.n_nodes else q.resample(q_tilde.n_nodes).values)
    weights = trapezoid_weights(nodes.size, q.step)
    defect = float(np.sqrt(np.sum(weights * (actual - predicted) ** 2)))
    diff_norm = float(np.sqrt(np.sum(weights * actual ** 2)))

    residuals = []
    points = probes or list(zip(_PROBE_FRACTIONS, _PROBE_LAMBDAS))
    for fraction, lam_probe in points:
        i = int(round(fraction * (nodes.size - 1)))
        s_probe = solution_trace(q, lam_probe, grid=nodes[: i + 1], substeps=substeps).S_vals
        st_probe = solution_trace(q_tilde, lam_probe, grid=nodes[i: i + 1], substeps=substeps).S_vals[0]
        s_direct = s_probe[-1]
        # R(x, lambda, mu) = M_hat(mu) int_0^x S(t, lambda) S(t, mu) dt
        wx = trapezoid_weights(i + 1, q.step)
        R = (wx * s_probe) @ tr.S_vals[: i + 1, :]
        rhs = s_direct + np.sum(R * tr_t.S_vals[i, :] * w) / (2j * np.pi)
        residuals.append(float(abs(st_probe - rhs) / max(abs(st_probe), 1e-300)))

    return MSMReport(defect_l2=defect, difference_l2=diff_norm, predicted=predicted, probe_residuals=residuals)


__all__ = [
    "BoundaryResult",
    "MSMReport",
    "RecoveredEdge",
    "assemble_F",
    "quadrature_error",
    "recover_boundary_edge",
    "recover_qk",
    "verify_msm_identity",
]
