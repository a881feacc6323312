"""Inversion report: diagnostics per step and errors against known potentials."""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid

from cyclegraph.model import GridFunction, PotentialSet, SpectralDataset
from cyclegraph.spectral import remainders_from_evaluators


@dataclass
class InversionReport:
    recovered: PotentialSet
    reference_kind: str
    boundary: List[Dict[str, float]]
    contour: Dict[str, float]
    transition: Dict[str, float]
    loop: Dict[str, float]
    sigma_mismatches: List[int]
    consistency: np.ndarray
    stored_norms: np.ndarray
    target_source: str = "eigenvalues"
    errors_abs: Optional[np.ndarray] = None
    errors_rel: Optional[np.ndarray] = None
    warnings: List[str] = field(default_factory=list)

    @property
    def max_relative_error(self) -> Optional[float]:
        return None if self.errors_rel is None else float(np.max(self.errors_rel))


def _norm(values: np.ndarray, grid: np.ndarray) -> float:
    return float(np.sqrt(trapezoid(np.abs(values) ** 2, grid)))


def rebuild_consistency(dataset: SpectralDataset, delta: Callable,
                        delta_k: Sequence[Callable]) -> Tuple[np.ndarray, np.ndarray]:
    """
    L2 distance on the real axis between the remainders of the rebuilt
    characteristic functions and the stored samples, main function first.

    Returns:
        (distances, norms of the stored samples)
    """
    if not dataset.has_remainders:
        return np.empty(0), np.empty(0)
    grid = dataset.remainder_grid
    main, per_edge = remainders_from_evaluators(dataset.geometry, grid, delta, lambda k, lam: delta_k[k - 1](lam))
    rebuilt = [main, *per_edge]
    stored = [dataset.remainder(k) for k in range(dataset.geometry.m + 1)]
    distance = np.array([_norm(r - s, grid) for r, s in zip(rebuilt, stored)])
    return distance, np.array([_norm(s, grid) for s in stored])


def _on_grid(fn: GridFunction, n_nodes: int) -> np.ndarray:
    return fn.values if fn.n_nodes == n_nodes else fn.resample(n_nodes).values


def edge_errors(recovered: PotentialSet, truth: PotentialSet) -> Tuple[np.ndarray, np.ndarray]:
    """Absolute and relative L2 errors per edge, loop first; relative falls back to absolute for q = 0."""
    absolute, relative = [], []
    for got, want in zip(recovered.q, truth.q):
        diff = GridFunction(got.length, got.values - _on_grid(want, got.n_nodes))
        err = diff.l2_norm()
        scale = want.l2_norm()
        absolute.append(err)
        relative.append(err / scale if scale > 0 else err)
    return np.array(absolute), np.array(relative)


def _optional(label: str, value: Optional[float]) -> str:
    if value is None or not np.isfinite(value):
        return ""
    return f"{label}={value:.3e}"


def format_report(report: InversionReport) -> str:
    lines = [f"reference: {report.reference_kind}; targets from {report.target_source}"]
    c = report.contour
    lines.append(f"contour: tau={c['tau']:.4g} sigma_max={c['sigma_max']:.6g} nodes={int(c['n_nodes'])}")
    for entry in report.boundary:
        lines.append(
            f"edge {int(entry['k'])}: mean={entry['mean']:.3e} |M_hat|={entry['weyl_l2']:.3e} "
            f"max|F|={entry['F_max']:.3e} max|K|={entry['K_max']:.3e} diag_defect={entry['diagonal_defect']:.2e}"
            + _optional(" quad_err", entry.get("quadrature_error"))
        )
    t = report.transition
    lines.append(f"transition: alpha={t['alpha']:.3g} modes={int(t['n_modes'])} min|E|={t['min_abs_E']:.3e} "
                 f"h(0)={t['h_zero']:.6g}"
                 + _optional(" trunc_D", t.get("truncation_D")) + _optional(" trunc_K", t.get("truncation_K")))
    lp = report.loop
    lines.append(f"loop: pairs={int(lp['n_pairs'])} raw_mean={lp['mean']:.3e}"
                 + _optional(f" change_vs_{int(lp.get('refinement_pairs') or 0)}_pairs",
                             lp.get("refinement_difference")))
    lines.append(f"sigma mismatches: {report.sigma_mismatches or 'none'}")
    for k, (dist, norm) in enumerate(zip(report.consistency, report.stored_norms)):
        name = "kappa_main" if k == 0 else f"kappa_k.{k}"
        lines.append(f"rebuild vs stored {name}: |diff|={dist:.3e} |stored|={norm:.3e}")
    if report.errors_abs is not None:
        for j, (ea, er) in enumerate(zip(report.errors_abs, report.errors_rel)):
            lines.append(f"q_{j}: |q_rec - q|={ea:.4e} relative={er:.4e}")
    for w in report.warnings:
        lines.append(f"warning: {w}")
    return "\n".join(lines) + "\n"


__all__ = ["InversionReport", "edge_errors", "format_report", "rebuild_consistency"]
