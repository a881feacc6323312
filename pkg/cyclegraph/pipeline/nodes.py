"""
Graph node functions for the inversion workflow.

Each node runs one step of the reconstruction, takes the InversionState
and returns the keys it adds. A CycleGraphError inside a node becomes a
FAILED state carrying the step label and a remediation hint.
"""

import logging
import time
from dataclasses import dataclass, replace
from typing import Dict, Literal

import numpy as np

from cyclegraph.errors import (
    ContourTooLowError,
    CycleGraphError,
    GeometryError,
    IllConditionedError,
    InconsistentNormingError,
    NodeCollisionError,
    NotRealizableError,
    OverflowGuardError,
    RootFindingError,
)
from cyclegraph.inverse import (
    ContourSpec,
    QuasiData,
    dirichlet_from_h,
    extract_loop_kernels,
    gl_dirichlet_reconstruct,
    quadrature_error,
    quasi_to_dirichlet,
    recover_boundary_edge,
    spectral_floor,
    unscale_loop_potential,
    verify_sigma_condition,
)
from cyclegraph.model import PotentialSet, nodes_for_length
from cyclegraph.pipeline.report import InversionReport, edge_errors, rebuild_consistency
from cyclegraph.pipeline.state import InversionState, InversionStatus
from cyclegraph.spectral import remainder_charfns

logger = logging.getLogger(__name__)

_HINTS = {
    ContourTooLowError: "raise contour.tau or contour.tau_margin",
    IllConditionedError: "perturbation too large for the local regime; use a reference closer to the data",
    NodeCollisionError: "change riesz.alpha or allow more riesz.max_retries",
    NotRealizableError: "the data do not come from a graph of this kind; check the eigenvalues and signs",
    InconsistentNormingError: "check the sign data sigma against the eigenvalues",
    RootFindingError: "the loop data are degenerate at this resolution; raise riesz.n_modes",
    OverflowGuardError: "lower contour.tau or the edge lengths",
    GeometryError: "loop inversion needs a not in {-1, 0, 1}",
}


def _hint(error: CycleGraphError) -> str:
    for kind, hint in _HINTS.items():
        if isinstance(error, kind):
            return hint
    return "see the log for details"


def _failure(step: str, error: CycleGraphError, started: float) -> Dict:
    hint = _hint(error)
    logger.error("[%s] failed: %s (hint: %s)", step, error, hint)
    return {
        "status": InversionStatus.FAILED,
        "failed_step": step,
        "error_message": str(error),
        "hint": hint,
        "messages": [{"stage": step, "content": f"Failed: {error}", "elapsed": time.perf_counter() - started}],
    }


@dataclass(frozen=True)
class _Samples:
    """Evaluator backed by values taken at fixed nodes."""

    lam: np.ndarray
    values: np.ndarray

    def __call__(self, lam) -> np.ndarray:
        if not np.array_equal(np.asarray(lam), self.lam):
            raise ValueError("samples requested away from their nodes")
        return self.values


def _target_evaluators(dataset, reference):
    """Delta and Delta_k of the data: continued from the remainders when stored, else rebuilt from the zeros."""
    if dataset.has_remainders:
        main, per_edge = remainder_charfns(dataset)
        return "remainders", main, per_edge
    main, per_edge = reference.rebuild(dataset)
    return "eigenvalues", main, per_edge


def _recover_edges(dataset, config, reference, source, delta_t, delta_kt, contour):
    tol = config.tolerances
    geometry = dataset.geometry
    lam = contour.lam
    ref_main, ref_k = reference.evaluate(lam)
    tgt_main = ref_main * delta_t.ratio(lam) if source == "eigenvalues" else delta_t(lam)
    results = []
    for k in range(1, geometry.m + 1):
        rebuilt = delta_kt[k - 1]
        tgt_k = ref_k[k - 1] * rebuilt.ratio(lam) if source == "eigenvalues" else rebuilt(lam)
        results.append(recover_boundary_edge(
            k,
            reference.potentials.q[k],
            reference=(_Samples(lam, ref_main), _Samples(lam, ref_k[k - 1])),
            target=(_Samples(lam, tgt_main), _Samples(lam, tgt_k)),
            contour=contour,
            m=geometry.m,
            contour_floor=tol.contour_floor,
            condition_max=tol.gl_condition_max,
            substeps=config.grid.ode_substeps,
        ))
    return results


# === Node Functions ===

def boundary_node(state: InversionState) -> Dict:
    """Recover every pendant-edge potential from Delta and Delta_k."""
    started = time.perf_counter()
    dataset, config, reference = state["dataset"], state["config"], state["reference"]
    geometry = dataset.geometry
    warnings = []
    try:
        if reference.geometry != geometry:
            raise GeometryError("reference and dataset describe different graphs")
        source, delta_t, delta_kt = _target_evaluators(dataset, reference)
        floor = spectral_floor(dataset.lambda_main, *dataset.lambda_k, reference.lambda_main, *reference.lambda_k)
        contour = ContourSpec.from_config(config.contour, floor)
        if source == "remainders" and contour.sigma_max > dataset.remainder_radius:
            warnings.append(
                f"contour reaches Re rho = {contour.sigma_max:.6g} beyond the remainder samples "
                f"(|rho| <= {dataset.remainder_radius:.6g})"
            )
            logger.warning("[Boundary] %s", warnings[-1])

        results = _recover_edges(dataset, config, reference, source, delta_t, delta_kt, contour)
        refined = _recover_edges(dataset, config, reference, source, delta_t, delta_kt, contour.refined())
        for coarse, fine in zip(results, refined):
            coarse.quadrature_error = quadrature_error(coarse, fine)
            logger.info("[Boundary] edge %d: %d -> %d contour nodes changes q by %.3e",
                        coarse.k, contour.n_nodes, 2 * contour.n_nodes - 1, coarse.quadrature_error)
    except CycleGraphError as e:
        return _failure("boundary", e, started)

    elapsed = time.perf_counter() - started
    norms = ", ".join(f"|q_{r.k}|={r.q.l2_norm():.4g}" for r in results)
    return {
        "target_source": source,
        "target_delta": delta_t,
        "target_delta_k": delta_kt,
        "contour": contour,
        "boundary": results,
        "status": InversionStatus.BOUNDARY_DONE,
        "warnings": warnings,
        "messages": [{"stage": "boundary", "content": f"tau={contour.tau:.3g} targets from {source}; {norms}",
                      "elapsed": elapsed}],
    }


def transition_node(state: InversionState) -> Dict:
    """d and h of the loop from Delta, Delta_1 and the recovered pendant potentials."""
    started = time.perf_counter()
    dataset, config = state["dataset"], state["config"]
    geometry = dataset.geometry
    riesz = config.riesz
    try:
        geometry.require_loop_inversion()
        kernels = extract_loop_kernels(
            state["target_delta"],
            state["target_delta_k"][0],
            [r.q for r in state["boundary"]],
            geometry,
            n_nodes=nodes_for_length(1.0, config.grid.nodes_per_unit),
            alpha=riesz.alpha,
            n_modes=riesz.n_modes,
            collision_threshold=riesz.collision_threshold,
            max_retries=riesz.max_retries,
            substeps=config.grid.ode_substeps,
        )
        dirichlet = dirichlet_from_h(
            kernels,
            n_eigs=2 * config.loop.n_pairs,
            required=config.loop.n_pairs,
            max_iter=config.loop.newton_max_iter,
            h_zero_min=config.tolerances.h_zero_min,
        )
    except CycleGraphError as e:
        return _failure("transition", e, started)

    content = (f"alpha={kernels.alpha:.3g} min|E|={kernels.min_abs_E:.3e} "
               f"truncation={kernels.truncation_D:.2e}/{kernels.truncation_K:.2e} lambda_1={dirichlet.roots[0]:.8g}")
    return {
        "kernels": kernels,
        "dirichlet": dirichlet,
        "status": InversionStatus.TRANSITION_DONE,
        "messages": [{"stage": "transition", "content": content, "elapsed": time.perf_counter() - started}],
    }


def loop_node(state: InversionState) -> Dict:
    """Loop potential from d, the Dirichlet zeros and the stored signs."""
    started = time.perf_counter()
    dataset, config, kernels = state["dataset"], state["config"], state["kernels"]
    geometry = dataset.geometry
    tol = config.tolerances
    T0 = geometry.T[0]
    warnings = []

    # N pairs reconstruct, pairs up to 2N check the truncation
    N = config.loop.n_pairs
    available = state["dirichlet"].values.size
    if dataset.sigma.size < available:
        if dataset.sigma.size < N:
            warnings.append(f"only {dataset.sigma.size} signs stored; using {dataset.sigma.size} of {N} Dirichlet pairs")
        available = dataset.sigma.size
    N = min(N, available)
    try:
        qd = QuasiData(
            d_eval=kernels.d_scaled,
            lambda_n=state["dirichlet"].values[:available] * T0 ** 2,
            sigma=dataset.sigma[:available],
            a=geometry.a,
        )
        dd = quasi_to_dirichlet(qd, kernels.h_dot_scaled, tol.realizability, required=N)
        unit = nodes_for_length(1.0, config.grid.nodes_per_unit)
        loop = gl_dirichlet_reconstruct(dd, N, unit, tol.gl_condition_max, convergence_check=True)
        checked = replace(qd, lambda_n=qd.lambda_n[:N], sigma=qd.sigma[:N])
        sigma_report = verify_sigma_condition(checked, loop.q0, tol.sigma_zero, config.scan.step)
        q0 = unscale_loop_potential(loop.q0, T0, nodes_for_length(T0, config.grid.nodes_per_unit))
        recovered = PotentialSet(geometry, (q0, *(r.q for r in state["boundary"])))
    except CycleGraphError as e:
        return _failure("loop", e, started)

    warnings += loop.warnings
    if not sigma_report.ok:
        warnings.append(f"reconstructed loop reproduces sigma except at n = {sigma_report.mismatches[:10]}")
    return {
        "loop": loop,
        "sigma_report": sigma_report,
        "recovered": recovered,
        "status": InversionStatus.LOOP_DONE,
        "warnings": warnings,
        "messages": [{"stage": "loop", "content": f"pairs={loop.n_pairs} |q_0|={q0.l2_norm():.4g}",
                      "elapsed": time.perf_counter() - started}],
    }


def report_node(state: InversionState) -> Dict:
    """Collect diagnostics and, with known potentials, the per-edge errors."""
    started = time.perf_counter()
    dataset, recovered = state["dataset"], state["recovered"]
    contour, kernels, loop = state["contour"], state["kernels"], state["loop"]

    # stored remainders against the product over the stored zeros
    rebuilt_main, rebuilt_k = state["reference"].rebuild(dataset)
    consistency, stored = rebuild_consistency(dataset, rebuilt_main, rebuilt_k)
    report = InversionReport(
        recovered=recovered,
        reference_kind="zero" if state["reference"].is_zero else "dataset",
        target_source=state.get("target_source") or "eigenvalues",
        boundary=[
            {
                "k": r.k,
                "mean": r.recovered.mean,
                "weyl_l2": r.weyl.l2_norm(),
                "F_max": r.F_max,
                "K_max": r.K_max,
                "diagonal_defect": r.recovered.diagonal_defect,
                "quadrature_error": r.quadrature_error,
            }
            for r in state["boundary"]
        ],
        contour={"tau": contour.tau, "sigma_max": contour.sigma_max, "n_nodes": contour.n_nodes},
        transition={"alpha": kernels.alpha, "n_modes": kernels.n_modes, "min_abs_E": kernels.min_abs_E,
                    "h_zero": kernels.h_zero(), "truncation_D": kernels.truncation_D,
                    "truncation_K": kernels.truncation_K},
        loop={"n_pairs": loop.n_pairs, "mean": loop.mean, "refinement_difference": loop.refinement_difference,
              "refinement_pairs": loop.refinement_pairs},
        sigma_mismatches=list(state["sigma_report"].mismatches),
        consistency=consistency,
        stored_norms=stored,
        warnings=list(state.get("warnings", [])),
    )
    if state.get("truth") is not None:
        report.errors_abs, report.errors_rel = edge_errors(recovered, state["truth"])
        logger.info("[Report] relative errors per edge: %s", np.round(report.errors_rel, 6).tolist())

    return {
        "report": report,
        "status": InversionStatus.COMPLETED,
        "messages": [{"stage": "report", "content": "done", "elapsed": time.perf_counter() - started}],
    }


# === Routing Functions ===

def route_after_boundary(state: InversionState) -> Literal["transition_node", "end"]:
    return "end" if state.get("status") == InversionStatus.FAILED else "transition_node"


def route_after_transition(state: InversionState) -> Literal["loop_node", "end"]:
    return "end" if state.get("status") == InversionStatus.FAILED else "loop_node"


def route_after_loop(state: InversionState) -> Literal["report_node", "end"]:
    return "end" if state.get("status") == InversionStatus.FAILED else "report_node"
