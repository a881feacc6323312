"""
Forward problem: potentials in, spectral dataset out.
"""

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
from pydantic import ValidationError

from cyclegraph.config import GeometryConfig, RunConfig
from cyclegraph.errors import GeometryError
from cyclegraph.model import GraphGeometry, GridFunction, PotentialSet, SpectralDataset, nodes_for_length
from cyclegraph.model.geometry import project_mean_zero
from cyclegraph.model.io import save_dataset, save_potentials
from cyclegraph.spectral import (
    CharFnSet,
    EigenvalueList,
    eval_delta0,
    eval_delta0_k,
    find_real_zeros,
    remainder_grid,
    remainder_samples,
    scan_grid,
    signs_sigma,
    spectral_lower_bound,
)

logger = logging.getLogger(__name__)

RANDOM_MODES = 6


def geometry_from_config(config: GeometryConfig) -> GraphGeometry:
    try:
        return GraphGeometry(m=config.m, T=tuple(config.T), a=config.a)
    except ValidationError as e:
        raise GeometryError(e.errors()[0]["msg"]) from e


def _fourier_edge(length: float, n_nodes: int, terms) -> GridFunction:
    x = np.linspace(0.0, length, n_nodes)
    values = np.zeros(n_nodes)
    for term in terms:
        w = 2.0 * np.pi * term.k / length
        values += term.cos * np.cos(w * x) + term.sin * np.sin(w * x)
    return project_mean_zero(GridFunction(length, values))


def random_potentials(geometry: GraphGeometry, nodes_per_unit: int, amplitude: float,
                      rng: np.random.Generator) -> PotentialSet:
    """
    Smooth random potentials: six Fourier modes per edge with coefficients
    uniform in [-1, 1] damped by 1/k^2, scaled to L2 norm `amplitude`.
    """
    edges = []
    k = np.arange(1, RANDOM_MODES + 1)
    for length in geometry.T:
        n_nodes = nodes_for_length(length, nodes_per_unit)
        x = np.linspace(0.0, length, n_nodes)
        a_k = rng.uniform(-1.0, 1.0, RANDOM_MODES) / k ** 2
        b_k = rng.uniform(-1.0, 1.0, RANDOM_MODES) / k ** 2
        arg = 2.0 * np.pi * np.outer(x, k) / length
        fn = project_mean_zero(GridFunction(length, np.cos(arg) @ a_k + np.sin(arg) @ b_k))
        norm = fn.l2_norm()
        edges.append(fn.scaled(amplitude / norm) if norm > 0 else fn)
    return PotentialSet(geometry, tuple(edges))


def build_potentials(config: RunConfig, seed: Optional[int] = None) -> PotentialSet:
    """Potentials described by config.potentials on the configured grids."""
    geometry = geometry_from_config(config.geometry)
    npu = config.grid.nodes_per_unit
    spec = config.potentials
    if spec.kind == "zero":
        return PotentialSet.zeros(geometry, npu)
    if spec.kind == "random":
        rng = np.random.default_rng(config.seed if seed is None else seed)
        return random_potentials(geometry, npu, spec.amplitude, rng)

    by_edge = {entry.edge: entry.terms for entry in spec.edges}
    return PotentialSet(geometry, tuple(
        _fourier_edge(t, nodes_for_length(t, npu), by_edge.get(j, [])) for j, t in enumerate(geometry.T)
    ))


@dataclass
class ForwardResult:
    potentials: PotentialSet
    dataset: SpectralDataset
    dirichlet: EigenvalueList
    warnings: List[str] = field(default_factory=list)
    elapsed: float = 0.0


def search_window(potentials: PotentialSet, config: RunConfig) -> Tuple[float, float]:
    return spectral_lower_bound(potentials), config.scan.spectrum_rho_max ** 2


def compute_dataset(potentials: PotentialSet, config: RunConfig) -> ForwardResult:
    """
    Spectra of Delta and every Delta_k, the signs sigma_n and the remainder
    samples, all from one batch evaluation on the scan grid.
    """
    start = time.perf_counter()
    geometry = potentials.geometry
    cf = CharFnSet(potentials, substeps=config.grid.ode_substeps)
    window = search_window(potentials, config)
    step, tol = config.scan.step, config.scan.refinement_tol
    slack = geometry.m + 2

    grid = scan_grid(window, step)
    sampled = cf.evaluate(grid.astype(complex))
    logger.info("[Forward] scanned %d points on [%.4g, %.4g]", grid.size, *window)

    expected = len(find_real_zeros(lambda lam: eval_delta0(geometry, lam), window, step, tol))
    main = find_real_zeros(cf.eval_delta, window, step, tol, expected, slack, scan_values=sampled.delta)
    warnings = list(main.warnings)

    per_edge = []
    for k in range(1, geometry.m + 1):
        expected_k = len(find_real_zeros(lambda lam: eval_delta0_k(geometry, k, lam), window, step, tol))
        zeros_k = find_real_zeros(
            lambda lam: cf.eval_delta_k(k, lam), window, step, tol, expected_k, slack,
            scan_values=sampled.delta_k[k - 1],
        )
        warnings += zeros_k.warnings
        per_edge.append(zeros_k.values)

    dirichlet = find_real_zeros(cf.eval_h, window, step, tol, scan_values=sampled.h)
    signs = signs_sigma(cf, dirichlet, config.tolerances.sigma_zero, config.tolerances.cross_check)

    rho = remainder_grid(config.scan.remainder_radius, config.scan.remainder_points)
    kappa_main, kappa_k = remainder_samples(cf, rho)

    dataset = SpectralDataset(
        geometry=geometry,
        lambda_main=main.values,
        lambda_k=tuple(per_edge),
        sigma=signs.sigma,
        remainder_grid=rho,
        kappa_main=kappa_main,
        kappa_k=kappa_k,
    )
    elapsed = time.perf_counter() - start
    logger.info(
        "[Forward] %d + %s eigenvalues, %d signs in %.1fs",
        dataset.lambda_main.size, [v.size for v in dataset.lambda_k], dataset.sigma.size, elapsed,
    )
    return ForwardResult(potentials, dataset, dirichlet, warnings, elapsed)


def cmd_forward(config: RunConfig, potentials: PotentialSet, out_dir: Union[str, Path]) -> Path:
    """Write dataset.txt and the potentials it came from into out_dir."""
    out_dir = Path(out_dir)
    result = compute_dataset(potentials, config)
    save_potentials(potentials, out_dir / "potentials.txt")
    return save_dataset(result.dataset, out_dir / "dataset.txt")


__all__ = [
    "ForwardResult",
    "build_potentials",
    "cmd_forward",
    "compute_dataset",
    "geometry_from_config",
    "random_potentials",
    "search_window",
]
