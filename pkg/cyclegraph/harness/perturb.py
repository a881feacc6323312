"""
Perturbations for stability experiments.

The default mode moves the potentials and recomputes the data, so the
perturbed data are always realizable. The experimental mode jitters the
stored eigenvalues directly and rebuilds the remainders from the moved
zeros; nothing guarantees such data belong to any potential.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from cyclegraph.config import RunConfig
from cyclegraph.errors import SignFlipError
from cyclegraph.harness.forward import compute_dataset
from cyclegraph.model import GridFunction, PotentialSet, SpectralDataset
from cyclegraph.model.geometry import project_mean_zero
from cyclegraph.spectral import CharFnSet, rebuild_charfn_from_zeros, remainders_from_evaluators

logger = logging.getLogger(__name__)

BUMP_WIDTH = 0.15


def bump(length: float, n_nodes: int, j: int, m: int) -> GridFunction:
    """w_j(x) = exp(-((x - c_j) / (0.15 T_j))^2), c_j = T_j (0.3 + 0.4 j / (m + 1)), mean-zero."""
    x = np.linspace(0.0, length, n_nodes)
    center = length * (0.3 + 0.4 * j / (m + 1))
    values = np.exp(-(((x - center) / (BUMP_WIDTH * length)) ** 2))
    return project_mean_zero(GridFunction(length, values))


def perturb_potentials(potentials: PotentialSet, epsilon: float) -> PotentialSet:
    """q_j + epsilon w_j on every edge; epsilon = 0 returns the input itself."""
    if epsilon == 0:
        return potentials
    m = potentials.geometry.m
    moved = tuple(
        project_mean_zero(GridFunction(q.length, q.values + epsilon * bump(q.length, q.n_nodes, j, m).values))
        for j, q in enumerate(potentials.q)
    )
    return PotentialSet(potentials.geometry, moved)


def check_signs(base: SpectralDataset, moved: SpectralDataset, epsilon: float) -> None:
    n = min(base.sigma.size, moved.sigma.size)
    flipped = np.flatnonzero(base.sigma[:n] != moved.sigma[:n]) + 1
    if flipped.size:
        raise SignFlipError(epsilon, flipped.tolist())


def jitter_dataset(dataset: SpectralDataset, base: PotentialSet, epsilon: float, seed: int,
                   substeps: int = 1) -> SpectralDataset:
    """
    lambda_n + epsilon xi_n (1 + |lambda_n|)^(1/2) / n with seeded xi_n in [-1, 1]
    on every spectrum; remainders follow from the rebuilt characteristic functions.
    """
    if epsilon == 0:
        return dataset
    rng = np.random.default_rng(seed)
    geometry = dataset.geometry

    def jitter(values: np.ndarray) -> np.ndarray:
        n = np.arange(1, values.size + 1)
        xi = rng.uniform(-1.0, 1.0, values.size)
        return np.sort(values + epsilon * xi * np.sqrt(1.0 + np.abs(values)) / n)

    main = jitter(dataset.lambda_main)
    per_edge = tuple(jitter(v) for v in dataset.lambda_k)

    cf = CharFnSet(base, substeps=substeps)
    rebuilt = rebuild_charfn_from_zeros(main, cf.eval_delta, dataset.lambda_main)
    rebuilt_k = [
        rebuild_charfn_from_zeros(per_edge[k - 1], lambda lam, k=k: cf.eval_delta_k(k, lam), dataset.lambda_k[k - 1])
        for k in range(1, geometry.m + 1)
    ]
    kappa_main, kappa_k = remainders_from_evaluators(
        geometry, dataset.remainder_grid, rebuilt, lambda k, lam: rebuilt_k[k - 1](lam),
    )
    logger.warning("[Perturb] experimental spectral jitter eps=%g: no realizability guarantee", epsilon)
    return SpectralDataset(
        geometry=geometry,
        lambda_main=main,
        lambda_k=per_edge,
        sigma=dataset.sigma,
        remainder_grid=dataset.remainder_grid,
        kappa_main=kappa_main,
        kappa_k=kappa_k,
    )


def cmd_perturb(config: RunConfig, potentials: PotentialSet, epsilon: float, experimental: bool = False,
                base: Optional[SpectralDataset] = None) -> Tuple[PotentialSet, SpectralDataset]:
    """
    Perturbed potentials and their dataset.

    Args:
        base: Dataset of `potentials`, computed when not given

    Raises:
        SignFlipError: The perturbation changed some sigma_n
    """
    if base is None:
        base = compute_dataset(potentials, config).dataset
    if experimental:
        return potentials, jitter_dataset(base, potentials, epsilon, config.seed, config.grid.ode_substeps)

    moved = perturb_potentials(potentials, epsilon)
    if moved is potentials:
        return potentials, base
    dataset = compute_dataset(moved, config).dataset
    check_signs(base, dataset, epsilon)
    logger.info("[Perturb] eps=%g: |q_tilde - q| per edge %s", epsilon,
                [round((b - a).l2_norm(), 8) for a, b in zip(potentials.q, moved.q)])
    return moved, dataset


__all__ = [
    "bump",
    "check_signs",
    "cmd_perturb",
    "jitter_dataset",
    "perturb_potentials",
]
