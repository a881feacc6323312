"""
The known problem an inversion is measured against.

A cold start uses zero potentials, whose characteristic functions have
closed forms. In the local regime the reference is a nearby problem with
known potentials and spectra, which keeps the contour kernels small.
"""

import logging
from dataclasses import dataclass
from functools import partial
from typing import Tuple

import numpy as np

from cyclegraph.config import RunConfig
from cyclegraph.model import GraphGeometry, PotentialSet, SpectralDataset
from cyclegraph.spectral import (
    CharFnSet,
    RebuiltCharFn,
    eval_delta0,
    eval_delta0_k,
    find_real_zeros,
    rebuild_charfn_from_zeros,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ReferenceProblem:
    potentials: PotentialSet
    lambda_main: np.ndarray
    lambda_k: Tuple[np.ndarray, ...]
    substeps: int = 1

    @property
    def geometry(self) -> GraphGeometry:
        return self.potentials.geometry

    @property
    def is_zero(self) -> bool:
        return all(q.is_zero for q in self.potentials.q)

    def evaluate(self, lam) -> Tuple[np.ndarray, Tuple[np.ndarray, ...]]:
        """Delta and every Delta_k at lam."""
        lam = np.asarray(lam, dtype=complex)
        if self.is_zero:
            g = self.geometry
            return eval_delta0(g, lam), tuple(eval_delta0_k(g, k, lam) for k in range(1, g.m + 1))
        values = CharFnSet(self.potentials, self.substeps).evaluate(lam)
        return values.delta, values.delta_k

    def delta(self, lam) -> np.ndarray:
        if self.is_zero:
            return eval_delta0(self.geometry, lam)
        return CharFnSet(self.potentials, self.substeps).eval_delta(lam)

    def delta_k(self, k: int, lam) -> np.ndarray:
        if self.is_zero:
            return eval_delta0_k(self.geometry, k, lam)
        return CharFnSet(self.potentials, self.substeps).eval_delta_k(k, lam)

    def rebuild(self, dataset: SpectralDataset) -> Tuple[RebuiltCharFn, Tuple[RebuiltCharFn, ...]]:
        """Delta and Delta_k of the dataset, rebuilt from its zeros against this reference."""
        main = rebuild_charfn_from_zeros(dataset.lambda_main, self.delta, self.lambda_main)
        per_edge = tuple(
            rebuild_charfn_from_zeros(dataset.lambda_k[k - 1], partial(self.delta_k, k), self.lambda_k[k - 1])
            for k in range(1, self.geometry.m + 1)
        )
        return main, per_edge


def zero_reference(geometry: GraphGeometry, config: RunConfig) -> ReferenceProblem:
    """Zero potentials on the configured grids with their spectra up to spectrum_rho_max."""
    a = abs(geometry.a)
    window = (-((a + 1.0 / a + 2.0) ** 2), config.scan.spectrum_rho_max ** 2)
    step, tol = config.scan.step, config.scan.refinement_tol
    main = find_real_zeros(lambda lam: eval_delta0(geometry, lam), window, step, tol)
    per_edge = tuple(
        find_real_zeros(partial(eval_delta0_k, geometry, k), window, step, tol).values
        for k in range(1, geometry.m + 1)
    )
    logger.info("[Reference] zero potentials: %d + %s zeros", len(main), [v.size for v in per_edge])
    return ReferenceProblem(
        potentials=PotentialSet.zeros(geometry, config.grid.nodes_per_unit),
        lambda_main=main.values,
        lambda_k=per_edge,
        substeps=config.grid.ode_substeps,
    )


def dataset_reference(potentials: PotentialSet, dataset: SpectralDataset, substeps: int = 1) -> ReferenceProblem:
    """Known potentials together with their own dataset."""
    return ReferenceProblem(potentials, dataset.lambda_main, dataset.lambda_k, substeps)


__all__ = ["ReferenceProblem", "dataset_reference", "zero_reference"]
