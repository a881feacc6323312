"""
Paley-Wiener remainders and the spectral-data distance.

kappa(rho)   = rho^(m+1) (Delta - Delta0)(rho^2)
kappa_k(rho) = rho^m (Delta_k - Delta0_k)(rho^2)

Both depend on rho only through rho^2 up to the power in front, so the
characteristic functions are evaluated once per |rho| and mirrored.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.integrate import trapezoid

from cyclegraph.errors import DatasetError
from cyclegraph.model.dataset import SpectralDataset
from cyclegraph.model.geometry import GraphGeometry
from cyclegraph.spectral.charfn import CharFnSet, eval_delta0, eval_delta0_k

logger = logging.getLogger(__name__)


def remainder_grid(radius: float, points: int) -> np.ndarray:
    """Uniform rho grid on [-radius, radius]; odd point counts include rho = 0."""
    return np.linspace(-radius, radius, points)


def _fold(rho_grid: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    rho_grid = np.asarray(rho_grid, dtype=float)
    magnitude, inverse = np.unique(np.abs(rho_grid), return_inverse=True)
    return magnitude, inverse


def remainders_from_evaluators(geometry: GraphGeometry, rho_grid: np.ndarray,
                               delta: Callable, delta_k: Callable[[int, np.ndarray], np.ndarray]
                               ) -> Tuple[np.ndarray, Tuple[np.ndarray, ...]]:
    """
    Remainders of arbitrary Delta / Delta_k evaluators (direct or rebuilt).

    Args:
        delta: lambda -> Delta(lambda)
        delta_k: (k, lambda) -> Delta_k(lambda)

    Returns:
        kappa_main and the tuple kappa_k on rho_grid
    """
    rho_grid = np.asarray(rho_grid, dtype=float)
    magnitude, inverse = _fold(rho_grid)
    lam = (magnitude ** 2).astype(complex)
    m = geometry.m

    main = (delta(lam) - eval_delta0(geometry, lam)).real[inverse] * rho_grid ** (m + 1)
    per_edge = tuple(
        (delta_k(k, lam) - eval_delta0_k(geometry, k, lam)).real[inverse] * rho_grid ** m
        for k in range(1, m + 1)
    )
    return main, per_edge


def remainder_samples(cf: CharFnSet, rho_grid: np.ndarray) -> Tuple[np.ndarray, Tuple[np.ndarray, ...]]:
    """All remainders from one batch evaluation of the characteristic functions."""
    rho_grid = np.asarray(rho_grid, dtype=float)
    magnitude, inverse = _fold(rho_grid)
    values = cf.evaluate((magnitude ** 2).astype(complex))
    geometry = cf.geometry
    m = geometry.m
    lam = values.lam
    main = (values.delta - eval_delta0(geometry, lam)).real[inverse] * rho_grid ** (m + 1)
    per_edge = tuple(
        (dk - eval_delta0_k(geometry, k, lam)).real[inverse] * rho_grid ** m
        for k, dk in enumerate(values.delta_k, start=1)
    )
    return main, per_edge


def pw_remainder(cf: CharFnSet, k: int, rho_grid: np.ndarray) -> np.ndarray:
    """
    Remainder of Delta (k = 0) or Delta_k (k >= 1) sampled on rho_grid.

    The rho = 0 sample is the limit value 0, which the product form gives
    directly since the characteristic functions are finite there.
    """
    rho_grid = np.asarray(rho_grid, dtype=float)
    magnitude, inverse = _fold(rho_grid)
    lam = (magnitude ** 2).astype(complex)
    geometry = cf.geometry
    if k == 0:
        diff = cf.eval_delta(lam) - eval_delta0(geometry, lam)
        power = geometry.m + 1
    else:
        diff = cf.eval_delta_k(k, lam) - eval_delta0_k(geometry, k, lam)
        power = geometry.m
    return diff.real[inverse] * rho_grid ** power


_BLOCK = 256
_RHO_MIN = 1e-8


@dataclass(frozen=True, eq=False)
class RemainderCharFn:
    """
    Delta (k = 0) or Delta_k continued off the real axis from its sampled remainder.

    kappa has exponential type A = T_0 + ... + T_m and is square integrable
    on the real line, so it equals its convolution with the reproducing kernel
    sin(A x)/(pi x). The integral is taken by the trapezoid rule over the
    samples, which is exact for grid spacing below pi/A up to the cut at
    |rho| = radius. Then Delta = Delta0 + kappa(rho)/rho^p with p = m + 1 for
    the main function and p = m for Delta_k.
    """

    geometry: GraphGeometry
    k: int
    rho_grid: np.ndarray
    kappa: np.ndarray

    def __post_init__(self):
        if self.rho_grid.size < 2:
            raise DatasetError("remainder continuation needs at least two samples")
        spacing = float(self.rho_grid[1] - self.rho_grid[0])
        if spacing * self.width >= np.pi:
            logger.warning(
                "[Remainders] grid spacing %.3g is not below pi/A = %.3g; continuation is aliased",
                spacing, np.pi / self.width,
            )

    @property
    def width(self) -> float:
        return float(sum(self.geometry.T))

    @property
    def power(self) -> int:
        return self.geometry.m + 1 if self.k == 0 else self.geometry.m

    def kappa_at(self, rho) -> np.ndarray:
        """kappa at complex rho from the samples."""
        rho = np.asarray(rho, dtype=complex).reshape(-1)
        grid = np.asarray(self.rho_grid, dtype=float)
        h = grid[1] - grid[0]
        w = np.full(grid.size, h)
        w[0] = w[-1] = 0.5 * h
        weighted = w * self.kappa * self.width / np.pi
        out = np.empty(rho.size, dtype=complex)
        for start in range(0, rho.size, _BLOCK):
            block = rho[start:start + _BLOCK]
            out[start:start + _BLOCK] = np.sinc(self.width * (block[:, None] - grid[None, :]) / np.pi) @ weighted
        return out

    def __call__(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=complex)
        shape = lam.shape
        flat = lam.reshape(-1)
        rho = np.sqrt(flat)
        rho = np.where(np.abs(rho) < _RHO_MIN, _RHO_MIN, rho)
        if self.k == 0:
            base = eval_delta0(self.geometry, flat)
        else:
            base = eval_delta0_k(self.geometry, self.k, flat)
        return (base + self.kappa_at(rho) / rho ** self.power).reshape(shape)


def remainder_charfns(dataset: SpectralDataset) -> Tuple[RemainderCharFn, Tuple[RemainderCharFn, ...]]:
    """Delta and every Delta_k of a dataset, continued from its stored remainders."""
    geometry = dataset.geometry
    grid = dataset.remainder_grid
    main = RemainderCharFn(geometry, 0, grid, dataset.kappa_main)
    per_edge = tuple(RemainderCharFn(geometry, k, grid, dataset.kappa_k[k - 1]) for k in range(1, geometry.m + 1))
    return main, per_edge


def _l2(values: np.ndarray, grid: np.ndarray) -> float:
    return float(np.sqrt(trapezoid(np.abs(values) ** 2, grid)))


def remainder_norms(dataset: SpectralDataset, other: Optional[SpectralDataset] = None) -> np.ndarray:
    """L2 norms of each remainder (or of the difference to other), main first."""
    grid = dataset.remainder_grid
    out = []
    for k in range(dataset.geometry.m + 1):
        values = dataset.remainder(k)
        if other is not None:
            values = values - other.remainder(k)
        out.append(_l2(values, grid))
    return np.asarray(out)


def delta_metric(d1: SpectralDataset, d2: SpectralDataset) -> float:
    """
    Distance between two spectral datasets: the sum of L2 norms of the
    remainder differences, main function first, over the shared grid.

    Raises:
        DatasetError: Different geometry or remainder grid
    """
    if d1.geometry != d2.geometry:
        raise DatasetError("datasets describe different geometries")
    if not (d1.has_remainders and d2.has_remainders):
        raise DatasetError("delta metric needs remainder samples in both datasets")
    if not np.array_equal(d1.remainder_grid, d2.remainder_grid):
        raise DatasetError(
            f"remainder grid mismatch: {d1.remainder_grid.size} points on |rho| <= {d1.remainder_radius:g} "
            f"vs {d2.remainder_grid.size} on |rho| <= {d2.remainder_radius:g}"
        )
    return float(remainder_norms(d1, d2).sum())


__all__ = [
    "RemainderCharFn",
    "delta_metric",
    "pw_remainder",
    "remainder_charfns",
    "remainder_grid",
    "remainder_norms",
    "remainder_samples",
    "remainders_from_evaluators",
]
