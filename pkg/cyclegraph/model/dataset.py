"""
SpectralDataset: the data an inversion consumes.
"""

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from cyclegraph.errors import DatasetValidationError
from cyclegraph.model.geometry import GraphGeometry


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SpectralDataset:
    """
    Truncated spectra, sign data and sampled Paley-Wiener remainders.

    lambda_main holds the zeros of Delta, lambda_k[k-1] those of Delta_k;
    double zeros appear twice. kappa_main and kappa_k are sampled on
    remainder_grid, a uniform rho-grid symmetric about zero.
    """

    geometry: GraphGeometry
    lambda_main: np.ndarray
    lambda_k: Tuple[np.ndarray, ...]
    sigma: np.ndarray
    remainder_grid: np.ndarray
    kappa_main: np.ndarray
    kappa_k: Tuple[np.ndarray, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "lambda_main", _frozen(self.lambda_main))
        object.__setattr__(self, "lambda_k", tuple(_frozen(v) for v in self.lambda_k))
        object.__setattr__(self, "sigma", _frozen(self.sigma, dtype=np.int64))
        object.__setattr__(self, "remainder_grid", _frozen(self.remainder_grid))
        object.__setattr__(self, "kappa_main", _frozen(self.kappa_main))
        object.__setattr__(self, "kappa_k", tuple(_frozen(v) for v in self.kappa_k))
        self.validate()

    def validate(self) -> None:
        m = self.geometry.m
        if len(self.lambda_k) != m:
            raise DatasetValidationError("lambda_k", 0, f"expected {m} spectra, got {len(self.lambda_k)}")
        if len(self.kappa_k) != m:
            raise DatasetValidationError("kappa_k", 0, f"expected {m} remainder samples, got {len(self.kappa_k)}")
        for name, values in [("lambda_main", self.lambda_main)] + [
            (f"lambda_k.{k + 1}", v) for k, v in enumerate(self.lambda_k)
        ]:
            if not np.all(np.isfinite(values)):
                bad = int(np.flatnonzero(~np.isfinite(values))[0])
                raise DatasetValidationError(name, 0, f"eigenvalue {bad + 1} is not finite")
            if np.any(np.diff(values) < 0):
                raise DatasetValidationError(name, 0, "eigenvalues not sorted ascending")
        if np.any(np.abs(self.sigma) > 1):
            raise DatasetValidationError("sigma", 0, "sigma out of range")
        n = self.remainder_grid.size
        if self.kappa_main.size != n or any(v.size != n for v in self.kappa_k):
            raise DatasetValidationError("kappa_main", 0, "remainder samples do not match the grid")
        if not (np.all(np.isfinite(self.remainder_grid)) and np.all(np.isfinite(self.kappa_main))
                and all(np.all(np.isfinite(v)) for v in self.kappa_k)):
            raise DatasetValidationError("kappa_main", 0, "remainder samples are not finite")

    @property
    def has_remainders(self) -> bool:
        return self.remainder_grid.size > 0

    @property
    def remainder_radius(self) -> float:
        return float(self.remainder_grid[-1]) if self.remainder_grid.size else 0.0

    def spectrum(self, k: int) -> np.ndarray:
        """k = 0 for Delta, k >= 1 for Delta_k."""
        return self.lambda_main if k == 0 else self.lambda_k[k - 1]

    def remainder(self, k: int) -> np.ndarray:
        return self.kappa_main if k == 0 else self.kappa_k[k - 1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SpectralDataset):
            return NotImplemented
        pairs = [
            (self.lambda_main, other.lambda_main),
            (self.sigma, other.sigma),
            (self.remainder_grid, other.remainder_grid),
            (self.kappa_main, other.kappa_main),
        ]
        if len(self.lambda_k) != len(other.lambda_k) or len(self.kappa_k) != len(other.kappa_k):
            return False
        pairs += list(zip(self.lambda_k, other.lambda_k)) + list(zip(self.kappa_k, other.kappa_k))
        return self.geometry == other.geometry and all(np.array_equal(a, b) for a, b in pairs)

    __hash__ = None
