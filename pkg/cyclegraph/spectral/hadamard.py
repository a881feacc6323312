"""
Characteristic functions rebuilt from their zeros.

An entire function of the Delta class is fixed by its zeros up to the
asymptotics it shares with the zero-potential function, so

    Delta(lambda) ~ Delta0(lambda) * prod_{n<=N} (lambda_n - lambda) / (lambda0_n - lambda)

with the zeros beyond N taken equal to the zero-potential ones.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from cyclegraph.spectral.zeros import EigenvalueList

logger = logging.getLogger(__name__)

_COLLISION = 1e-9
_SHIFT = 1e-6


@dataclass(frozen=True)
class RebuiltCharFn:
    """Callable lambda -> Delta(lambda) built from N paired zeros."""

    zeros: np.ndarray
    reference_zeros: np.ndarray
    reference: Callable[[np.ndarray], np.ndarray]

    @property
    def n_pairs(self) -> int:
        return int(self.zeros.size)

    def ratio(self, lam: np.ndarray) -> np.ndarray:
        """prod_n (lambda_n - lambda) / (lambda0_n - lambda) for a flat lambda array."""
        if self.zeros.size == 0:
            return np.ones_like(lam)
        num = self.zeros[None, :] - lam[:, None]
        den = self.reference_zeros[None, :] - lam[:, None]
        return np.prod(num / den, axis=1)

    def __call__(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=complex)
        shape = lam.shape
        flat = lam.reshape(-1)
        out = np.empty(flat.size, dtype=complex)

        if self.reference_zeros.size:
            gap = np.min(np.abs(self.reference_zeros[None, :] - flat[:, None]), axis=1)
        else:
            gap = np.full(flat.size, np.inf)
        hit = gap <= _COLLISION * (1.0 + np.abs(flat))
        ok = ~hit
        out[ok] = self.reference(flat[ok]) * self.ratio(flat[ok])
        if hit.any():
            # reference zeros are simple, so the ratio extends analytically; average across the pole
            eta = _SHIFT * (1.0 + np.abs(flat[hit]))
            up, down = flat[hit] + eta, flat[hit] - eta
            out[hit] = 0.5 * (self.reference(up) * self.ratio(up) + self.reference(down) * self.ratio(down))
        return out.reshape(shape)

    def tail_bound(self, lam) -> np.ndarray:
        """
        First-order size of the omitted factors.

        Assumes the zeros beyond N keep shifting by at most the largest
        |lambda_n - lambda0_n| over the upper half of the retained pairs,
        with quadratically growing reference zeros.
        """
        lam = np.abs(np.asarray(lam, dtype=complex))
        if self.zeros.size == 0:
            return np.zeros_like(lam, dtype=float)
        upper = self.n_pairs // 2
        shift = float(np.max(np.abs(self.zeros[upper:] - self.reference_zeros[upper:])))
        top = abs(self.reference_zeros[-1])
        return shift * self.n_pairs / np.maximum(top - lam, 1.0)


def _values(zeros: Union[EigenvalueList, np.ndarray]) -> np.ndarray:
    if isinstance(zeros, EigenvalueList):
        return zeros.values
    return np.sort(np.asarray(zeros, dtype=float).reshape(-1))


def rebuild_charfn_from_zeros(zeros: Union[EigenvalueList, np.ndarray],
                              reference: Callable[[np.ndarray], np.ndarray],
                              reference_zeros: Union[EigenvalueList, np.ndarray]) -> RebuiltCharFn:
    """
    Pair measured and reference zeros by sorted order and build the ratio product.

    Args:
        zeros: Zeros of the target function, counted with multiplicity
        reference: Zero-potential evaluator with the same asymptotics
        reference_zeros: Its zeros over the same window

    Returns:
        RebuiltCharFn
    """
    target = _values(zeros)
    ref = _values(reference_zeros)
    n = min(target.size, ref.size)
    if target.size != ref.size:
        logger.warning(
            "[Hadamard] %d zeros vs %d reference zeros; pairing the lowest %d",
            target.size, ref.size, n,
        )
    return RebuiltCharFn(zeros=target[:n].copy(), reference_zeros=ref[:n].copy(), reference=reference)


__all__ = ["RebuiltCharFn", "rebuild_charfn_from_zeros"]
