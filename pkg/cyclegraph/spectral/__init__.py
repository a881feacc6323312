"""Characteristic functions, spectra and remainder metrics."""

from .charfn import (
    CharFnSet,
    CharFnValues,
    PendantProducts,
    SignReport,
    boundary_products,
    eval_delta0,
    eval_delta0_k,
    pendant_products,
    signs_sigma,
    spectral_lower_bound,
)
from .hadamard import RebuiltCharFn, rebuild_charfn_from_zeros
from .remainders import (
    RemainderCharFn,
    delta_metric,
    pw_remainder,
    remainder_charfns,
    remainder_grid,
    remainder_norms,
    remainder_samples,
    remainders_from_evaluators,
)
from .zeros import EigenvalueList, find_real_zeros, scan_grid

__all__ = [
    "CharFnSet",
    "CharFnValues",
    "EigenvalueList",
    "PendantProducts",
    "RebuiltCharFn",
    "RemainderCharFn",
    "SignReport",
    "boundary_products",
    "delta_metric",
    "eval_delta0",
    "eval_delta0_k",
    "find_real_zeros",
    "pendant_products",
    "pw_remainder",
    "rebuild_charfn_from_zeros",
    "remainder_charfns",
    "remainder_grid",
    "remainder_norms",
    "remainder_samples",
    "remainders_from_evaluators",
    "scan_grid",
    "signs_sigma",
    "spectral_lower_bound",
]
