"""
Real zeros of real-on-the-axis entire functions.

The scan runs in s = sign(lambda) sqrt|lambda| where zeros of characteristic
functions are roughly equally spaced. Sign changes are refined together by
the Illinois variant of regula falsi. A sampled local minimum of |f| without
a sign change is probed by golden-section search of sign*f: a negative
minimum means two close simple zeros, a vanishing one a double zero.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

logger = logging.getLogger(__name__)

_GOLDEN = 0.5 * (np.sqrt(5.0) - 1.0)
_MAX_ILLINOIS = 200
_MAX_GOLDEN = 120
_DOUBLE_ZERO_TOL = 1e-6

RealFunction = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class EigenvalueList:
    """
    Zeros found in a window.

    roots are distinct, multiplicity holds 1 or 2 per root; values repeats
    double zeros so that it counts with multiplicity.
    """

    roots: np.ndarray
    multiplicity: np.ndarray
    search_window: Tuple[float, float]
    refinement_tol: float
    warnings: List[str] = field(default_factory=list)

    @property
    def values(self) -> np.ndarray:
        return np.repeat(self.roots, self.multiplicity)

    def __len__(self) -> int:
        return int(self.multiplicity.sum())

    def first(self, n: int) -> np.ndarray:
        return self.values[:n]


def signed_sqrt(lam: float) -> float:
    return float(np.sign(lam) * np.sqrt(abs(lam)))


def scan_grid(window: Tuple[float, float], step: float) -> np.ndarray:
    """lambda nodes equally spaced in s = sign(lambda) sqrt|lambda|."""
    lo, hi = window
    if not hi > lo:
        raise ValueError(f"empty search window {window}")
    s_lo, s_hi = signed_sqrt(lo), signed_sqrt(hi)
    n = max(3, int(np.ceil((s_hi - s_lo) / step)) + 1)
    s = np.linspace(s_lo, s_hi, n)
    return s * np.abs(s)


def _real(values) -> np.ndarray:
    return np.real(np.asarray(values))


def _illinois(f: RealFunction, a: np.ndarray, b: np.ndarray, fa: np.ndarray, fb: np.ndarray,
              tol: float) -> np.ndarray:
    """Refine every bracket [a_i, b_i] with fa_i * fb_i < 0 at once."""
    a, b, fa, fb = a.copy(), b.copy(), fa.copy(), fb.copy()
    best = np.where(np.abs(fa) < np.abs(fb), a, b)
    active = np.ones(a.size, dtype=bool)
    for _ in range(_MAX_ILLINOIS):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        ai, bi, fai, fbi = a[idx], b[idx], fa[idx], fb[idx]
        denom = fbi - fai
        with np.errstate(invalid="ignore", divide="ignore"):
            c = np.where(denom != 0, (ai * fbi - bi * fai) / denom, 0.5 * (ai + bi))
        # keep the secant point strictly inside the bracket
        lo, hi = np.minimum(ai, bi), np.maximum(ai, bi)
        c = np.where((c <= lo) | (c >= hi), 0.5 * (ai + bi), c)
        fc = _real(f(c))

        flip = fc * fbi < 0
        a[idx] = np.where(flip, bi, ai)
        fa[idx] = np.where(flip, fbi, 0.5 * fai)
        b[idx], fb[idx] = c, fc
        best[idx] = c

        done = (fc == 0) | (np.abs(b[idx] - a[idx]) <= tol * (1.0 + np.abs(c)))
        active[idx[done]] = False
    if active.any():
        logger.warning("[Zeros] %d brackets not converged after %d steps", int(active.sum()), _MAX_ILLINOIS)
    return best


def _golden_min(g: RealFunction, lo: np.ndarray, hi: np.ndarray, tol: float) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorised golden-section minimisation of g on each [lo_i, hi_i]."""
    lo, hi = lo.copy(), hi.copy()
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    g1, g2 = g(x1), g(x2)
    for _ in range(_MAX_GOLDEN):
        if np.all(hi - lo <= tol * (1.0 + np.abs(hi))):
            break
        left = g1 < g2
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        x_keep = np.where(left, x1, x2)
        g_keep = np.where(left, g1, g2)
        x_new = np.where(left, hi - _GOLDEN * (hi - lo), lo + _GOLDEN * (hi - lo))
        g_new = g(x_new)
        x1 = np.where(left, x_new, x_keep)
        g1 = np.where(left, g_new, g_keep)
        x2 = np.where(left, x_keep, x_new)
        g2 = np.where(left, g_keep, g_new)
    x = np.where(g1 < g2, x1, x2)
    return x, np.minimum(g1, g2)


def find_real_zeros(f: RealFunction, window: Tuple[float, float], step: float = 0.02,
                    tol: float = 1e-11, expected_count: Optional[int] = None, count_slack: int = 0,
                    scan_values: Optional[np.ndarray] = None) -> EigenvalueList:
    """
    Locate all real zeros of f in window.

    Args:
        f: Vectorised real-lambda function (complex output is cast to its real part)
        window: (lambda_min, lambda_max)
        step: Scan step in s = sign(lambda) sqrt|lambda|
        tol: Relative bracket width at convergence
        expected_count: Counting heuristic; a deviation above count_slack adds a warning
        scan_values: f already sampled on scan_grid(window, step)

    Returns:
        EigenvalueList sorted ascending
    """
    grid = scan_grid(window, step)
    values = _real(f(grid)) if scan_values is None else _real(scan_values)
    if values.shape != grid.shape:
        raise ValueError("scan_values do not match the scan grid")

    warnings: List[str] = []
    roots: List[float] = []
    mult: List[int] = []

    exact = np.flatnonzero(values == 0)
    roots += grid[exact].tolist()
    mult += [1] * exact.size

    change = np.flatnonzero(values[:-1] * values[1:] < 0)
    left, right = grid[change], grid[change + 1]
    f_left, f_right = values[change], values[change + 1]

    # local minima of |f| with no sign change nearby
    mag = np.abs(values)
    inner = np.arange(1, grid.size - 1)
    same_sign = (values[inner - 1] * values[inner] > 0) & (values[inner] * values[inner + 1] > 0)
    dips = inner[same_sign & (mag[inner] < mag[inner - 1]) & (mag[inner] <= mag[inner + 1])]
    if dips.size:
        sign = np.sign(values[dips])
        lo, hi = grid[dips - 1], grid[dips + 1]
        x_min, g_min = _golden_min(lambda x: sign * _real(f(x)), lo, hi, tol)
        scale = np.maximum(mag[dips - 1], mag[dips + 1])
        split = g_min < 0
        if split.any():
            f_split = sign[split] * g_min[split]
            left = np.concatenate([left, lo[split], x_min[split]])
            right = np.concatenate([right, x_min[split], hi[split]])
            f_left = np.concatenate([f_left, values[dips - 1][split], f_split])
            f_right = np.concatenate([f_right, f_split, values[dips + 1][split]])
        double = ~split & (g_min <= _DOUBLE_ZERO_TOL * scale)
        roots += x_min[double].tolist()
        mult += [2] * int(double.sum())
        for x in x_min[double]:
            logger.info("[Zeros] double zero suspected at lambda = %.12g", x)

    if left.size:
        refined = _illinois(f, left, right, f_left, f_right, tol)
        roots += refined.tolist()
        mult += [1] * refined.size

    order = np.argsort(roots, kind="stable")
    result = EigenvalueList(
        roots=np.asarray(roots, dtype=float)[order],
        multiplicity=np.asarray(mult, dtype=np.int64)[order],
        search_window=(float(window[0]), float(window[1])),
        refinement_tol=tol,
        warnings=warnings,
    )
    if expected_count is not None and abs(len(result) - expected_count) > count_slack:
        message = (
            f"found {len(result)} zeros in {result.search_window}, expected about {expected_count}; "
            "scan step may be too coarse"
        )
        warnings.append(message)
        logger.warning("[Zeros] %s", message)
    return result
