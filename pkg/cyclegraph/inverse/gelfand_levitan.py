"""
Nystrom solver for the Gelfand-Levitan equation

    K(x, t) + F(x, t) + int_0^x K(x, s) F(s, t) ds = 0,    0 <= t <= x,

on a uniform grid. For each x_i the unknowns K(x_i, t_j), j <= i, solve the
dense system (I + F_i W_i) k = -f with trapezoid weights W_i on [0, x_i].
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from cyclegraph.errors import IllConditionedError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KernelGrid:
    """
    Two-variable kernel on a uniform square grid.

    values[i, j] is the kernel at (x_nodes[i], t_nodes[j]); a triangular
    kernel stores zeros above the diagonal.
    """

    x_nodes: np.ndarray
    t_nodes: np.ndarray
    values: np.ndarray
    triangular: bool = False

    @property
    def step(self) -> float:
        return float(self.x_nodes[1] - self.x_nodes[0])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def symmetry_defect(self) -> float:
        return float(np.max(np.abs(self.values - self.values.T)))

    def diagonal(self) -> np.ndarray:
        return np.diagonal(self.values).copy()


def trapezoid_weights(n: int, h: float) -> np.ndarray:
    w = np.full(n, h)
    if n > 1:
        w[0] = w[-1] = 0.5 * h
    else:
        w[0] = 0.0
    return w


def solve_gl(F: KernelGrid, condition_max: float = 1e8, checks: int = 16) -> KernelGrid:
    """
    Solve the Gelfand-Levitan equation for the transformation kernel.

    Args:
        F: Symmetric kernel F(x, t) on a square grid
        condition_max: Largest accepted 2-norm condition number of I + F W
        checks: Number of x rows (spread evenly, last row included) at which
            the condition number is estimated

    Returns:
        Lower-triangular KernelGrid with K(x_i, t_j) for j <= i

    Raises:
        IllConditionedError: The system is too close to singular
    """
    values = np.asarray(F.values)
    n = values.shape[0]
    h = F.step
    K = np.zeros_like(values)
    K[0, 0] = -values[0, 0]
    stride = max(1, (n - 1) // max(checks, 1))
    worst = 1.0

    for i in range(1, n):
        block = values[: i + 1, : i + 1]
        A = np.eye(i + 1, dtype=values.dtype) + block * trapezoid_weights(i + 1, h)[None, :]
        if i % stride == 0 or i == n - 1:
            cond = float(np.linalg.cond(A))
            worst = max(worst, cond)
            if not np.isfinite(cond) or cond > condition_max:
                raise IllConditionedError(cond, condition_max, f"x = {F.x_nodes[i]:.4g}")
        K[i, : i + 1] = np.linalg.solve(A, -values[i, : i + 1])

    logger.debug("[GL] solved %d rows, worst cond(I+F) = %.3e", n, worst)
    return KernelGrid(F.x_nodes, F.t_nodes, K, triangular=True)


def gl_residual(F: KernelGrid, K: KernelGrid) -> float:
    """max over grid nodes of |K + F + int_0^x K F| as the solver discretises it."""
    values = np.asarray(F.values)
    n = values.shape[0]
    h = F.step
    worst = 0.0
    for i in range(n):
        w = trapezoid_weights(i + 1, h)
        k = K.values[i, : i + 1]
        integral = (k * w) @ values[: i + 1, : i + 1]
        r = k + values[i, : i + 1] + integral
        worst = max(worst, float(np.max(np.abs(r))))
    return worst


def deriv14_const_dx(y: np.ndarray, dx: float = 1.0) -> np.ndarray:
    """
    First derivative along the last axis, fourth order.

    Central 5-point stencil inside, one-sided 5-point stencils at the two
    nodes next to each end.
    """
    y = np.asarray(y)
    if y.shape[-1] < 5:
        raise ValueError("deriv14_const_dx needs at least 5 samples")
    dy = np.empty_like(y)
    dy[..., 2:-2] = (y[..., :-4] - 8.0 * y[..., 1:-3] + 8.0 * y[..., 3:-1] - y[..., 4:]) / (12.0 * dx)
    dy[..., 0] = (-25.0 * y[..., 0] + 48.0 * y[..., 1] - 36.0 * y[..., 2]
                  + 16.0 * y[..., 3] - 3.0 * y[..., 4]) / (12.0 * dx)
    dy[..., 1] = (-3.0 * y[..., 0] - 10.0 * y[..., 1] + 18.0 * y[..., 2]
                  - 6.0 * y[..., 3] + y[..., 4]) / (12.0 * dx)
    dy[..., -2] = (3.0 * y[..., -1] + 10.0 * y[..., -2] - 18.0 * y[..., -3]
                   + 6.0 * y[..., -4] - y[..., -5]) / (12.0 * dx)
    dy[..., -1] = (25.0 * y[..., -1] - 48.0 * y[..., -2] + 36.0 * y[..., -3]
                   - 16.0 * y[..., -4] + 3.0 * y[..., -5]) / (12.0 * dx)
    return dy


def potential_shift(K: KernelGrid, dx: Optional[float] = None) -> np.ndarray:
    """2 d/dx K(x, x): the difference between recovered and reference potential."""
    return 2.0 * deriv14_const_dx(K.diagonal().real, K.step if dx is None else dx)
