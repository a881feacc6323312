"""
Loop potential from quasiperiodic data (d, lambda_n, sigma_n).

At a Dirichlet zero lambda_n of h the Wronskian gives C_0 S_0' = 1, so
d^2 - H^2 = 4 and H = sigma_n sqrt(d^2 - 4). With d + H = 2a C_0 and
d - H = 2 S_0'/a this fixes S_0'(T_0, lambda_n), and the norming constant
of the Dirichlet problem is alpha_n = h_dot(lambda_n) S_0'(T_0, lambda_n).
The pairs (lambda_n, alpha_n) feed the classical Gelfand-Levitan equation
on the unit interval with the zero potential as reference.

Everything here runs on the unit loop; LoopKernels carries T0 for the way back.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from cyclegraph.errors import InconsistentNormingError, NotRealizableError
from cyclegraph.inverse.gelfand_levitan import KernelGrid, potential_shift, solve_gl
from cyclegraph.model.geometry import GridFunction, project_mean_zero
from cyclegraph.ode import integrate_fundamental
from cyclegraph.spectral.zeros import find_real_zeros

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuasiData:
    """Quasiperiodic spectral data on the unit loop."""

    d_eval: Callable[[np.ndarray], np.ndarray]
    lambda_n: np.ndarray
    sigma: np.ndarray
    a: float


@dataclass(frozen=True)
class DirichletData:
    lambda_n: np.ndarray
    alpha_n: np.ndarray

    @property
    def reference_ratio(self) -> np.ndarray:
        """alpha_n over the zero-potential value 1/(2 pi^2 n^2)."""
        n = np.arange(1, self.alpha_n.size + 1)
        return self.alpha_n * 2.0 * np.pi ** 2 * n ** 2


def quasi_to_dirichlet(qd: QuasiData, h_dot: Callable[[np.ndarray], np.ndarray],
                       realizability: float = 1e-6, required: Optional[int] = None) -> DirichletData:
    """
    Norming constants of the Dirichlet problem on the loop.

    Pairs past the first `required` are optional: the data are cut before
    the first of them that fails a check.

    Raises:
        NotRealizableError: d(lambda_n)^2 < 4 beyond the slack
        InconsistentNormingError: alpha_n <= 0
    """
    lam = np.asarray(qd.lambda_n, dtype=float)
    required = lam.size if required is None else min(required, lam.size)
    d = np.real(qd.d_eval(lam))
    H = qd.sigma[: lam.size] * np.sqrt(np.maximum(d * d - 4.0, 0.0))
    S0p = qd.a * (d - H) / 2.0
    alpha = np.real(h_dot(lam)) * S0p

    short = np.flatnonzero(d * d < 4.0 - realizability)
    bad = np.flatnonzero(alpha <= 0)
    if short.size and short[0] < required:
        n = int(short[0])
        raise NotRealizableError(n + 1, float(d[n]))
    if bad.size and bad[0] < required:
        n = int(bad[0])
        raise InconsistentNormingError(n + 1, float(alpha[n]))
    keep = int(min(np.concatenate([short, bad, [lam.size]])))
    if keep < lam.size:
        logger.warning("[Loop] keeping %d of %d Dirichlet pairs; pair %d fails the checks", keep, lam.size, keep + 1)
    return DirichletData(lambda_n=lam[:keep], alpha_n=alpha[:keep])


def _phi(lam: np.ndarray, x: np.ndarray) -> np.ndarray:
    """sin(rho x)/rho, shape (len(x), len(lam)); real for real lambda of either sign."""
    rho = np.sqrt(np.asarray(lam, dtype=complex))
    return (x[:, None] * np.sinc(np.outer(x, rho) / np.pi)).real


def dirichlet_kernel(dd: DirichletData, N: int, x: np.ndarray) -> KernelGrid:
    """
    F(x, t) = sum_{n<=N} phi_n(x) phi_n(t)/alpha_n - phi0_n(x) phi0_n(t)/alpha0_n
    with phi0_n = sin(pi n x)/(pi n) and alpha0_n = 1/(2 pi^2 n^2).
    """
    N = min(N, dd.lambda_n.size)
    n = np.arange(1, N + 1)
    phi = _phi(dd.lambda_n[:N], x)
    phi0 = _phi((np.pi * n) ** 2, x)
    alpha0 = 1.0 / (2.0 * np.pi ** 2 * n ** 2)
    F = (phi / dd.alpha_n[:N]) @ phi.T - (phi0 / alpha0) @ phi0.T
    return KernelGrid(x, x, F)


@dataclass
class LoopReconstruction:
    q0: GridFunction
    mean: float
    n_pairs: int
    # relative L2 change when the reconstruction uses up to 2N pairs
    refinement_difference: Optional[float] = None
    refinement_pairs: int = 0
    warnings: List[str] = field(default_factory=list)


def _reconstruct(dd: DirichletData, N: int, n_nodes: int, condition_max: float):
    x = np.linspace(0.0, 1.0, n_nodes)
    K = solve_gl(dirichlet_kernel(dd, N, x), condition_max=condition_max)
    raw = GridFunction(1.0, potential_shift(K))
    return raw


def gl_dirichlet_reconstruct(dd: DirichletData, N: int, n_nodes: int, condition_max: float = 1e8,
                             convergence_check: bool = False, warn_above: float = 0.05) -> LoopReconstruction:
    """
    Unit-loop potential from the first N Dirichlet pairs.

    Args:
        convergence_check: Also reconstruct from min(2N, available) pairs and
            warn when the two differ by more than warn_above in relative L2.
            With no pairs past N the check is skipped with a warning.

    Returns:
        LoopReconstruction with the mean-zero potential and the raw mean
    """
    N = min(N, dd.lambda_n.size)
    raw = _reconstruct(dd, N, n_nodes, condition_max)
    mean = raw.integral()
    q0 = project_mean_zero(raw)
    result = LoopReconstruction(q0=q0, mean=mean, n_pairs=N)

    if convergence_check:
        finer = min(2 * N, dd.lambda_n.size)
        if finer > N:
            refined = project_mean_zero(_reconstruct(dd, finer, n_nodes, condition_max))
            # relative above unit norm, absolute below
            scale = max(refined.l2_norm(), q0.l2_norm(), 1.0)
            result.refinement_difference = (refined - q0).l2_norm() / scale
            result.refinement_pairs = finer
            if result.refinement_difference > warn_above:
                message = (
                    f"loop reconstruction with {N} pairs differs from {finer} pairs by "
                    f"{result.refinement_difference:.1%}; more pairs may be needed"
                )
                result.warnings.append(message)
                logger.warning("[Loop] %s", message)
        else:
            message = f"no Dirichlet pairs beyond {N}; truncation in the loop step not checked"
            result.warnings.append(message)
            logger.warning("[Loop] %s", message)
    logger.info("[Loop] reconstructed from %d pairs, raw mean %.3e, |q0| = %.4g", result.n_pairs, mean, q0.l2_norm())
    return result


def unscale_loop_potential(q_unit: GridFunction, T0: float, n_nodes: int) -> GridFunction:
    """q0(x) = q_unit(x / T0) / T0^2 on [0, T0]."""
    x = np.linspace(0.0, T0, n_nodes)
    values = np.interp(x / T0, q_unit.x, q_unit.values) / T0 ** 2
    return project_mean_zero(GridFunction(T0, values))


@dataclass
class SigmaReport:
    checked: int
    mismatches: List[int]
    zero_signs: int
    max_d_deviation: float

    @property
    def ok(self) -> bool:
        return not self.mismatches


def verify_sigma_condition(qd: QuasiData, reconstructed_q0: GridFunction, zero_tol: float = 1e-6,
                           step: float = 0.02) -> SigmaReport:
    """
    Recompute the Dirichlet zeros, d and sigma from a reconstructed unit-loop
    potential and compare them with the data.
    """
    N = int(qd.lambda_n.size)
    if N == 0:
        return SigmaReport(0, [], 0, 0.0)
    top = float(qd.lambda_n[-1]) + np.pi ** 2 * (N + 0.5)
    zeros = find_real_zeros(
        lambda lam: integrate_fundamental(reconstructed_q0, lam).S.real,
        (-(reconstructed_q0.l2_norm() + 2.0) ** 2, top), step=step,
    ).values[:N]
    ends = integrate_fundamental(reconstructed_q0, zeros)
    d = (qd.a * ends.C + ends.Sp / qd.a).real
    H = (qd.a * ends.C - ends.Sp / qd.a).real
    sigma = np.sign(H).astype(np.int64)
    sigma[np.abs(H) <= zero_tol * (1.0 + np.abs(d))] = 0

    count = min(N, zeros.size)
    expected = np.asarray(qd.sigma[:count])
    mismatches = [int(n) + 1 for n in np.flatnonzero(sigma[:count] != expected)]
    d_data = np.real(qd.d_eval(np.asarray(qd.lambda_n[:count])))
    deviation = float(np.max(np.abs(np.abs(d[:count]) - np.abs(d_data)))) if count else 0.0
    if mismatches:
        logger.warning("[Loop] sigma mismatches at n = %s", mismatches[:10])
    return SigmaReport(checked=count, mismatches=mismatches, zero_signs=int(np.count_nonzero(sigma[:count] == 0)),
                       max_d_deviation=deviation)


__all__ = [
    "DirichletData",
    "LoopReconstruction",
    "QuasiData",
    "SigmaReport",
    "dirichlet_kernel",
    "gl_dirichlet_reconstruct",
    "quasi_to_dirichlet",
    "unscale_loop_potential",
    "verify_sigma_condition",
]
