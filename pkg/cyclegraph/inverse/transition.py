"""
From boundary data to the loop: Cramer's rule for d and h, Riesz-basis
extraction of their integral kernels, and the Dirichlet spectrum of the loop.

Once the pendant potentials are known, Pi, K, Pi_1 and K_1 are computable and

    Delta   = (d - 2) Pi   + a h K
    Delta_1 = (d - 2) Pi_1 + a h K_1

is a 2x2 linear system for d and h. Its determinant E = Pi K_1 - K Pi_1
equals -(prod_{j>=2} S_j)^2.

On the unit loop d and h have the representations

    d(rho^2) = (a + 1/a) cos rho + (1/rho) int_0^1 D(t) sin(rho t) dt
    h(rho^2) = sin(rho)/rho + (1/rho^2) int_0^1 K(t) cos(rho t) dt

whose coefficients at nu_n = pi n + i alpha are Fourier coefficients of the
odd / even extensions of D, K times exp(-alpha t) on (-1, 1).
"""

import logging
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid

from cyclegraph.errors import NodeCollisionError, RootFindingError
from cyclegraph.model.geometry import GraphGeometry, GridFunction, project_mean_zero
from cyclegraph.spectral.charfn import boundary_products
from cyclegraph.spectral.zeros import EigenvalueList

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RieszNodes:
    """nu_n = pi n + i alpha for n = -N..N on the unit loop."""

    alpha: float
    count: int

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")

    @property
    def n(self) -> np.ndarray:
        return np.arange(-self.count, self.count + 1)

    @property
    def nu(self) -> np.ndarray:
        return np.pi * self.n + 1j * self.alpha

    @property
    def mu(self) -> np.ndarray:
        return self.nu ** 2


@dataclass(frozen=True)
class CramerValues:
    d: np.ndarray
    h: np.ndarray
    E: np.ndarray


def cramer_dh(delta_eval, delta1_eval, boundary_potentials: Sequence[GridFunction], lam, a: float,
              collision_threshold: float = 0.0, substeps: int = 1) -> CramerValues:
    """
    Solve for d(lambda) and h(lambda) at the given points.

    Args:
        delta_eval, delta1_eval: Delta and Delta_1 of the graph
        boundary_potentials: Recovered q_1..q_m
        lam: Points, away from the doubled pendant Dirichlet zeros
        a: Vertex coupling
        collision_threshold: Smallest accepted |E| * |rho|^(2(m-1))

    Raises:
        NodeCollisionError: E nearly vanishes at some point
    """
    lam = np.asarray(lam, dtype=complex)
    prod = boundary_products(boundary_potentials, lam, substeps)
    E = prod.pi * prod.K_k[0] - prod.K * prod.pi_k[0]

    m = len(boundary_potentials)
    scaled = np.abs(E) * np.maximum(np.abs(np.sqrt(lam)), 1.0) ** (2 * (m - 1))
    if scaled.size and collision_threshold > 0:
        node = int(np.argmin(scaled))
        if scaled.flat[node] < collision_threshold:
            raise NodeCollisionError(node, float(np.abs(E).flat[node]))

    delta = np.asarray(delta_eval(lam), dtype=complex)
    delta1 = np.asarray(delta1_eval(lam), dtype=complex)
    d = 2.0 + (delta * prod.K_k[0] - prod.K * delta1) / E
    h = (prod.pi * delta1 - prod.pi_k[0] * delta) / (a * E)
    return CramerValues(d=d, h=h, E=E)


def check_E_identity(boundary_potentials: Sequence[GridFunction], lambda_samples, substeps: int = 1) -> float:
    """Largest relative defect between Pi K_1 - K Pi_1 and -(prod_{j>=2} S_j)^2."""
    lam = np.asarray(lambda_samples, dtype=complex)
    prod = boundary_products(boundary_potentials, lam, substeps)
    assembled = prod.pi * prod.K_k[0] - prod.K * prod.pi_k[0]
    closed = -np.ones_like(lam)
    for q in boundary_potentials[1:]:
        s = boundary_products([q], lam, substeps).pi
        closed = closed * s * s
    scale = np.maximum(np.abs(closed), 1e-300)
    return float(np.max(np.abs(assembled - closed) / scale))


def riesz_synthesize(coefficients: np.ndarray, alpha: float, t: np.ndarray) -> np.ndarray:
    """f(t) = exp(alpha t) (1/2) sum_n c_n exp(-i pi n t) for n = -N..N."""
    coefficients = np.asarray(coefficients, dtype=complex)
    N = (coefficients.size - 1) // 2
    n = np.arange(-N, N + 1)
    t = np.asarray(t, dtype=float)
    series = np.exp(-1j * np.pi * np.outer(t, n)) @ coefficients
    return np.exp(alpha * t) * 0.5 * series


def riesz_coefficients(values: np.ndarray, t: np.ndarray, alpha: float, count: int) -> np.ndarray:
    """c_n = int_{-1}^{1} f(t) exp(i nu_n t) dt by the trapezoid rule on a uniform grid."""
    t = np.asarray(t, dtype=float)
    nu = np.pi * np.arange(-count, count + 1) + 1j * alpha
    kernel = np.exp(1j * np.outer(nu, t))
    return trapezoid(kernel * np.asarray(values)[None, :], t, axis=1)


def _sin_over(rho: np.ndarray, t: np.ndarray) -> np.ndarray:
    """sin(rho t)/rho as an array (rho, t), entire in rho."""
    return t[None, :] * np.sinc(np.outer(rho, t) / np.pi)


@dataclass(frozen=True)
class LoopKernels:
    """
    Kernels of d and h on the unit loop.

    Evaluators take the scaled parameter mu = T0^2 lambda.
    """

    D: GridFunction
    K_loop: GridFunction
    a: float
    alpha: float
    n_modes: int
    T0: float = 1.0
    min_abs_E: float = float("nan")
    # L2 change of D and K_loop when the node count doubles
    truncation_D: float = float("nan")
    truncation_K: float = float("nan")

    def _rho(self, mu) -> np.ndarray:
        return np.sqrt(np.asarray(mu, dtype=complex).reshape(-1))

    def d_scaled(self, mu) -> np.ndarray:
        shape = np.shape(mu)
        rho = self._rho(mu)
        t = self.D.x
        integral = trapezoid(self.D.values[None, :] * _sin_over(rho, t), t, axis=1)
        return ((self.a + 1.0 / self.a) * np.cos(rho) + integral).reshape(shape)

    def h_scaled(self, mu) -> np.ndarray:
        # K integrates to zero, so the cosine integral is taken against cos(rho t) - 1
        shape = np.shape(mu)
        rho = self._rho(mu)
        t = self.K_loop.x
        half = np.sinc(np.outer(rho, t) / (2.0 * np.pi))
        integral = trapezoid(self.K_loop.values[None, :] * (-0.5 * t[None, :] ** 2) * half ** 2, t, axis=1)
        return (np.sinc(rho / np.pi) + integral).reshape(shape)

    def h_zero(self) -> float:
        t = self.K_loop.x
        return float(1.0 - 0.5 * trapezoid(t * t * self.K_loop.values, t))

    def _g(self, rho: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """g = rho^2 h(rho^2) = rho sin rho + int K cos(rho t), and dg/drho."""
        t = self.K_loop.x
        arg = np.outer(rho, t)
        g = rho * np.sin(rho) + trapezoid(self.K_loop.values[None, :] * np.cos(arg), t, axis=1)
        dg = np.sin(rho) + rho * np.cos(rho) - trapezoid(
            (t * self.K_loop.values)[None, :] * np.sin(arg), t, axis=1
        )
        return g, dg

    def h_dot_scaled(self, mu) -> np.ndarray:
        """dh/dmu from the kernel representation."""
        shape = np.shape(mu)
        rho = self._rho(mu)
        t = self.K_loop.x
        arg = np.outer(rho, t)
        c = trapezoid(self.K_loop.values[None, :] * np.cos(arg), t, axis=1)
        s = trapezoid((t * self.K_loop.values)[None, :] * np.sin(arg), t, axis=1)
        dh = (rho * np.cos(rho) - np.sin(rho)) / rho ** 2 - 2.0 * c / rho ** 3 - s / rho ** 2
        return (dh / (2.0 * rho)).reshape(shape)

    # evaluators in the graph's own lambda
    def d(self, lam) -> np.ndarray:
        return self.d_scaled(np.asarray(lam) * self.T0 ** 2)

    def h(self, lam) -> np.ndarray:
        return self.T0 * self.h_scaled(np.asarray(lam) * self.T0 ** 2)

    def h_dot(self, lam) -> np.ndarray:
        return self.T0 ** 3 * self.h_dot_scaled(np.asarray(lam) * self.T0 ** 2)


def kernels_from_coefficients(D_hat: np.ndarray, K_hat: np.ndarray, alpha: float, n_nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Odd part of the D series and even part of the K series on [0, 1].

    D_hat_n = int_0^1 D sin(nu_n t) and K_hat_n = int_0^1 K cos(nu_n t) are
    Fourier data of the odd / even extensions: c_n = 2i D_hat_n, c_n = 2 K_hat_n.
    """
    x = np.linspace(0.0, 1.0, n_nodes)
    both = np.concatenate([x, -x])
    f_D = riesz_synthesize(2j * np.asarray(D_hat), alpha, both)
    f_K = riesz_synthesize(2.0 * np.asarray(K_hat), alpha, both)
    D = 0.5 * (f_D[:n_nodes] - f_D[n_nodes:])
    K = 0.5 * (f_K[:n_nodes] + f_K[n_nodes:])
    return D.real, K.real


def _kernels_at(nodes: RieszNodes, delta_eval, delta1_eval, boundary_potentials, geometry: GraphGeometry,
                n_nodes: int, collision_threshold: float, substeps: int):
    T0 = geometry.T[0]
    a = geometry.a
    values = cramer_dh(delta_eval, delta1_eval, boundary_potentials, nodes.mu / T0 ** 2, a,
                       collision_threshold, substeps)
    nu = nodes.nu
    h_scaled = values.h / T0
    D_hat = nu * (values.d - (a + 1.0 / a) * np.cos(nu))
    K_hat = nu ** 2 * (h_scaled - np.sin(nu) / nu)
    D, K = kernels_from_coefficients(D_hat, K_hat, nodes.alpha, n_nodes)
    return GridFunction(1.0, D), project_mean_zero(GridFunction(1.0, K)), float(np.min(np.abs(values.E)))


def extract_loop_kernels(delta_eval, delta1_eval, boundary_potentials: Sequence[GridFunction],
                         geometry: GraphGeometry, n_nodes: int, alpha: float = 1.0, n_modes: int = 64,
                         collision_threshold: float = 1e-6, max_retries: int = 4,
                         substeps: int = 1, truncation_check: bool = True) -> LoopKernels:
    """
    Recover D and K_loop from Delta, Delta_1 and the pendant potentials.

    The loop is rescaled to unit length: nodes mu_n live in the scaled
    parameter and are mapped back to lambda = mu_n / T0^2 for evaluation.
    On a node collision alpha grows by 1/2, at most max_retries times.

    With truncation_check the kernels are extracted once more from 2N modes
    at the accepted alpha; the L2 changes are stored as truncation_D and
    truncation_K (NaN if the doubled node set collides).
    """
    last_error: Optional[NodeCollisionError] = None
    for attempt in range(max_retries + 1):
        nodes = RieszNodes(alpha + 0.5 * attempt, n_modes)
        try:
            D_fn, K_fn, min_E = _kernels_at(nodes, delta_eval, delta1_eval, boundary_potentials, geometry,
                                            n_nodes, collision_threshold, substeps)
        except NodeCollisionError as e:
            logger.warning("[Transition] alpha=%.2f: %s; retrying", nodes.alpha, e)
            last_error = e
            continue

        logger.info(
            "[Transition] alpha=%.2f N=%d min|E|=%.3e |D|=%.3e |K|=%.3e",
            nodes.alpha, n_modes, min_E, D_fn.l2_norm(), K_fn.l2_norm(),
        )
        kernels = LoopKernels(D=D_fn, K_loop=K_fn, a=geometry.a, alpha=nodes.alpha, n_modes=n_modes,
                              T0=geometry.T[0], min_abs_E=min_E)
        if truncation_check:
            kernels = _with_truncation(kernels, delta_eval, delta1_eval, boundary_potentials, geometry,
                                       n_nodes, collision_threshold, substeps)
        return kernels
    raise last_error


def _with_truncation(kernels: LoopKernels, delta_eval, delta1_eval, boundary_potentials, geometry,
                     n_nodes, collision_threshold, substeps) -> LoopKernels:
    doubled = RieszNodes(kernels.alpha, 2 * kernels.n_modes)
    try:
        D2, K2, _ = _kernels_at(doubled, delta_eval, delta1_eval, boundary_potentials, geometry,
                                n_nodes, collision_threshold, substeps)
    except NodeCollisionError as e:
        logger.warning("[Transition] no truncation estimate, %d modes collide: %s", doubled.count, e)
        return kernels
    change_D = (D2 - kernels.D).l2_norm()
    change_K = (K2 - kernels.K_loop).l2_norm()
    logger.info("[Transition] N=%d -> %d changes |D| by %.3e, |K| by %.3e",
                kernels.n_modes, doubled.count, change_D, change_K)
    return replace(kernels, truncation_D=change_D, truncation_K=change_K)


def dirichlet_from_h(kernels: LoopKernels, n_eigs: int, max_iter: int = 50, tol: float = 1e-13,
                     h_zero_min: float = 1e-8, required: Optional[int] = None) -> EigenvalueList:
    """
    Zeros lambda_1 < ... < lambda_N of h from the kernel representation.

    Newton on g(rho) = rho^2 h(rho^2) from rho = pi n, with bisection on
    [pi(n - 1/2), pi(n + 1/2)] when Newton does not settle inside it.
    Zeros past the first `required` are optional: the list stops at the
    first one that cannot be bracketed.

    Raises:
        RootFindingError: h(0) nearly vanishes, or no zero near pi n
    """
    h0 = kernels.h_zero()
    if abs(h0) < h_zero_min:
        raise RootFindingError(0, f"|h(0)| = {abs(h0):.3e} below {h_zero_min:g}; zero-at-origin case unsupported")

    required = n_eigs if required is None else min(required, n_eigs)
    roots = []
    for n in range(1, n_eigs + 1):
        lo, hi = np.pi * (n - 0.5), np.pi * (n + 0.5)
        rho = np.pi * n
        converged = False
        for _ in range(max_iter):
            g, dg = kernels._g(np.array([rho]))
            if dg[0] == 0:
                break
            step = g[0] / dg[0]
            rho -= step
            if abs(step) <= tol * max(1.0, abs(rho)):
                converged = True
                break
        if not converged or not lo < rho < hi:
            try:
                rho = _bisect(kernels, n, lo, hi, tol)
            except RootFindingError as e:
                if n <= required:
                    raise
                logger.warning("[Transition] keeping %d Dirichlet zeros: %s", n - 1, e)
                break
        roots.append(rho)

    lam = (np.asarray(roots) / kernels.T0) ** 2
    return EigenvalueList(
        roots=lam,
        multiplicity=np.ones(lam.size, dtype=np.int64),
        search_window=(0.0, float(lam[-1])) if lam.size else (0.0, 0.0),
        refinement_tol=tol,
    )


def _bisect(kernels: LoopKernels, n: int, lo: float, hi: float, tol: float) -> float:
    g_lo = kernels._g(np.array([lo]))[0][0]
    g_hi = kernels._g(np.array([hi]))[0][0]
    if g_lo * g_hi > 0:
        raise RootFindingError(n, f"no sign change of h on [{lo:.6g}, {hi:.6g}]")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        g_mid = kernels._g(np.array([mid]))[0][0]
        if g_lo * g_mid <= 0:
            hi = mid
        else:
            lo, g_lo = mid, g_mid
        if hi - lo <= tol * max(1.0, hi):
            break
    logger.info("[Transition] bisection used for Dirichlet zero %d", n)
    return 0.5 * (lo + hi)


__all__ = [
    "CramerValues",
    "LoopKernels",
    "RieszNodes",
    "check_E_identity",
    "cramer_dh",
    "dirichlet_from_h",
    "extract_loop_kernels",
    "kernels_from_coefficients",
    "riesz_coefficients",
    "riesz_synthesize",
]
