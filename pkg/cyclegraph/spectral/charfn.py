"""
Characteristic functions of the loop-with-pendants graph.

With S_j, C_j the fundamental solutions of edge j taken at x = T_j:

    d   = a C_0 + S_0'/a            h = S_0              H = a C_0 - S_0'/a
    Pi  = prod_{j>=1} S_j           K = sum_r S_r' prod_{j!=r} S_j
    Pi_k = C_k prod_{j!=k} S_j      K_k = C_k' prod_{j!=k} S_j + C_k sum_{r!=k} S_r' prod_{j!=r,k} S_j
    Delta   = (d - 2) Pi   + a h K
    Delta_k = (d - 2) Pi_k + a h K_k

Every function is assembled from one integration per edge, so evaluating
the whole family at a batch of lambda costs m + 1 ODE sweeps.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from cyclegraph.errors import DataInconsistencyError
from cyclegraph.model.geometry import GraphGeometry, GridFunction, PotentialSet
from cyclegraph.ode import EndpointData, integrate_fundamental, lambda_derivative, zero_potential_endpoints
from cyclegraph.ode.engine import OVERFLOW_BUDGET

logger = logging.getLogger(__name__)


def _prod_except(values: Sequence[np.ndarray], skip: Tuple[int, ...], like: np.ndarray) -> np.ndarray:
    out = np.ones_like(like)
    for j, v in enumerate(values):
        if j not in skip:
            out = out * v
    return out


@dataclass(frozen=True)
class PendantProducts:
    """Product and Kirchhoff parts built from the pendant edges alone."""

    pi: np.ndarray
    K: np.ndarray
    pi_k: Tuple[np.ndarray, ...]
    K_k: Tuple[np.ndarray, ...]


def pendant_products(ends: Sequence[EndpointData]) -> PendantProducts:
    """
    Assemble Pi, K, Pi_k, K_k from endpoint data of edges 1..m.

    Args:
        ends: EndpointData of the pendant edges, in edge order

    Returns:
        PendantProducts shaped like the lambda batch
    """
    S = [e.S for e in ends]
    Sp = [e.Sp for e in ends]
    like = np.asarray(S[0], dtype=complex)
    m = len(ends)

    pi = _prod_except(S, (), like)
    K = sum(Sp[r] * _prod_except(S, (r,), like) for r in range(m))

    pi_k, K_k = [], []
    for k in range(m):
        rest = _prod_except(S, (k,), like)
        pi_k.append(ends[k].C * rest)
        kirchhoff = ends[k].Cp * rest
        for r in range(m):
            if r != k:
                kirchhoff = kirchhoff + ends[k].C * Sp[r] * _prod_except(S, (r, k), like)
        K_k.append(kirchhoff)
    return PendantProducts(pi=pi, K=K, pi_k=tuple(pi_k), K_k=tuple(K_k))


@dataclass(frozen=True)
class CharFnValues:
    """The whole characteristic-function family at one lambda batch."""

    lam: np.ndarray
    d: np.ndarray
    h: np.ndarray
    H: np.ndarray
    products: PendantProducts
    delta: np.ndarray
    delta_k: Tuple[np.ndarray, ...]


def _assemble(geometry: GraphGeometry, lam: np.ndarray, loop: EndpointData,
              pendants: Sequence[EndpointData]) -> CharFnValues:
    a = geometry.a
    d = a * loop.C + loop.Sp / a
    H = a * loop.C - loop.Sp / a
    h = loop.S
    prod = pendant_products(pendants)
    delta = (d - 2.0) * prod.pi + a * h * prod.K
    delta_k = tuple((d - 2.0) * p + a * h * kk for p, kk in zip(prod.pi_k, prod.K_k))
    return CharFnValues(lam=lam, d=d, h=h, H=H, products=prod, delta=delta, delta_k=delta_k)


class CharFnSet:
    """
    Evaluators for Delta, Delta_k, d, h, H and their product/Kirchhoff parts.

    Every evaluator takes a scalar or array of complex lambda and returns an
    array of the same shape.
    """

    def __init__(self, potentials: PotentialSet, substeps: int = 1, budget: float = OVERFLOW_BUDGET):
        self.potentials = potentials
        self.substeps = substeps
        self.budget = budget

    @property
    def geometry(self) -> GraphGeometry:
        return self.potentials.geometry

    def endpoints(self, lam) -> List[EndpointData]:
        """Endpoint data for every edge, loop first."""
        return [integrate_fundamental(q, lam, self.substeps, self.budget) for q in self.potentials.q]

    def evaluate(self, lam) -> CharFnValues:
        lam = np.asarray(lam, dtype=complex)
        ends = self.endpoints(lam)
        return _assemble(self.geometry, lam, ends[0], ends[1:])

    def _loop(self, lam) -> EndpointData:
        return integrate_fundamental(self.potentials.q[0], lam, self.substeps, self.budget)

    def _pendants(self, lam) -> PendantProducts:
        return pendant_products(self.endpoints(lam)[1:])

    def eval_delta(self, lam) -> np.ndarray:
        return self.evaluate(lam).delta

    def eval_delta_k(self, k: int, lam) -> np.ndarray:
        """k = 1..m."""
        self._check_k(k)
        return self.evaluate(lam).delta_k[k - 1]

    def eval_d(self, lam) -> np.ndarray:
        loop = self._loop(lam)
        return self.geometry.a * loop.C + loop.Sp / self.geometry.a

    def eval_h(self, lam) -> np.ndarray:
        return self._loop(lam).S

    def eval_H(self, lam) -> np.ndarray:
        loop = self._loop(lam)
        return self.geometry.a * loop.C - loop.Sp / self.geometry.a

    def eval_pi(self, lam) -> np.ndarray:
        return self._pendants(lam).pi

    def eval_K(self, lam) -> np.ndarray:
        return self._pendants(lam).K

    def eval_pi_k(self, k: int, lam) -> np.ndarray:
        self._check_k(k)
        return self._pendants(lam).pi_k[k - 1]

    def eval_K_k(self, k: int, lam) -> np.ndarray:
        self._check_k(k)
        return self._pendants(lam).K_k[k - 1]

    def eval_h_dot(self, lam) -> np.ndarray:
        """d/dlambda of h = S_0(T_0, lambda)."""
        return lambda_derivative(self.potentials.q[0], lam, self.substeps, self.budget).S

    def _check_k(self, k: int) -> None:
        if not 1 <= k <= self.geometry.m:
            raise IndexError(f"pendant index k must be in 1..{self.geometry.m}, got {k}")


def boundary_products(boundary: Sequence[GridFunction], lam, substeps: int = 1) -> PendantProducts:
    """Pi, K, Pi_k, K_k straight from pendant potentials (no loop needed)."""
    ends = [integrate_fundamental(q, lam, substeps) for q in boundary]
    return pendant_products(ends)


def _zero_parts(geometry: GraphGeometry, lam) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """s_j = sin(rho T_j)/rho and c_j = cos(rho T_j), loop first."""
    s, c = [], []
    for t in geometry.T:
        e = zero_potential_endpoints(lam, t)
        s.append(e.S)
        c.append(e.C)
    return s, c


def eval_delta0(geometry: GraphGeometry, lam) -> np.ndarray:
    """
    Delta for zero potentials in closed form:

        ((a + 1/a) cos rho T_0 - 2) prod_{j>=1} s_j + a sum_{r>=1} c_r prod_{j!=r} s_j

    where the last product runs over all edges including the loop.
    """
    lam = np.asarray(lam, dtype=complex)
    a = geometry.a
    s, c = _zero_parts(geometry, lam)
    like = np.ones_like(lam)
    out = ((a + 1.0 / a) * c[0] - 2.0) * _prod_except(s, (0,), like)
    for r in range(1, geometry.m + 1):
        out = out + a * c[r] * _prod_except(s, (r,), like)
    return out


def eval_delta0_k(geometry: GraphGeometry, k: int, lam) -> np.ndarray:
    """Delta_k for zero potentials in closed form."""
    if not 1 <= k <= geometry.m:
        raise IndexError(f"pendant index k must be in 1..{geometry.m}, got {k}")
    lam = np.asarray(lam, dtype=complex)
    a = geometry.a
    s, c = _zero_parts(geometry, lam)
    like = np.ones_like(lam)
    # C_k' = -lambda s_k for the zero potential
    out = ((a + 1.0 / a) * c[0] - 2.0) * c[k] * _prod_except(s, (0, k), like)
    out = out - a * lam * _prod_except(s, (), like)
    for r in range(1, geometry.m + 1):
        if r != k:
            out = out + a * c[k] * c[r] * _prod_except(s, (r, k), like)
    return out


def spectral_lower_bound(potentials: PotentialSet) -> float:
    """Crude lower bound for both spectra: -(max ||q_j|| T_j + |a| + 1/|a| + 2)^2."""
    geometry = potentials.geometry
    spread = max(fn.l2_norm() * t for fn, t in zip(potentials.q, geometry.T))
    a = abs(geometry.a)
    return -((spread + a + 1.0 / a + 2.0) ** 2)


@dataclass(frozen=True)
class SignReport:
    sigma: np.ndarray
    d_values: np.ndarray
    H_values: np.ndarray
    max_defect: float


def signs_sigma(cf: CharFnSet, dirichlet, zero_tol: float = 1e-6,
                cross_check: float = 1e-6) -> SignReport:
    """
    sigma_n = sign H(lambda_n) at the Dirichlet zeros of the loop.

    |H| <= zero_tol * (1 + |d|) counts as sigma = 0. The identity
    d^2 - H^2 = 4 must hold at every zero to within cross_check.

    Raises:
        DataInconsistencyError: The identity fails, i.e. dirichlet are not zeros of h
    """
    lam = np.asarray(getattr(dirichlet, "values", dirichlet), dtype=float)
    if lam.size == 0:
        return SignReport(np.zeros(0, dtype=np.int64), np.zeros(0), np.zeros(0), 0.0)
    loop = cf._loop(lam.astype(complex))
    a = cf.geometry.a
    d = (a * loop.C + loop.Sp / a).real
    H = (a * loop.C - loop.Sp / a).real

    defect = np.abs(d * d - H * H - 4.0)
    worst = int(np.argmax(defect))
    if defect[worst] > cross_check:
        raise DataInconsistencyError(
            f"d^2 - H^2 = {d[worst] ** 2 - H[worst] ** 2:.9g} at lambda_{worst + 1} = {lam[worst]:.9g}; expected 4"
        )

    sigma = np.sign(H).astype(np.int64)
    sigma[np.abs(H) <= zero_tol * (1.0 + np.abs(d))] = 0
    zeros = int(np.count_nonzero(sigma == 0))
    if zeros:
        logger.info("[Signs] %d of %d Dirichlet zeros have sigma = 0", zeros, sigma.size)
    return SignReport(sigma=sigma, d_values=d, H_values=H, max_defect=float(defect[worst]))


__all__ = [
    "CharFnSet",
    "CharFnValues",
    "PendantProducts",
    "SignReport",
    "boundary_products",
    "eval_delta0",
    "eval_delta0_k",
    "pendant_products",
    "signs_sigma",
    "spectral_lower_bound",
]
