"""
The contour Gamma = {lambda = rho^2 : rho = sigma + i tau} and the Weyl
function difference sampled on it.

Gamma is traversed with Re rho increasing. It passes to the left of every
eigenvalue as long as tau^2 exceeds minus the lowest eigenvalue, and
integrals over it are trapezoid sums in sigma with dmu = 2 rho drho.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from cyclegraph.config import ContourConfig
from cyclegraph.errors import ContourTooLowError

logger = logging.getLogger(__name__)

Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ContourSpec:
    tau: float
    sigma_max: float
    n_nodes: int

    def __post_init__(self):
        if not (self.tau > 0 and self.sigma_max > 0 and self.n_nodes >= 2):
            raise ValueError(f"invalid contour {self}")

    @classmethod
    def from_floor(cls, lambda_floor: float, sigma_max: float, n_nodes: int, margin: float = 2.0,
                   tau: Optional[float] = None) -> "ContourSpec":
        """
        Height from the lowest eigenvalue of either problem.

        Quadrature error grows like exp(2 tau T), so tau is the smallest
        height that leaves margin between Gamma and the spectrum.
        """
        if tau is None:
            tau = float(np.sqrt(max(0.0, -lambda_floor))) + margin
        return cls(tau=float(tau), sigma_max=float(sigma_max), n_nodes=int(n_nodes))

    @classmethod
    def from_config(cls, config: ContourConfig, lambda_floor: float) -> "ContourSpec":
        return cls.from_floor(lambda_floor, config.sigma_max, config.n_nodes, config.tau_margin, config.tau)

    @property
    def sigma(self) -> np.ndarray:
        return np.linspace(-self.sigma_max, self.sigma_max, self.n_nodes)

    @property
    def rho(self) -> np.ndarray:
        return self.sigma + 1j * self.tau

    @property
    def lam(self) -> np.ndarray:
        return self.rho ** 2

    @property
    def weights(self) -> np.ndarray:
        """Trapezoid weights for the integral over Gamma in mu, including dmu = 2 rho dsigma."""
        h = 2.0 * self.sigma_max / (self.n_nodes - 1)
        w = np.full(self.n_nodes, h)
        w[0] = w[-1] = 0.5 * h
        return w * 2.0 * self.rho

    def encloses(self, lambda_min: float) -> bool:
        return self.tau * self.tau > -lambda_min

    def refined(self) -> "ContourSpec":
        """Same contour with the node spacing halved."""
        return ContourSpec(self.tau, self.sigma_max, 2 * self.n_nodes - 1)


def contour_integral(values: np.ndarray, contour: ContourSpec) -> np.ndarray:
    """(1/2 pi i) times the integral over Gamma; the node axis is the last one."""
    return (values @ contour.weights) / (2j * np.pi)


@dataclass(frozen=True)
class WeylDiffSamples:
    """M_hat = M - M_tilde on the contour nodes, with M = -Delta_k / Delta."""

    contour: ContourSpec
    values: np.ndarray
    min_abs_delta: float
    min_node: int

    def symmetry_defect(self) -> float:
        """Relative deviation from M_hat(conj mu) = conj M_hat(mu)."""
        scale = max(float(np.max(np.abs(self.values))), 1e-300)
        return float(np.max(np.abs(self.values[::-1] - np.conj(self.values)))) / scale

    def l2_norm(self) -> float:
        """L2 norm over the rho-line."""
        h = 2.0 * self.contour.sigma_max / (self.contour.n_nodes - 1)
        w = np.full(self.contour.n_nodes, h)
        w[0] = w[-1] = 0.5 * h
        return float(np.sqrt(np.sum(w * np.abs(self.values) ** 2)))

    def decay_exponent(self, bins: int = 8) -> float:
        """p in |M_hat| ~ |rho|^-p, fitted to the envelope over the outer seven eighths."""
        edges = np.geomspace(self.contour.sigma_max / 8.0, self.contour.sigma_max, bins + 1)
        centers, peaks = [], []
        for lo, hi in zip(edges[:-1], edges[1:]):
            mask = (np.abs(self.contour.sigma) >= lo) & (np.abs(self.contour.sigma) < hi)
            if mask.any() and np.max(np.abs(self.values[mask])) > 0:
                centers.append(np.sqrt(lo * hi))
                peaks.append(np.max(np.abs(self.values[mask])))
        if len(centers) < 2:
            return float("inf")
        slope, _ = np.polyfit(np.log(centers), np.log(peaks), 1)
        return float(-slope)


def weyl_diff(delta_eval: Evaluator, delta_k_eval: Evaluator, tilde_delta_eval: Evaluator,
              tilde_delta_k_eval: Evaluator, contour: ContourSpec, m: int,
              floor: float = 1e-3) -> WeylDiffSamples:
    """
    Sample M_hat = M - M_tilde on the contour.

    Args:
        delta_eval, delta_k_eval: Characteristic functions of the reference problem
        tilde_delta_eval, tilde_delta_k_eval: Those of the problem being recovered
        contour: Quadrature contour
        m: Number of pendant edges (sets the |rho|^-m floor)
        floor: Smallest accepted |Delta| * |rho|^m

    Raises:
        ContourTooLowError: A denominator nearly vanishes on the contour
    """
    lam = contour.lam
    rho_abs = np.abs(contour.rho)
    delta = np.asarray(delta_eval(lam), dtype=complex)
    tilde_delta = np.asarray(tilde_delta_eval(lam), dtype=complex)

    limit = floor * rho_abs ** (-m)
    smallest = np.minimum(np.abs(delta), np.abs(tilde_delta))
    ratio = smallest / limit
    node = int(np.argmin(ratio))
    if ratio[node] < 1.0:
        raise ContourTooLowError(node, float(smallest[node]), float(limit[node]))

    M = -np.asarray(delta_k_eval(lam), dtype=complex) / delta
    M_tilde = -np.asarray(tilde_delta_k_eval(lam), dtype=complex) / tilde_delta
    min_node = int(np.argmin(smallest))
    logger.debug("[Contour] tau=%.4g, min |Delta| = %.3e at node %d", contour.tau, smallest[min_node], min_node)
    return WeylDiffSamples(
        contour=contour,
        values=M - M_tilde,
        min_abs_delta=float(smallest[min_node]),
        min_node=min_node,
    )


def spectral_floor(*spectra) -> float:
    """Lowest value over several eigenvalue arrays (0 when all are empty)."""
    lows = [float(np.min(s)) for s in spectra if np.size(s)]
    return min(lows) if lows else 0.0
