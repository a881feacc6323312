"""
Domain types for the graph: geometry, grid functions and potential sets.
"""

from dataclasses import dataclass, field
from typing import Callable, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.integrate import trapezoid

from cyclegraph.errors import GeometryError

MEAN_ZERO_TOL = 1e-10


class GraphGeometry(BaseModel):
    """
    A loop e0 with m pendant edges attached at one internal vertex.

    T[0] is the loop length, T[1..m] the pendant edge lengths, and a the
    coupling in the quasiperiodic matching conditions.
    """

    model_config = ConfigDict(frozen=True)

    m: int = Field(..., ge=1)
    T: Tuple[float, ...]
    a: float

    @model_validator(mode="after")
    def _check(self) -> "GraphGeometry":
        if len(self.T) != self.m + 1:
            raise ValueError(f"expected {self.m + 1} edge lengths, got {len(self.T)}")
        if any(not np.isfinite(t) or t <= 0 for t in self.T):
            raise ValueError("edge lengths must be positive")
        if self.a == 0 or not np.isfinite(self.a):
            raise ValueError("vertex coupling a must be a nonzero real")
        return self

    @property
    def supports_loop_inversion(self) -> bool:
        return abs(abs(self.a) - 1.0) > 1e-12

    @property
    def total_length(self) -> float:
        return float(sum(self.T))

    def require_loop_inversion(self) -> None:
        if not self.supports_loop_inversion:
            raise GeometryError(
                f"a = {self.a} is periodic/antiperiodic; loop inversion needs a not in {{-1, 0, 1}}"
            )


def nodes_for_length(length: float, nodes_per_unit: int) -> int:
    """Node count on an edge of the given length at the configured density."""
    return max(17, int(round((nodes_per_unit - 1) * length)) + 1)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples of a function on the uniform grid x_i = i*length/(n_nodes-1)."""

    length: float
    values: np.ndarray
    mean_zero: bool = False

    def __post_init__(self):
        values = np.array(self.values, copy=True)
        if values.ndim != 1 or values.size < 2:
            raise GeometryError("grid function needs at least 2 nodes")
        if not self.length > 0:
            raise GeometryError(f"grid length must be positive, got {self.length}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "length", float(self.length))
        if self.mean_zero and not self.is_mean_zero():
            raise GeometryError("values flagged mean-zero do not integrate to zero")

    @classmethod
    def from_callable(cls, fn: Callable[[np.ndarray], np.ndarray], length: float, n_nodes: int,
                      mean_zero: bool = False) -> "GridFunction":
        x = np.linspace(0.0, length, n_nodes)
        return cls(length, np.asarray(fn(x), dtype=float) * np.ones_like(x), mean_zero)

    @classmethod
    def zeros(cls, length: float, n_nodes: int) -> "GridFunction":
        return cls(length, np.zeros(n_nodes), mean_zero=True)

    @property
    def n_nodes(self) -> int:
        return int(self.values.size)

    @property
    def step(self) -> float:
        return self.length / (self.n_nodes - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, self.length, self.n_nodes)

    @property
    def is_zero(self) -> bool:
        return not np.any(self.values)

    def integral(self) -> float:
        return float(trapezoid(self.values, dx=self.step))

    def l2_norm(self) -> float:
        return float(np.sqrt(trapezoid(np.abs(self.values) ** 2, dx=self.step)))

    def is_mean_zero(self, tol: float = MEAN_ZERO_TOL) -> bool:
        scale = float(np.max(np.abs(self.values))) if self.values.size else 0.0
        return abs(self.integral()) <= tol * self.length * max(scale, 1e-300)

    def resample(self, n_nodes: int) -> "GridFunction":
        """Linear interpolation onto another node count on the same edge."""
        x_new = np.linspace(0.0, self.length, n_nodes)
        return GridFunction(self.length, np.interp(x_new, self.x, self.values))

    def __add__(self, other: "GridFunction") -> "GridFunction":
        _check_same_grid(self, other)
        return GridFunction(self.length, self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        _check_same_grid(self, other)
        return GridFunction(self.length, self.values - other.values)

    def scaled(self, factor: float) -> "GridFunction":
        return GridFunction(self.length, factor * self.values, self.mean_zero)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GridFunction):
            return NotImplemented
        return (
            self.length == other.length
            and self.mean_zero == other.mean_zero
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


def _check_same_grid(f: GridFunction, g: GridFunction) -> None:
    if f.n_nodes != g.n_nodes or f.length != g.length:
        raise GeometryError(
            f"grid mismatch: ({f.length}, {f.n_nodes}) vs ({g.length}, {g.n_nodes})"
        )


def project_mean_zero(f: GridFunction) -> GridFunction:
    """Subtract the trapezoid-rule mean; the result carries the mean-zero flag."""
    if np.iscomplexobj(f.values):
        raise GeometryError("project_mean_zero expects a real-valued function")
    centered = GridFunction(f.length, f.values - f.integral() / f.length)
    if not centered.is_mean_zero():
        # a constant input leaves a rounding-level constant behind
        centered = GridFunction(f.length, centered.values - centered.integral() / f.length)
    return GridFunction(f.length, centered.values, mean_zero=True)


@dataclass(frozen=True, eq=False)
class PotentialSet:
    """Edge potentials q_0..q_m, q[j] on [0, T[j]], real and mean-zero."""

    geometry: GraphGeometry
    q: Tuple[GridFunction, ...] = field(default_factory=tuple)

    def __post_init__(self):
        q = tuple(self.q)
        object.__setattr__(self, "q", q)
        if len(q) != self.geometry.m + 1:
            raise GeometryError(f"expected {self.geometry.m + 1} potentials, got {len(q)}")
        for j, (fn, length) in enumerate(zip(q, self.geometry.T)):
            if abs(fn.length - length) > 1e-12 * length:
                raise GeometryError(f"q[{j}] lives on [0, {fn.length}] but T[{j}] = {length}")
            if np.iscomplexobj(fn.values):
                raise GeometryError(f"q[{j}] must be real-valued")
            if not fn.is_mean_zero():
                raise GeometryError(f"q[{j}] is not mean-zero")

    @classmethod
    def zeros(cls, geometry: GraphGeometry, nodes_per_unit: int) -> "PotentialSet":
        return cls(geometry, tuple(
            GridFunction.zeros(t, nodes_for_length(t, nodes_per_unit)) for t in geometry.T
        ))

    @classmethod
    def from_values(cls, geometry: GraphGeometry, values: Sequence[np.ndarray]) -> "PotentialSet":
        """Build from raw samples, projecting each edge to mean zero."""
        return cls(geometry, tuple(
            project_mean_zero(GridFunction(t, v)) for t, v in zip(geometry.T, values)
        ))

    @property
    def boundary(self) -> Tuple[GridFunction, ...]:
        return self.q[1:]

    def replace(self, j: int, fn: GridFunction) -> "PotentialSet":
        q = list(self.q)
        q[j] = fn
        return PotentialSet(self.geometry, tuple(q))

    def norms(self) -> np.ndarray:
        return np.array([fn.l2_norm() for fn in self.q])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PotentialSet):
            return NotImplemented
        return self.geometry == other.geometry and all(a == b for a, b in zip(self.q, other.q))

    __hash__ = None
