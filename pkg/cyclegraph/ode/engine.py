"""
Fundamental solutions of -y'' + q(x) y = lambda y on one edge.

S(x, lambda) and C(x, lambda) satisfy S(0) = C'(0) = 0 and S'(0) = C(0) = 1.
Both are propagated together as the 2x2 matrix Y = [[C, S], [C', S']] with a
fixed-step fourth-order exponential scheme: on every step the linearly
interpolated potential is sampled at the two Gauss points and the step map
is the exact exponential of

    Omega = (h/2)(A1 + A2) + (sqrt(3)/12) h^2 [A2, A1],   A = [[0, 1], [q - lambda, 0]].

Omega is traceless, so det Y (the Wronskian C S' - C' S) stays 1 to rounding,
and constant potentials (in particular q = 0) are integrated exactly.
All routines are vectorised over an array of lambda values.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from cyclegraph.errors import OverflowGuardError
from cyclegraph.model.geometry import GridFunction

# exp(700) is still inside double range
OVERFLOW_BUDGET = 700.0

_GAUSS_OFFSET = np.sqrt(3.0) / 6.0
_COMMUTATOR = np.sqrt(3.0) / 12.0
_SERIES_SWITCH = 1e-2


@dataclass(frozen=True)
class EndpointData:
    """S, S', C, C' at x = T, shaped like the lambda input."""

    S: np.ndarray
    Sp: np.ndarray
    C: np.ndarray
    Cp: np.ndarray

    def wronskian_defect(self) -> np.ndarray:
        return np.abs(self.C * self.Sp - self.Cp * self.S - 1.0)


@dataclass(frozen=True)
class SolutionTrace:
    """Solution values on a set of nodes; arrays are (n_nodes,) + lambda shape."""

    grid: np.ndarray
    S_vals: np.ndarray
    Sp_vals: np.ndarray
    C_vals: Optional[np.ndarray] = None
    Cp_vals: Optional[np.ndarray] = None


def check_overflow(lam: np.ndarray, length: float, budget: float = OVERFLOW_BUDGET) -> None:
    """Reject lambda values whose solutions would leave double range on [0, length]."""
    growth = np.abs(np.sqrt(np.asarray(lam, dtype=complex)).imag) * length
    if growth.size and float(np.max(growth)) > budget:
        raise OverflowGuardError(float(np.max(growth)), budget)


def _ch_sh(z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """cosh(sqrt z) and sinh(sqrt z)/sqrt z, both entire in z."""
    w = np.sqrt(z)
    ch = np.cosh(w)
    small = np.abs(z) < _SERIES_SWITCH
    with np.errstate(invalid="ignore", divide="ignore"):
        sh = np.where(small, 1.0 + z / 6.0 + z * z / 120.0 + z ** 3 / 5040.0, np.sinh(w) / w)
    return ch, sh


def _dsh(z: np.ndarray, ch: np.ndarray, sh: np.ndarray) -> np.ndarray:
    """d/dz of sinh(sqrt z)/sqrt z."""
    small = np.abs(z) < _SERIES_SWITCH
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(
            small,
            1.0 / 6.0 + z / 60.0 + z * z / 1680.0 + z ** 3 / 90720.0,
            (ch - sh) / (2.0 * z),
        )


class _State:
    """Y and optionally dY/dlambda for a batch of lambda values."""

    def __init__(self, size: int, derivative: bool):
        self.C = np.ones(size, dtype=complex)
        self.S = np.zeros(size, dtype=complex)
        self.Cp = np.zeros(size, dtype=complex)
        self.Sp = np.ones(size, dtype=complex)
        self.derivative = derivative
        if derivative:
            self.dC = np.zeros(size, dtype=complex)
            self.dS = np.zeros(size, dtype=complex)
            self.dCp = np.zeros(size, dtype=complex)
            self.dSp = np.zeros(size, dtype=complex)

    def step(self, lam: np.ndarray, h: float, c: float, qbar: float) -> None:
        shift = qbar - lam
        z = c * c + h * h * shift
        ch, sh = _ch_sh(z)
        e11 = ch + sh * c
        e12 = sh * h
        e21 = sh * h * shift
        e22 = ch - sh * c

        if self.derivative:
            g = -0.5 * h * h * sh
            p = -h * h * _dsh(z, ch, sh)
            d11 = g + p * c
            d12 = p * h
            d21 = p * h * shift - sh * h
            d22 = g - p * c
            dC = d11 * self.C + d12 * self.Cp + e11 * self.dC + e12 * self.dCp
            dCp = d21 * self.C + d22 * self.Cp + e21 * self.dC + e22 * self.dCp
            dS = d11 * self.S + d12 * self.Sp + e11 * self.dS + e12 * self.dSp
            dSp = d21 * self.S + d22 * self.Sp + e21 * self.dS + e22 * self.dSp
            self.dC, self.dCp, self.dS, self.dSp = dC, dCp, dS, dSp

        C = e11 * self.C + e12 * self.Cp
        Cp = e21 * self.C + e22 * self.Cp
        S = e11 * self.S + e12 * self.Sp
        Sp = e21 * self.S + e22 * self.Sp
        self.C, self.Cp, self.S, self.Sp = C, Cp, S, Sp


def zero_potential_endpoints(lam, length: float) -> EndpointData:
    """sin(rho T)/rho, cos(rho T), cos(rho T), -rho sin(rho T) as entire functions of lambda."""
    z = -np.asarray(lam, dtype=complex) * length * length
    ch, sh = _ch_sh(z)
    S = length * sh
    return EndpointData(S=S, Sp=ch, C=ch, Cp=-np.asarray(lam, dtype=complex) * S)


def _breakpoints(q: GridFunction, substeps: int, stops: Optional[np.ndarray]) -> np.ndarray:
    fine = np.linspace(0.0, q.length, (q.n_nodes - 1) * substeps + 1)
    if stops is None:
        return fine
    return np.union1d(fine, np.clip(stops, 0.0, q.length))


def _step_coefficients(q: GridFunction, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    h = np.diff(points)
    left = points[:-1] + h * (0.5 - _GAUSS_OFFSET)
    right = points[:-1] + h * (0.5 + _GAUSS_OFFSET)
    x = q.x
    q1 = np.interp(left, x, q.values)
    q2 = np.interp(right, x, q.values)
    return h, _COMMUTATOR * h * h * (q1 - q2), 0.5 * (q1 + q2)


def _closed_form(lam: np.ndarray, x: float, derivative: bool) -> _State:
    """Exact propagator from 0 to x for the zero potential."""
    state = _State(lam.size, derivative)
    if x > 0:
        state.step(lam, x, 0.0, 0.0)
    return state


def _propagate(q: GridFunction, lam: np.ndarray, substeps: int, derivative: bool,
               stops: Optional[np.ndarray] = None, with_c: bool = True):
    """
    Run the scheme over [0, T].

    Returns the final state and, when stops is given, a dict of recorded
    arrays of shape (len(stops), len(lam)).
    """
    if q.is_zero:
        final = _closed_form(lam, q.length, derivative)
        if stops is None:
            return final, None
        records = {key: np.empty((stops.size, lam.size), dtype=complex) for key in ("S", "Sp", "C", "Cp")}
        for row, x in enumerate(np.clip(stops, 0.0, q.length)):
            st = _closed_form(lam, float(x), False)
            records["S"][row], records["Sp"][row] = st.S, st.Sp
            records["C"][row], records["Cp"][row] = st.C, st.Cp
        return final, records

    points = _breakpoints(q, substeps, stops)
    h, c, qbar = _step_coefficients(q, points)
    state = _State(lam.size, derivative)

    records = None
    row_of = None
    if stops is not None:
        keys = ("S", "Sp", "C", "Cp") if with_c else ("S", "Sp")
        records = {key: np.empty((stops.size, lam.size), dtype=complex) for key in keys}
        idx = np.searchsorted(points, np.clip(stops, 0.0, q.length))
        row_of = {}
        for row, i in enumerate(idx):
            row_of.setdefault(int(i), []).append(row)

    def record(i: int) -> None:
        for row in row_of.get(i, ()):
            for key in records:
                records[key][row] = getattr(state, key)

    if records is not None:
        record(0)
    for k in range(h.size):
        state.step(lam, float(h[k]), float(c[k]), float(qbar[k]))
        if records is not None:
            record(k + 1)
    return state, records


def _as_batch(lam) -> Tuple[np.ndarray, Tuple[int, ...]]:
    arr = np.asarray(lam, dtype=complex)
    return arr.reshape(-1), arr.shape


def integrate_fundamental(q: GridFunction, lam, substeps: int = 1,
                          budget: float = OVERFLOW_BUDGET) -> EndpointData:
    """
    Endpoint values S(T), S'(T), C(T), C'(T).

    Args:
        q: Potential on [0, T]
        lam: Spectral parameter, scalar or array
        substeps: Steps per grid interval
        budget: Overflow guard on |Im rho|*T

    Returns:
        EndpointData shaped like lam
    """
    flat, shape = _as_batch(lam)
    check_overflow(flat, q.length, budget)
    state, _ = _propagate(q, flat, substeps, derivative=False)
    return EndpointData(
        S=state.S.reshape(shape),
        Sp=state.Sp.reshape(shape),
        C=state.C.reshape(shape),
        Cp=state.Cp.reshape(shape),
    )


def lambda_derivative(q: GridFunction, lam, substeps: int = 1,
                      budget: float = OVERFLOW_BUDGET) -> EndpointData:
    """d/dlambda of (S, S', C, C') at x = T via the variational system."""
    flat, shape = _as_batch(lam)
    check_overflow(flat, q.length, budget)
    state, _ = _propagate(q, flat, substeps, derivative=True)
    return EndpointData(
        S=state.dS.reshape(shape),
        Sp=state.dSp.reshape(shape),
        C=state.dC.reshape(shape),
        Cp=state.dCp.reshape(shape),
    )


def integrate_with_derivative(q: GridFunction, lam, substeps: int = 1,
                              budget: float = OVERFLOW_BUDGET) -> Tuple[EndpointData, EndpointData]:
    flat, shape = _as_batch(lam)
    check_overflow(flat, q.length, budget)
    st, _ = _propagate(q, flat, substeps, derivative=True)
    values = EndpointData(st.S.reshape(shape), st.Sp.reshape(shape), st.C.reshape(shape), st.Cp.reshape(shape))
    derivs = EndpointData(st.dS.reshape(shape), st.dSp.reshape(shape), st.dC.reshape(shape), st.dCp.reshape(shape))
    return values, derivs


def solution_trace(q: GridFunction, lam, grid=None, substeps: int = 1, with_c: bool = False,
                   budget: float = OVERFLOW_BUDGET) -> SolutionTrace:
    """
    S and S' (optionally C and C') at every node of grid.

    Args:
        q: Potential on [0, T]
        lam: Spectral parameter, scalar or array
        grid: Nodes in [0, T]; defaults to the potential's own grid
        with_c: Also record C and C'

    Returns:
        SolutionTrace with arrays of shape (len(grid),) + lam shape
    """
    flat, shape = _as_batch(lam)
    check_overflow(flat, q.length, budget)
    nodes = q.x if grid is None else np.asarray(grid, dtype=float).reshape(-1)
    _, rec = _propagate(q, flat, substeps, derivative=False, stops=nodes, with_c=with_c)
    out_shape = (nodes.size,) + shape
    return SolutionTrace(
        grid=nodes,
        S_vals=rec["S"].reshape(out_shape),
        Sp_vals=rec["Sp"].reshape(out_shape),
        C_vals=rec["C"].reshape(out_shape) if with_c else None,
        Cp_vals=rec["Cp"].reshape(out_shape) if with_c else None,
    )
