"""
Text storage for spectral datasets and potential sets.

Dataset layout (one record per line, blank lines and '#' comments ignored):

    cyclegraph-spectral v1
    GEOMETRY
    m = 2
    a = 2
    T[3]
    1
    ...
    EIGENVALUES
    lambda_main[57]
    ...
    lambda_k.1[55]
    ...
    SIGMA
    sigma[40]
    ...
    REMAINDERS              (optional)
    rho_grid[4001]
    ...
    kappa_main[4001]
    ...
    kappa_k.1[4001]
    ...

Floats are written with 17 significant digits, which round-trips doubles
exactly.
"""

import logging
import re
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np
from pydantic import ValidationError

from cyclegraph.errors import DatasetParseError, DatasetValidationError, GeometryError
from cyclegraph.model.dataset import SpectralDataset
from cyclegraph.model.geometry import GraphGeometry, GridFunction, PotentialSet

logger = logging.getLogger(__name__)

DATASET_HEADER = "cyclegraph-spectral v1"
POTENTIALS_HEADER = "cyclegraph-potentials v1"

_ARRAY_RE = re.compile(r"^([A-Za-z_][\w.]*)\[(\d+)\]$")
_SCALAR_RE = re.compile(r"^([A-Za-z_][\w.]*)\s*=\s*(\S+)$")

PathLike = Union[str, Path]


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _array_lines(key: str, values) -> List[str]:
    values = np.asarray(values)
    if values.dtype.kind in "iu":
        body = [str(int(v)) for v in values]
    else:
        body = [_fmt(v) for v in values]
    return [f"{key}[{values.size}]"] + body


def _geometry_lines(geometry: GraphGeometry) -> List[str]:
    return ["GEOMETRY", f"m = {geometry.m}", f"a = {_fmt(geometry.a)}"] + _array_lines("T", geometry.T)


def _read_text(path: PathLike) -> str:
    raw = Path(path).read_bytes()
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as e:
        line_no = raw[: e.start].count(b"\n") + 1
        raise DatasetParseError("encoding", line_no, f"not UTF-8 text (byte 0x{raw[e.start]:02x})") from None


class _Reader:
    """Line cursor that remembers 1-based line numbers for error messages."""

    def __init__(self, text: str):
        self._lines: List[Tuple[int, str]] = [
            (i + 1, line.strip())
            for i, line in enumerate(text.splitlines())
            if line.strip() and not line.strip().startswith("#")
        ]
        self._pos = 0

    @property
    def line(self) -> int:
        if self._pos < len(self._lines):
            return self._lines[self._pos][0]
        return self._lines[-1][0] + 1 if self._lines else 1

    def peek(self) -> str:
        return self._lines[self._pos][1] if self._pos < len(self._lines) else ""

    def next(self, field: str) -> Tuple[int, str]:
        if self._pos >= len(self._lines):
            raise DatasetParseError(field, self.line, "unexpected end of file")
        item = self._lines[self._pos]
        self._pos += 1
        return item

    def expect(self, token: str) -> int:
        line_no, text = self.next(token)
        if text != token:
            raise DatasetParseError(token, line_no, f"expected '{token}', found '{text}'")
        return line_no

    def scalar(self, key: str) -> Tuple[int, str]:
        line_no, text = self.next(key)
        match = _SCALAR_RE.match(text)
        if not match or match.group(1) != key:
            raise DatasetParseError(key, line_no, f"expected '{key} = <value>', found '{text}'")
        return line_no, match.group(2)

    def array(self, key: str, kind=float) -> Tuple[int, np.ndarray]:
        line_no, text = self.next(key)
        match = _ARRAY_RE.match(text)
        if not match or match.group(1) != key:
            raise DatasetParseError(key, line_no, f"expected '{key}[<count>]', found '{text}'")
        count = int(match.group(2))
        out = np.empty(count, dtype=np.int64 if kind is int else float)
        for i in range(count):
            value_line, raw = self.next(key)
            try:
                out[i] = kind(raw)
            except ValueError:
                raise DatasetParseError(key, value_line, f"cannot parse '{raw}' as {kind.__name__}")
            if kind is float and not np.isfinite(out[i]):
                raise DatasetValidationError(key, value_line, f"value {i + 1} is not finite")
        return line_no, out

    def at_end(self) -> bool:
        return self._pos >= len(self._lines)


def _read_geometry(reader: _Reader) -> GraphGeometry:
    start = reader.expect("GEOMETRY")
    m_line, m_raw = reader.scalar("m")
    a_line, a_raw = reader.scalar("a")
    try:
        m = int(m_raw)
    except ValueError:
        raise DatasetParseError("m", m_line, f"cannot parse '{m_raw}' as int")
    try:
        a = float(a_raw)
    except ValueError:
        raise DatasetParseError("a", a_line, f"cannot parse '{a_raw}' as float")
    _, lengths = reader.array("T")
    try:
        return GraphGeometry(m=m, T=tuple(float(t) for t in lengths), a=a)
    except ValidationError as e:
        raise DatasetParseError("GEOMETRY", start, e.errors()[0]["msg"])


def _check_sorted(name: str, line_no: int, values: np.ndarray) -> None:
    if np.any(np.diff(values) < 0):
        raise DatasetValidationError(name, line_no, "eigenvalues not sorted ascending")


def save_dataset(dataset: SpectralDataset, path: PathLike) -> Path:
    """Write a dataset in the documented text format."""
    lines = [DATASET_HEADER] + _geometry_lines(dataset.geometry)
    lines.append("EIGENVALUES")
    lines += _array_lines("lambda_main", dataset.lambda_main)
    for k, values in enumerate(dataset.lambda_k, start=1):
        lines += _array_lines(f"lambda_k.{k}", values)
    lines.append("SIGMA")
    lines += _array_lines("sigma", dataset.sigma.astype(np.int64))
    if dataset.has_remainders:
        lines.append("REMAINDERS")
        lines += _array_lines("rho_grid", dataset.remainder_grid)
        lines += _array_lines("kappa_main", dataset.kappa_main)
        for k, values in enumerate(dataset.kappa_k, start=1):
            lines += _array_lines(f"kappa_k.{k}", values)

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info("[Dataset] wrote %s (%d + %s eigenvalues)", path, dataset.lambda_main.size,
                [v.size for v in dataset.lambda_k])
    return path


def load_dataset(path: PathLike) -> SpectralDataset:
    """Read a dataset; malformed content raises DatasetParseError naming field and line."""
    reader = _Reader(_read_text(path))
    line_no, header = reader.next("header")
    if header != DATASET_HEADER:
        raise DatasetParseError("header", line_no, f"expected '{DATASET_HEADER}'")

    geometry = _read_geometry(reader)

    reader.expect("EIGENVALUES")
    main_line, lambda_main = reader.array("lambda_main")
    _check_sorted("lambda_main", main_line, lambda_main)
    lambda_k = []
    for k in range(1, geometry.m + 1):
        k_line, values = reader.array(f"lambda_k.{k}")
        _check_sorted(f"lambda_k.{k}", k_line, values)
        lambda_k.append(values)

    reader.expect("SIGMA")
    sigma_line, sigma = reader.array("sigma", kind=int)
    bad = np.flatnonzero(np.abs(sigma) > 1)
    if bad.size:
        raise DatasetValidationError("sigma", sigma_line + 1 + int(bad[0]), "sigma out of range")

    # eigenvalues-only datasets stop here
    grid, kappa_main = np.empty(0), np.empty(0)
    kappa_k = [np.empty(0) for _ in range(geometry.m)]
    if not reader.at_end():
        reader.expect("REMAINDERS")
        _, grid = reader.array("rho_grid")
        kappa_line, kappa_main = reader.array("kappa_main")
        if kappa_main.size != grid.size:
            raise DatasetValidationError("kappa_main", kappa_line, "length differs from rho_grid")
        kappa_k = []
        for k in range(1, geometry.m + 1):
            k_line, values = reader.array(f"kappa_k.{k}")
            if values.size != grid.size:
                raise DatasetValidationError(f"kappa_k.{k}", k_line, "length differs from rho_grid")
            kappa_k.append(values)

    if not reader.at_end():
        raise DatasetParseError("trailer", reader.line, f"unexpected content '{reader.peek()}'")

    return SpectralDataset(
        geometry=geometry,
        lambda_main=lambda_main,
        lambda_k=tuple(lambda_k),
        sigma=sigma,
        remainder_grid=grid,
        kappa_main=kappa_main,
        kappa_k=tuple(kappa_k),
    )


def save_potentials(potentials: PotentialSet, path: PathLike) -> Path:
    lines = [POTENTIALS_HEADER] + _geometry_lines(potentials.geometry) + ["POTENTIALS"]
    for j, fn in enumerate(potentials.q):
        lines += _array_lines(f"q.{j}", fn.values)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def load_potentials(path: PathLike) -> PotentialSet:
    reader = _Reader(_read_text(path))
    line_no, header = reader.next("header")
    if header != POTENTIALS_HEADER:
        raise DatasetParseError("header", line_no, f"expected '{POTENTIALS_HEADER}'")
    geometry = _read_geometry(reader)
    reader.expect("POTENTIALS")
    edges = []
    for j in range(geometry.m + 1):
        q_line, values = reader.array(f"q.{j}")
        try:
            edges.append(GridFunction(geometry.T[j], values, mean_zero=True))
        except GeometryError as e:
            raise DatasetValidationError(f"q.{j}", q_line, str(e))
    return PotentialSet(geometry, tuple(edges))

