"""
Stability sweeps.

Every sweep point perturbs the base potentials by epsilon, recomputes the
data, inverts them against the base problem and compares the recovered
potentials with those recovered from the base data. Points are independent
and run in a process pool; one collector writes every output file.
"""

import csv
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, List, Optional, Sequence, Union

import numpy as np

from cyclegraph.config import RunConfig, get_settings
from cyclegraph.errors import CycleGraphError
from cyclegraph.harness.forward import compute_dataset, random_potentials
from cyclegraph.harness.perturb import cmd_perturb
from cyclegraph.model import GridFunction, PotentialSet, SpectralDataset
from cyclegraph.pipeline import InversionRunner, InversionStatus, dataset_reference, run_inversion
from cyclegraph.spectral import delta_metric, remainder_norms

logger = logging.getLogger(__name__)


@dataclass
class SweepPointResult:
    """Result of one sweep point."""
    success: bool
    epsilon: float
    delta: float
    errors: List[float] = field(default_factory=list)
    ratios: List[float] = field(default_factory=list)
    potential_shift: List[float] = field(default_factory=list)
    error_message: Optional[str] = None
    elapsed: float = 0.0


@dataclass(frozen=True)
class _PointTask:
    config: RunConfig
    base: PotentialSet
    base_dataset: SpectralDataset
    base_recovered: PotentialSet
    epsilon: float
    experimental: bool


def _distances(a: PotentialSet, b: PotentialSet) -> List[float]:
    out = []
    for f, g in zip(a.q, b.q):
        values = g.values if g.n_nodes == f.n_nodes else g.resample(f.n_nodes).values
        out.append(GridFunction(f.length, f.values - values).l2_norm())
    return out


def _run_point(task: _PointTask) -> SweepPointResult:
    started = time.perf_counter()
    try:
        moved, data = cmd_perturb(task.config, task.base, task.epsilon, task.experimental, base=task.base_dataset)
        delta = delta_metric(task.base_dataset, data)
        reference = dataset_reference(task.base, task.base_dataset, task.config.grid.ode_substeps)
        state = InversionRunner(task.config).run(data, reference)
    except CycleGraphError as e:
        logger.warning("[Sweep] eps=%g failed: %s", task.epsilon, e)
        return SweepPointResult(False, task.epsilon, float("nan"), error_message=str(e),
                                elapsed=time.perf_counter() - started)

    if state["status"] == InversionStatus.FAILED:
        message = f"[{state['failed_step']}] {state['error_message']}"
        return SweepPointResult(False, task.epsilon, delta, error_message=message,
                                elapsed=time.perf_counter() - started)

    errors = _distances(state["recovered"], task.base_recovered)
    ratios = [e / delta if delta > 0 else float("nan") for e in errors]
    result = SweepPointResult(
        success=True,
        epsilon=task.epsilon,
        delta=delta,
        errors=errors,
        ratios=ratios,
        potential_shift=_distances(moved, task.base),
        elapsed=time.perf_counter() - started,
    )
    logger.info("[Sweep] eps=%g delta=%.4e errors=%s", task.epsilon, delta, np.round(errors, 8).tolist())
    return result


def _map(fn: Callable, tasks: Sequence, workers: int) -> List:
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(fn, tasks))


@dataclass
class UniformProbeResult:
    """Forward-only ratios |q_k - q_tilde_k| / (|rho^(m+1) Delta_hat| + |rho^m Delta_hat_k|), one row per pair."""
    ratios: np.ndarray
    radius: float

    @property
    def max_ratio(self) -> float:
        return float(np.max(self.ratios)) if self.ratios.size else float("nan")

    @property
    def spread(self) -> float:
        per_pair = np.max(self.ratios, axis=1) if self.ratios.size else np.zeros(0)
        return float(per_pair.max() / per_pair.min()) if per_pair.size and per_pair.min() > 0 else float("nan")


@dataclass(frozen=True)
class _PairTask:
    config: RunConfig
    base: PotentialSet
    radius: float
    seed: int


def _run_pair(task: _PairTask) -> np.ndarray:
    rng = np.random.default_rng(task.seed)
    geometry = task.base.geometry
    npu = task.config.grid.nodes_per_unit
    share = task.radius / np.sqrt(geometry.m + 1)
    first = random_potentials(geometry, npu, share * rng.uniform(0.2, 1.0), rng)
    second = random_potentials(geometry, npu, share * rng.uniform(0.2, 1.0), rng)
    d1 = compute_dataset(first, task.config).dataset
    d2 = compute_dataset(second, task.config).dataset
    norms = remainder_norms(d1, d2)
    diffs = _distances(first, second)
    return np.array([diffs[k] / (norms[0] + norms[k]) for k in range(1, geometry.m + 1)])


def uniform_probe(config: RunConfig, base: PotentialSet, pairs: int, radius: float,
                  workers: int = 1) -> UniformProbeResult:
    """Random pairs in the ball of radius `radius`; pendant edges only."""
    tasks = [_PairTask(config, base, radius, config.seed + 1 + i) for i in range(pairs)]
    rows = _map(_run_pair, tasks, workers)
    ratios = np.vstack(rows) if rows else np.zeros((0, base.geometry.m))
    result = UniformProbeResult(ratios=ratios, radius=radius)
    logger.info("[Sweep] uniform probe over %d pairs: max ratio %.4g, spread %.3g", pairs, result.max_ratio,
                result.spread)
    return result


@dataclass
class SweepSummary:
    records: List[SweepPointResult]
    slopes: List[float]
    spreads: List[float]
    uniform: Optional[UniformProbeResult] = None


def fit_slopes(records: Iterable[SweepPointResult], n_edges: int) -> List[float]:
    """Least-squares slope of log error against log delta per edge; nan with fewer than two usable points."""
    records = [r for r in records if r.success and r.delta > 0]
    slopes = []
    for j in range(n_edges):
        pts = [(r.delta, r.errors[j]) for r in records if r.errors[j] > 0]
        if len(pts) < 2:
            slopes.append(float("nan"))
            continue
        x, y = np.log(np.array(pts)).T
        slopes.append(float(np.polyfit(x, y, 1)[0]))
    return slopes


def ratio_spreads(records: Iterable[SweepPointResult], n_edges: int) -> List[float]:
    records = [r for r in records if r.success and r.delta > 0]
    out = []
    for j in range(n_edges):
        ratios = np.array([r.ratios[j] for r in records if r.ratios[j] > 0])
        out.append(float(ratios.max() / ratios.min()) if ratios.size else float("nan"))
    return out


CSV_FIELDS = ("epsilon", "delta", "success")


def csv_columns(n_edges: int) -> List[str]:
    """epsilon, delta, success, err_j, ratio_j, shift_j for j = 0..m, message."""
    return (list(CSV_FIELDS) + [f"err_{j}" for j in range(n_edges)] + [f"ratio_{j}" for j in range(n_edges)]
            + [f"shift_{j}" for j in range(n_edges)] + ["message"])


def _cell(value: float) -> str:
    return format(float(value), ".10e")


def write_sweep_csv(records: Sequence[SweepPointResult], path: Union[str, Path], n_edges: int) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(csv_columns(n_edges))
        for r in records:
            blank = [""] * n_edges
            w.writerow(
                [_cell(r.epsilon), _cell(r.delta), int(r.success)]
                + ([_cell(v) for v in r.errors] if r.success else blank)
                + ([_cell(v) for v in r.ratios] if r.success else blank)
                + ([_cell(v) for v in r.potential_shift] if r.success else blank)
                + [r.error_message or ""]
            )
    return path


def format_sweep_report(summary: SweepSummary) -> str:
    lines = ["stability sweep"]
    for r in summary.records:
        status = "ok" if r.success else f"FAILED ({r.error_message})"
        lines.append(f"eps={r.epsilon:g} delta={r.delta:.4e} {status}")
    for j, (slope, spread) in enumerate(zip(summary.slopes, summary.spreads)):
        lines.append(f"edge {j}: slope={slope:.4f} ratio_spread={spread:.4f}")
    if summary.uniform is not None:
        u = summary.uniform
        lines.append(f"uniform probe: pairs={u.ratios.shape[0]} Q={u.radius:g} max_ratio={u.max_ratio:.6g} "
                     f"spread={u.spread:.4g}")
    return "\n".join(lines) + "\n"


def cmd_stability_sweep(config: RunConfig, potentials: PotentialSet, out_dir: Union[str, Path],
                        epsilons: Optional[Sequence[float]] = None, experimental: bool = False,
                        workers: Optional[int] = None) -> SweepSummary:
    """
    Run the epsilon family and write sweep.csv, sweep.svg and report.txt.

    Failed points are recorded and the sweep continues.
    """
    from cyclegraph.harness.plot import plot_sweep

    out_dir = Path(out_dir)
    workers = get_settings().workers if workers is None else workers
    epsilons = tuple(config.epsilons if epsilons is None else epsilons)
    n_edges = potentials.geometry.m + 1

    base_dataset = compute_dataset(potentials, config).dataset
    reference = dataset_reference(potentials, base_dataset, config.grid.ode_substeps)
    base_recovered = run_inversion(base_dataset, config, reference=reference)["recovered"]

    tasks = [_PointTask(config, potentials, base_dataset, base_recovered, e, experimental) for e in epsilons]
    records = _map(_run_point, tasks, workers)
    summary = SweepSummary(records, fit_slopes(records, n_edges), ratio_spreads(records, n_edges))
    if config.uniform_pairs:
        summary.uniform = uniform_probe(config, potentials, config.uniform_pairs, config.uniform_radius, workers)

    csv_path = write_sweep_csv(records, out_dir / "sweep.csv", n_edges)
    plot_sweep(csv_path, out_dir / "sweep.svg")
    (out_dir / "report.txt").write_text(format_sweep_report(summary), encoding="utf-8")
    logger.info("[Sweep] slopes per edge %s", np.round(summary.slopes, 4).tolist())
    return summary


__all__ = [
    "SweepPointResult",
    "SweepSummary",
    "UniformProbeResult",
    "cmd_stability_sweep",
    "csv_columns",
    "fit_slopes",
    "format_sweep_report",
    "ratio_spreads",
    "uniform_probe",
    "write_sweep_csv",
]
