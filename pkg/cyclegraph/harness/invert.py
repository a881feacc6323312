"""Inverse command: dataset file in, potentials and report out."""

import logging
from pathlib import Path
from typing import Optional, Union

from cyclegraph.config import RunConfig
from cyclegraph.model import PotentialSet, load_dataset, save_potentials
from cyclegraph.pipeline import InversionReport, format_report, run_inversion

logger = logging.getLogger(__name__)


def cmd_invert(dataset_path: Union[str, Path], config: RunConfig, out_dir: Union[str, Path],
               truth: Optional[PotentialSet] = None) -> InversionReport:
    """
    Invert a stored dataset against the zero-potential reference.

    Writes recovered.txt (potentials file) and report.txt into out_dir.
    """
    out_dir = Path(out_dir)
    dataset = load_dataset(dataset_path)
    state = run_inversion(dataset, config, truth=truth)
    report = state["report"]
    save_potentials(report.recovered, out_dir / "recovered.txt")
    (out_dir / "report.txt").write_text(format_report(report), encoding="utf-8")
    logger.info("[Invert] wrote %s", out_dir)
    return report
