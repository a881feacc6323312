"""Log-log plot of recovery error against the data distance, read back from sweep.csv."""

import csv
from pathlib import Path
from typing import Dict, List, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# fixed ids and no timestamp, so equal CSVs give equal SVGs
plt.rcParams["svg.hashsalt"] = "cyclegraph"


def read_sweep_csv(path: Union[str, Path]) -> List[Dict[str, str]]:
    with Path(path).open(newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


def plot_sweep(csv_path: Union[str, Path], svg_path: Union[str, Path]) -> Path:
    rows = [r for r in read_sweep_csv(csv_path) if r["success"] == "1"]
    edges = sorted(int(k.split("_")[1]) for k in (rows[0].keys() if rows else []) if k.startswith("err_"))

    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for j in edges:
        pts = np.array([(float(r["delta"]), float(r[f"err_{j}"])) for r in rows])
        pts = pts[(pts[:, 0] > 0) & (pts[:, 1] > 0)] if pts.size else pts
        if not pts.size:
            continue
        label = f"q_{j}"
        if len(pts) >= 2:
            slope, _ = np.polyfit(np.log(pts[:, 0]), np.log(pts[:, 1]), 1)
            label += f" (slope {slope:.2f})"
        ax.loglog(pts[:, 0], pts[:, 1], "o-", label=label)

    ax.set_xlabel("delta (remainder distance)")
    ax.set_ylabel("|q_hat_j|")
    ax.set_title("Recovery error against data distance")
    ax.grid(True, which="both", alpha=0.3)
    if edges and rows:
        ax.legend()

    svg_path = Path(svg_path)
    svg_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(svg_path, format="svg", bbox_inches="tight", metadata={"Date": None})
    plt.close(fig)
    return svg_path


__all__ = ["plot_sweep", "read_sweep_csv"]
