"""
cyclegraph command line.

  forward          potentials -> dataset.txt (+ potentials.txt)
  perturb          perturbed potentials and their dataset
  invert           dataset -> recovered.txt + report.txt
  stability-sweep  epsilon family -> sweep.csv, sweep.svg, report.txt
  defaults         print the default run configuration
  selftest         reduced-resolution checks, one PASS/FAIL line each
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from cyclegraph.config import RunConfig, get_settings, load_run_config
from cyclegraph.errors import CycleGraphError
from cyclegraph.model import PotentialSet, load_potentials, save_dataset, save_potentials

logger = logging.getLogger("cyclegraph")


def _epsilons(text: str) -> List[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'")
    if any(v < 0 for v in values):
        raise argparse.ArgumentTypeError("epsilon must be non-negative")
    return values


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cyclegraph", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="TOML or JSON run configuration")
    common.add_argument("--out", type=Path, default=None, help="Output directory")
    common.add_argument("--seed", type=int, default=None, help="Overrides the configured seed")

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("--potentials", type=Path, default=None,
                        help="Potentials file; default builds them from the configuration")

    sub.add_parser("forward", parents=[common, source], help="compute a spectral dataset")

    p = sub.add_parser("perturb", parents=[common, source], help="perturb potentials and recompute data")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--experimental", action="store_true", help="jitter eigenvalues instead of potentials")

    p = sub.add_parser("invert", parents=[common], help="recover potentials from a dataset")
    p.add_argument("dataset", type=Path)
    p.add_argument("--truth", type=Path, default=None, help="Potentials file for the error report")

    p = sub.add_parser("stability-sweep", parents=[common, source], help="run a stability sweep")
    p.add_argument("--epsilon", type=_epsilons, default=None, help="Comma-separated epsilon list")
    p.add_argument("--experimental", action="store_true")
    p.add_argument("--workers", type=int, default=None)

    sub.add_parser("defaults", help="print the default configuration")
    sub.add_parser("selftest", help="run quick self-checks")
    return ap


def _config(args) -> RunConfig:
    config = load_run_config(args.config)
    if args.seed is not None:
        config = config.model_copy(update={"seed": args.seed})
    return config


def _potentials(args, config: RunConfig) -> PotentialSet:
    from cyclegraph.harness.forward import build_potentials

    return load_potentials(args.potentials) if args.potentials else build_potentials(config)


def _run(args) -> int:
    if args.command == "defaults":
        print(RunConfig().model_dump_json(indent=2))
        return 0
    if args.command == "selftest":
        from cyclegraph.harness.selftest import run_selftest

        return run_selftest()

    config = _config(args)
    out = args.out or Path(get_settings().output_dir)

    if args.command == "forward":
        from cyclegraph.harness.forward import cmd_forward

        path = cmd_forward(config, _potentials(args, config), out)
        print(path)
    elif args.command == "perturb":
        from cyclegraph.harness.perturb import cmd_perturb

        moved, dataset = cmd_perturb(config, _potentials(args, config), args.epsilon, args.experimental)
        save_potentials(moved, out / "potentials.txt")
        print(save_dataset(dataset, out / "dataset.txt"))
    elif args.command == "invert":
        from cyclegraph.harness.invert import cmd_invert
        from cyclegraph.pipeline import format_report

        truth = load_potentials(args.truth) if args.truth else None
        report = cmd_invert(args.dataset, config, out, truth)
        print(format_report(report), end="")
    elif args.command == "stability-sweep":
        from cyclegraph.harness.sweep import cmd_stability_sweep, format_sweep_report

        summary = cmd_stability_sweep(config, _potentials(args, config), out, args.epsilon, args.experimental,
                                      args.workers)
        print(format_sweep_report(summary), end="")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = get_settings()
    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return _run(args)
    except CycleGraphError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
