"""Command-line experiment runner.

Exit codes: 0 success, 2 configuration error, 3 solver failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from . import bubble, spectral
from .config import ConfigError, ExperimentConfig, build_config, parse_config
from .experiments import PLOTS, RUNNERS
from .output import ResultTable, emit_csv, emit_svg_scatter

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4

#: subcommand -> experiment tag
COMMANDS = {
    "table1": "table1",
    "table2": "table2",
    "sweep-distance": "distance_sweep",
    "sweep-scatter": "scatter_sweep",
    "spectrum-map": "spectrum_map",
    "formula3d": "formula3d",
    "verify-expansions": "verify_expansions",
}

SOLVER_ERRORS = (spectral.ConvergenceError, spectral.DegenerateParabolaError, bubble.BranchError,
                 bubble.ModeCollapseError, bubble.GuessDomainError, bubble.NearResonanceError)


def _add_common(p: argparse.ArgumentParser, needs_config: bool = True) -> None:
    if needs_config:
        p.add_argument("--config", required=True, help="JSON experiment configuration")
    p.add_argument("--out", help="output directory (overrides output_dir)")
    p.add_argument("--n", type=int, help="nodes per boundary (overrides n)")
    p.add_argument("--no-svg", action="store_true", help="skip the SVG figure")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="minnaert", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("table1", "table2", "sweep-distance", "sweep-scatter", "spectrum-map"):
        p = sub.add_parser(name)
        _add_common(p)
        if name in ("table2", "sweep-distance"):
            p.add_argument("--distance-convention", choices=("gap", "center"))
    p = sub.add_parser("formula3d")
    _add_common(p, needs_config=False)
    for key in ("cap", "vol", "tau", "v", "delta"):
        p.add_argument(f"--{key}", type=float, required=True)
    p = sub.add_parser("verify-expansions")
    _add_common(p, needs_config=False)
    return parser


class _CliConfigError(Exception):
    pass


def load_config(args) -> ExperimentConfig:
    experiment = COMMANDS[args.command]
    if args.command == "formula3d":
        data = {"experiment": experiment, "cap": args.cap, "vol": args.vol, "tau": args.tau,
                "v": args.v, "delta": args.delta}
        cfg = build_config(data)
    elif args.command == "verify-expansions":
        cfg = build_config({"experiment": experiment, "n": 256})
    else:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise _CliConfigError(f"cannot read config {args.config}: {exc}") from exc
        cfg = parse_config(text)
        if cfg.experiment != experiment:
            raise ConfigError(f"config experiment '{cfg.experiment}' does not match subcommand "
                              f"'{args.command}'", "experiment")
    overrides = {}
    if args.n is not None:
        overrides["n"] = args.n
    if args.out is not None:
        overrides["output_dir"] = args.out
    if getattr(args, "distance_convention", None):
        overrides["distance_convention"] = args.distance_convention
    return cfg.replace(**overrides) if overrides else cfg


def write_outputs(cfg: ExperimentConfig, table: ResultTable, svg: bool = True) -> List[Path]:
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [emit_csv(table, out_dir / f"{cfg.experiment}.csv")]
    plot = PLOTS.get(cfg.experiment)
    if svg and plot is not None and table.rows:
        x, y, log_x, log_y = plot
        try:
            paths.append(emit_svg_scatter(table, x, y, out_dir / f"{cfg.experiment}.svg",
                                          title=cfg.experiment, log_x=log_x, log_y=log_y))
        except ValueError as exc:
            logging.getLogger(__name__).warning("no figure: %s", exc)
    return paths


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args)
    except (ConfigError, _CliConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        table = RUNNERS[cfg.experiment](cfg)
    except SOLVER_ERRORS as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (bubble.ParameterError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        paths = write_outputs(cfg, table, svg=not args.no_svg)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    summary = {"experiment": cfg.experiment, "rows": len(table.rows), "config_hash": cfg.config_hash(),
               "files": [str(p) for p in paths]}
    print(json.dumps(summary))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
