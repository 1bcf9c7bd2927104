"""Command-line entry point.

Exit codes: 0 ok, 2 configuration error, 3 numerical blow-up, 4 I/O error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .config import parse_config
from .dynamics import BlowUpError
from .integrator import ConfigError
from .runner import run_ensemble, run_single

EXIT_OK, EXIT_CONFIG, EXIT_BLOWUP, EXIT_IO = 0, 2, 3, 4


def _u64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="marcus-csf",
        description="Simulate the Galerkin-truncated curve-shortening flow driven by Marcus shift noise.",
    )
    p.add_argument("--config", required=True, type=Path, metavar="PATH", help="flat TOML run configuration")
    p.add_argument("--out", type=Path, default=Path("."), metavar="DIR", help="output directory (default: .)")
    p.add_argument("--seed", type=_u64, metavar="U64", help="override the configured seed")
    p.add_argument("--paths", type=_positive, metavar="N", help="run an ensemble of N independent paths")
    p.add_argument("--emit-svg", action="store_true", help="write a log-scale norm decay plot per path")
    p.add_argument("--check", action="store_true", help="compute bound and identity verdicts")
    p.add_argument("--workers", type=_positive, default=1, metavar="K", help="worker processes for ensembles")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    name = args.config.stem
    try:
        cfg = parse_config(args.config)
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        if args.paths is None:
            files = run_single(cfg, args.out, name, args.emit_svg, args.check)
        else:
            files = run_ensemble(cfg, args.paths, args.out, name, args.workers, args.emit_svg, args.check)
    except BlowUpError as exc:
        print(f"numerical blow-up: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    for f in files:
        print(f)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
