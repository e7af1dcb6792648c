"""Command-line entry point.

Subcommands: ``run``, ``validate-config``, ``list-experiments``, ``version``.
Output directory resolution: ``--out`` flag, else the ``GGE_OUT_DIR``
environment variable, else ``out_dir`` from the config, else ``./results``.
"""

import argparse
import os
import sys

from . import __version__
from .errors import ParameterError
from .harness import EXPERIMENTS, load_config, run_experiment

OUT_DIR_ENV = "GGE_OUT_DIR"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gge",
        description="Entanglement-complexity sweeps over spin-chain models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the experiment described by a config file")
    run.add_argument("--config", required=True, help="path to a YAML config file")
    run.add_argument("--workers", type=int, default=1,
                     help="number of worker processes (default 1)")
    run.add_argument("--out", default=None, help="output directory for record files")
    run.add_argument("--resume", action="store_true",
                     help="skip tasks already journaled in the output directory")

    val = sub.add_parser("validate-config", help="check a config file and exit")
    val.add_argument("--config", required=True, help="path to a YAML config file")

    sub.add_parser("list-experiments", help="list available experiment names")
    sub.add_parser("version", help="print the package version")
    return parser


def _load(path: str):
    try:
        return load_config(path)
    except FileNotFoundError:
        print(f"error: config file not found: {path}", file=sys.stderr)
        raise SystemExit(2)
    except ParameterError as exc:
        print(f"error: invalid config {path}: {exc}", file=sys.stderr)
        raise SystemExit(2)
    except Exception as exc:  # e.g. YAML syntax errors
        print(f"error: could not parse {path}: {exc}", file=sys.stderr)
        raise SystemExit(2)


def _resolve_out_dir(args, cfg) -> str:
    if args.out:
        return args.out
    env = os.environ.get(OUT_DIR_ENV)
    if env:
        return env
    if cfg.out_dir:
        return cfg.out_dir
    return "results"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "version":
        print(__version__)
        return 0
    if args.command == "list-experiments":
        for name in EXPERIMENTS:
            print(name)
        return 0
    cfg = _load(args.config)
    if args.command == "validate-config":
        print(f"ok: {cfg.experiment} "
              f"({len(cfg.sizes)} sizes, chi_list={list(cfg.chi_list)})")
        return 0
    out_dir = _resolve_out_dir(args, cfg)
    if args.workers < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return 2
    try:
        manifest = run_experiment(cfg, out_dir, workers=args.workers,
                                  resume=args.resume)
    except Exception as exc:
        print(f"error: experiment failed: {exc}", file=sys.stderr)
        print(f"completed task records are preserved in {out_dir!r}; "
              "re-run with --resume to continue", file=sys.stderr)
        return 1
    print(f"wrote {manifest['records']} records to {out_dir} "
          f"(config {manifest['config_sha256'][:12]})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
