"""Command-line entry point.

    brainising run <config> [--seed N] [--out DIR] [--workers K]
    brainising validate <config>
    brainising list-experiments

Output directory precedence: ``--out``, then the config's ``out`` key, then
``$BRAINISING_OUT/<experiment>``, then ``runs/<experiment>``.
Exit codes: 0 success, 1 invalid config, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from pathlib import Path

from ..errors import ConfigError
from .config import EXPERIMENTS, bundled_configs, load_config
from .experiments import run_experiment

OUT_ENV = "BRAINISING_OUT"
log = logging.getLogger("brainising")


def _resolve_config(name: str) -> Path:
    p = Path(name)
    if p.exists():
        return p
    bundled = bundled_configs()
    if name in bundled:
        return bundled[name]
    raise FileNotFoundError(f"no config file {name!r} and no bundled config of that name")


def _output_dir(args, cfg) -> Path:
    if args.out:
        return Path(args.out)
    if cfg.out:
        return Path(cfg.out)
    return Path(os.environ.get(OUT_ENV, "runs")) / cfg.experiment


def _cmd_run(args) -> int:
    try:
        cfg = load_config(_resolve_config(args.config))
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 1
    except (OSError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    cfg = cfg.with_overrides(seed=args.seed)
    out = _output_dir(args, cfg)
    log.info("running %s (config %s) into %s", cfg.experiment, cfg.hash(), out)
    t0 = time.perf_counter()
    try:
        summary = run_experiment(cfg, out, workers=args.workers)
    except Exception as exc:  # noqa: BLE001 - any failure maps to exit code 2
        log.debug("run failed", exc_info=True)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    for k, v in summary.items():
        print(f"{k}: {v}")
    log.info("done in %.1f s", time.perf_counter() - t0)
    return 0


def _cmd_validate(args) -> int:
    try:
        path = _resolve_config(args.config)
        load_config(path)
    except ConfigError as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"{path}: ok")
    return 0


def _cmd_list(args) -> int:
    bundled = bundled_configs()
    for name in EXPERIMENTS:
        path = bundled.get(name)
        print(f"{name:22s} {path if path else '-'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="brainising", description="Noisy-oracle Boltzmann learning experiments")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run an experiment config")
    r.add_argument("config", help="path to a YAML config or the name of a bundled one")
    r.add_argument("--seed", type=int, help="run only this seed")
    r.add_argument("--out", help="output directory")
    r.add_argument("--workers", type=int, default=1, help="worker processes for independent jobs")
    r.set_defaults(func=_cmd_run)
    v = sub.add_parser("validate", help="check a config without running it")
    v.add_argument("config")
    v.set_defaults(func=_cmd_validate)
    ls = sub.add_parser("list-experiments", help="list experiments and bundled configs")
    ls.set_defaults(func=_cmd_list)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(message)s")
    if getattr(args, "workers", 1) < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return 1
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
