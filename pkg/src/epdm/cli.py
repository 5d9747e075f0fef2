"""Command-line front end: ``epdm simulate|bench|validate --config FILE``.

Exit status is 0 on success, 2 for configuration errors, 3 when the
engine detects a structural error and 4 when validation fails.
"""

import argparse
import logging
import os
import sys

from .bench import run_bench
from .config import load_config
from .errors import ConfigError, EngineError, RuleError
from .simulate import run_simulate
from .validation import run_validate

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ENGINE = 3
EXIT_VALIDATION = 4

log = logging.getLogger("epdm")


def _simulate(cfg, args):
    summary = run_simulate(cfg, args.out, args.seed)
    log.info("%d reactions, t = %g, %d live species", summary.reactions,
             summary.final_time, summary.live_species)
    return EXIT_OK


def _bench(cfg, args):
    def progress(row):
        log.info("%s N=%d rep=%s: %s s/reaction", row.engine, row.N, row.replicate,
                 "missing" if row.sec_per_reaction is None else f"{row.sec_per_reaction:.3e}")

    result = run_bench(cfg, seed=args.seed, progress=progress)
    path = args.out or cfg.output or "bench.csv"
    with open(path, "w", newline="") as fh:
        result.write_csv(fh)
    with open(os.path.splitext(path)[0] + ".meta", "w") as fh:
        for name, slope in result.slopes.items():
            fh.write(f"slope_{name} = {'undefined' if slope is None else repr(slope)}\n")
    for name, slope in result.slopes.items():
        print(f"{name}: log-log slope {'undefined' if slope is None else f'{slope:.3f}'}")
    return EXIT_OK


def _validate(cfg, args):
    report = run_validate(cfg, args.seed, args.dm_seed)
    text = report.render()
    if args.out or cfg.output:
        with open(args.out or cfg.output, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return EXIT_OK if report.passed else EXIT_VALIDATION


COMMANDS = {"simulate": _simulate, "bench": _bench, "validate": _validate}


def build_parser():
    parser = argparse.ArgumentParser(prog="epdm", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="key = value configuration file")
        p.add_argument("--seed", type=int, help="override the configured seed")
        p.add_argument("--out", help="output path")
        if name == "validate":
            p.add_argument("--dm-seed", type=int, help="seed for the direct-method replicates")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if not hasattr(args, "dm_seed"):
        args.dm_seed = None
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](cfg, args)
    except (ConfigError, RuleError, OSError) as exc:
        print(f"epdm: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EngineError as exc:
        print(f"epdm: engine error: {exc}", file=sys.stderr)
        return EXIT_ENGINE


if __name__ == "__main__":
    sys.exit(main())
