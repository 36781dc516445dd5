"""Command-line interface.

    robustids preprocess --schema synthetic --out runs/demo
    robustids train      --out runs/demo
    robustids attack     --out runs/demo
    robustids advtrain   --out runs/demo --parallel 4
    robustids report     --out runs/demo

Exit codes: 2 unparseable input, 3 missing processed splits/artifacts,
4 checkpoint mismatch, 5 nothing to aggregate, 1 other errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from ..errors import ParseError, RobustIdsError
from .config import load_config
from .runner import (
    CheckpointMismatchError,
    EmptyReportError,
    MissingArtifactError,
    cmd_advtrain,
    cmd_attack,
    cmd_preprocess,
    cmd_report,
    cmd_train,
)

EXIT_PARSE = 2
EXIT_MISSING = 3
EXIT_MISMATCH = 4
EXIT_EMPTY = 5


def _common_flags(parser):
    parser.add_argument("--config", help="JSON experiment config")
    parser.add_argument("--seed", type=int, help="global seed override")
    parser.add_argument("--out", help="output directory override")
    parser.add_argument("--parallel", type=int, help="max concurrent grid cells")
    parser.add_argument("--dataset", help="CSV dataset path override")
    parser.add_argument(
        "--schema",
        choices=["unsw", "nslkdd", "generic", "synthetic"],
        help="dataset schema (synthetic selects the built-in benchmark)",
    )
    parser.add_argument("--family", choices=["ann", "cnn", "rnn"], help="single model family")


def build_parser():
    parser = argparse.ArgumentParser(prog="robustids", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("preprocess", "encode/scale/split a dataset and run feature selection"),
        ("train", "train clean baselines and report test metrics"),
        ("attack", "evaluate every configured attack against the baselines"),
        ("advtrain", "min-max harden models per (dataset, family, attack) cell"),
        ("report", "aggregate evaluation reports into one summary table"),
    ]:
        p = sub.add_parser(name, help=help_text)
        _common_flags(p)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    overrides = {
        "seed": args.seed,
        "out": args.out,
        "parallel": args.parallel,
        "dataset": args.dataset,
        "schema": args.schema,
        "family": args.family,
    }
    try:
        cfg = load_config(args.config, overrides)
        if args.command == "preprocess":
            result = cmd_preprocess(cfg)
        elif args.command == "train":
            result = cmd_train(cfg)
        elif args.command == "attack":
            result = cmd_attack(cfg)
        elif args.command == "advtrain":
            result = cmd_advtrain(cfg)
        else:
            result = cmd_report(cfg.out_dir)
        print(json.dumps({"command": args.command, "results": len(result)}))
        return 0
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except MissingArtifactError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except CheckpointMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except EmptyReportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except RobustIdsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
