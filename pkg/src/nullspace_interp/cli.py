"""Command line entry point: ``nullspace-interp VERB --config PATH [...]``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from .config import load_config
from .csvio import convert_wide
from .errors import NullspaceError
from .runner import ALL_STEPS, run, synth

OUT_ENV = "NULLSPACE_INTERP_OUT"

VERB_STEPS = {
    "fit": ("fit",),
    "cv": ("cv",),
    "nullspace": ("nullspace",),
    "report": ("report",),
    "snr": ("snr",),
    "run": ALL_STEPS,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nullspace-interp", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in (*VERB_STEPS, "synth"):
        p = sub.add_parser(verb)
        p.add_argument("--config", required=True, type=Path)
        p.add_argument("--seed", type=int)
        p.add_argument("--out", type=Path)
        p.add_argument("--scheme", choices=("center", "zscore"))
    conv = sub.add_parser("convert", help="rewrite a wide CSV in the canonical layout")
    conv.add_argument("input", type=Path)
    conv.add_argument("--out", required=True, type=Path)
    conv.add_argument("--response-out", type=Path)
    conv.add_argument("--id-column", default="sample_id")
    conv.add_argument("--response-column")
    conv.add_argument("--domain-row", type=int)
    return parser


def _out_dir(args, cfg) -> Path:
    if args.out is not None:
        return args.out
    env = os.environ.get(OUT_ENV)
    if env:
        return Path(env)
    return cfg.output_dir


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.verb == "convert":
            ds = convert_wide(args.input, args.out, args.response_out, args.id_column,
                              args.response_column, args.domain_row)
            print(json.dumps({"status": "ok", "rows": ds.n, "columns": ds.p, "out": str(args.out)}))
            return 0
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
        if args.scheme is not None:
            cfg = replace(cfg, preprocess=args.scheme)
        out = _out_dir(args, cfg)
        if args.verb == "synth":
            paths = synth(cfg, out)
        else:
            paths = run(cfg, VERB_STEPS[args.verb], out).artifacts
        print(json.dumps({"status": "ok", "artifacts": [str(p) for p in paths]}))
        return 0
    except NullspaceError as exc:
        print(json.dumps({"status": "error", "type": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2
    except (OSError, TypeError) as exc:
        print(json.dumps({"status": "error", "type": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
