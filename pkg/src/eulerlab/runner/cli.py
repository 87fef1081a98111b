"""``lab`` command line: run, verify, render, list-scenarios.

Exit codes: 0 ok, 1 validation error, 2 runtime error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .. import io
from .config import ConfigError, dumps, load, output_root
from .scenarios import DESCRIPTIONS, RUNNERS, make_rng

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which here means a runtime error
    def error(self, message):
        raise UsageError(message)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if np.isfinite(v) else repr(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def execute(cfg: dict) -> Path:
    """Run a resolved config; returns the output directory."""
    run = cfg["run"]
    out = output_root(cfg) / run["name"]
    out.mkdir(parents=True, exist_ok=True)
    (out / "manifest.toml").write_text(dumps(cfg))
    scenario = run["scenario"]
    result = RUNNERS[scenario](cfg, out, make_rng(run["seed"]))
    summary = {"scenario": scenario, "seed": run["seed"], "status": result.status,
               "files": ["manifest.toml"] + list(result.files) + ["summary.json"], **result.summary}
    io.write_json(out / "summary.json", _jsonable(summary))
    return out


def cmd_run(args) -> int:
    try:
        cfg = load(args.config)
    except ConfigError as exc:
        print(f"invalid config {args.config}:", file=sys.stderr)
        for e in exc.errors:
            print(f"  - {e}", file=sys.stderr)
        return EXIT_VALIDATION
    if args.output_dir:
        cfg["run"]["output_dir"] = args.output_dir
    try:
        out = execute(cfg)
    except (ValueError, RuntimeError, FloatingPointError, OSError) as exc:
        print(f"run failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    summary = json.loads((out / "summary.json").read_text())
    print(f"{cfg['run']['scenario']} -> {out} (status: {summary['status']})")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .criteria import run_suite

    results = run_suite(args.suite, report=lambda line: print(line, flush=True))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def cmd_render(args) -> int:
    src = Path(args.snapshot)
    try:
        magic = src.read_bytes()[:4]
    except OSError as exc:
        print(f"cannot read {src}: {exc.strerror}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        if magic == b"FLD1":
            values = io.read_snapshot(src)[0]
        elif magic == b"POL1":
            values = io.read_polar_snapshot(src)[0]
        else:
            raise ValueError(f"{src}: not an FLD1 or POL1 snapshot")
    except ValueError as exc:
        print(exc, file=sys.stderr)
        return EXIT_VALIDATION
    try:
        io.write_pgm(args.out, values)
    except OSError as exc:
        print(f"render failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"{src} -> {args.out}")
    return EXIT_OK


def cmd_list(args) -> int:
    for name, text in DESCRIPTIONS.items():
        print(f"{name:15s} {text}")
    return EXIT_OK


def build_parser() -> Parser:
    p = Parser(prog="lab", description="Numerical experiments on incompressible Euler and its models.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=Parser)
    r = sub.add_parser("run", help="run a scenario config")
    r.add_argument("config")
    r.add_argument("--output-dir", default="", help="output root (default: $LAB_OUTPUT_DIR or ./lab_output)")
    r.set_defaults(func=cmd_run)
    v = sub.add_parser("verify", help="run an acceptance suite")
    v.add_argument("suite", choices=["conservation", "oracles", "bounds"])
    v.set_defaults(func=cmd_verify)
    d = sub.add_parser("render", help="write a snapshot as a PGM image")
    d.add_argument("snapshot")
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_render)
    ls = sub.add_parser("list-scenarios", help="list scenario ids")
    ls.set_defaults(func=cmd_list)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"lab: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
