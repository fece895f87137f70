"""Command line interface.

Exit codes: 0 every counted check passed, 1 some check failed, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..symexpr import ExprError
from .config import ConfigError, dump_config
from .registry import STRUCTURES, example_config, is_registry_id, list_examples
from .report import FORMATS, emit_report
from .run import analyze, check_structure, load_problem, verify_theorems

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--seed", type=int, default=d, help="sampling seed (default 42)")
    p.add_argument("--points", type=int, default=d, help="sample points per identity (default 20)")
    p.add_argument("--tol", type=float, default=d, help="relative residual tolerance (default 1e-9)")
    p.add_argument("--format", choices=FORMATS, default=argparse.SUPPRESS if suppress else "text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paracontact",
        description="Verify (1,1,1) almost contact, Lorentzian almost paracontact and LP-Sasakian structures "
        "and their hypersurfaces.",
    )
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("check-structure", help="run the structure verifier suites")
    p.add_argument("target", help="example id (e.g. 6.4) or path to a JSON config")
    p.add_argument("--suite", action="append", dest="suites", help="restrict to a suite (repeatable)")
    _global_flags(p, suppress=True)

    p = sub.add_parser("analyze", help="classify a hypersurface and run every applicable theorem")
    p.add_argument("target", help="example id (e.g. 6.4/M1) or path to a JSON config")
    p.add_argument("--hypersurface", help="hypersurface name inside the config")
    p.add_argument("--transversal", help="'xi', 'normal', 'auto' or a JSON list of ambient expressions")
    p.add_argument("--suite", action="append", dest="suites", help="restrict to a suite (repeatable)")
    _global_flags(p, suppress=True)

    p = sub.add_parser("verify-theorems", help="run the whole example registry")
    p.add_argument("ids", nargs="*", help="restrict to these example ids")
    p.add_argument("--jobs", type=int, default=1, help="worker threads")
    _global_flags(p, suppress=True)

    p = sub.add_parser("list-examples", help="list the built-in examples")
    _global_flags(p, suppress=True)

    p = sub.add_parser("export-example", help="write a built-in example as a JSON config")
    p.add_argument("id", help="structure id (6.1) or example id (6.4/M1)")
    p.add_argument("-o", "--output", help="output path (default stdout)")
    return parser


def _overrides(args) -> dict:
    out = {k: getattr(args, k, None) for k in ("seed", "points", "tol")}
    if getattr(args, "suites", None):
        out["suites"] = args.suites
    return out


def _transversal(raw):
    if raw is None or raw in ("xi", "normal", "auto"):
        return raw
    try:
        val = json.loads(raw)
    except json.JSONDecodeError:
        raise ConfigError(f"--transversal must be xi, normal, auto or a JSON list, got {raw!r}") from None
    if not isinstance(val, list) or not all(isinstance(v, str) for v in val):
        raise ConfigError("--transversal list must contain expression strings")
    return val


def _write(data: bytes) -> None:
    sys.stdout.buffer.write(data)
    sys.stdout.flush()


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    fmt = getattr(args, "format", "text") or "text"
    try:
        if args.verb == "list-examples":
            rows = list_examples()
            if fmt == "json":
                _write((json.dumps([{"id": i, "description": d} for i, d in rows], indent=2) + "\n").encode())
            else:
                _write("".join(f"{i:8} {d}\n" for i, d in rows).encode())
            return EXIT_OK
        if args.verb == "export-example":
            if not is_registry_id(args.id):
                raise ConfigError(f"unknown example id {args.id!r}; known structures: {', '.join(STRUCTURES)}")
            text = dump_config(example_config(args.id))
            if args.output:
                Path(args.output).write_text(text)
            else:
                _write(text.encode())
            return EXIT_OK
        if args.verb == "check-structure":
            report = check_structure(load_problem(args.target, _overrides(args)))
        elif args.verb == "analyze":
            problem = load_problem(args.target, _overrides(args))
            report = analyze(problem, args.hypersurface, _transversal(args.transversal))
        else:
            for ident in args.ids:
                if not is_registry_id(ident):
                    raise ConfigError(f"unknown example id {ident!r}")
            if args.jobs < 1:
                raise ConfigError("--jobs must be >= 1")
            report = verify_theorems(args.ids or None, _overrides(args), args.jobs)
    except (ConfigError, ExprError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _write(emit_report(report, fmt))
    return EXIT_OK if report.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
