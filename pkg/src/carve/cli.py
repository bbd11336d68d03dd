"""Command-line entry point.

Exit status: 0 on success, 1 on a validation or engine error (a JSON error
document goes to stderr), 2 on an I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Sequence

from . import fixtures, repl
from .diagram import Presentation, dumps, validate
from .errors import CarveError
from .invariants import check_grading, detect_loose
from .pipelines import CarveInput, carve, construct_ploose
from .trace import MoveTrace, Session, replay



class IOFailure(Exception):
    pass


def use_color(stream: Any) -> bool:
    mode = os.environ.get("CARVE_COLOR", "auto").lower()
    if mode == "always":
        return True
    if mode == "never":
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def _read_json(path: str) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise IOFailure(f"cannot read {path}: {e.strerror or e}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise IOFailure(f"{path} is not JSON: {e}") from e


def _check_output(path: str) -> None:
    parent = Path(path).resolve().parent
    if not parent.is_dir():
        raise IOFailure(f"output directory {parent} does not exist")


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise IOFailure(f"cannot write {path}: {e.strerror or e}") from e


def _load_trace(doc: Any) -> tuple[MoveTrace, dict[str, Any]]:
    """A trace from a trace document or a report document."""
    if isinstance(doc, dict) and "trace" in doc:
        return MoveTrace.from_dict(doc["trace"]), dict(doc.get("stats", {}))
    if isinstance(doc, dict) and "initial" in doc:
        return MoveTrace.from_dict(doc), {}
    if isinstance(doc, dict) and "ambient_dim" in doc:
        return MoveTrace(Presentation.from_dict(doc)), {}
    raise CarveError("document is neither a trace, a report nor a presentation")


# commands ----------------------------------------------------------------


def cmd_carve(args: argparse.Namespace) -> int:
    _check_output(args.output)
    p = Presentation.from_dict(_read_json(args.input))
    report = carve(CarveInput(p, args.plus))
    _write(args.output, dumps(report.to_dict()) + "\n")
    return 0


def cmd_ploose(args: argparse.Namespace) -> int:
    _check_output(args.output)
    report = construct_ploose(args.p, args.n)
    _write(args.output, dumps(report.to_dict()) + "\n")
    return 0


def cmd_check(args: argparse.Namespace) -> int:
    trace, _ = _load_trace(_read_json(args.path))
    color = repl.Style(use_color(sys.stdout))
    problems = [str(v) for v in check_grading(trace)]
    final = replay(trace)
    problems += [str(v) for v in validate(final)]
    for line in problems:
        print(color.bad(line))
    for lid in sorted(final.legendrians):
        print(f"loose {lid} {final.leg(lid).label}: {detect_loose(final, lid)}")
    print(color.ok("clean") if not problems else color.bad(f"{len(problems)} violation(s)"))
    return 0 if not problems else 1


def cmd_replay(args: argparse.Namespace) -> int:
    trace, stats = _load_trace(_read_json(args.path))
    final = replay(trace)
    for i, step in enumerate(trace.steps):
        print(f"{i:3d} {step.move} {step.post_hash}")
    print(f"final {final.digest()}")
    expected = stats.get("final_hash")
    if expected is not None and expected != final.digest():
        print(f"mismatch: report says {expected}", file=sys.stderr)
        return 1
    return 0


def cmd_repl(args: argparse.Namespace) -> int:
    _check_output(args.trace)
    p = Presentation.from_dict(_read_json(args.input))
    session = Session(p)
    interactive = sys.stdin.isatty()
    try:
        repl.run(session, sys.stdin, sys.stdout, repl.Style(use_color(sys.stdout)), prompt=interactive)
    finally:
        _write(args.trace, session.trace().dumps() + "\n")
    return 0


def cmd_fixtures(args: argparse.Namespace) -> int:
    if args.output:
        _check_output(args.output)
    p = fixtures.BUILDERS[args.name]()
    _write(args.output, dumps(p.to_dict()) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="carve", description="Rewrite Weinstein handle presentations.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log moves to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("carve", help="carve the CarvePlus disk out of a presentation")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--plus", type=int, default=None, help="id of the CarvePlus Legendrian")
    p.set_defaults(func=cmd_carve)

    p = sub.add_parser("ploose", help="build the P-loose unknot")
    p.add_argument("--p", type=int, action="append", required=True,
                   help="entry of P; repeat for several entries")
    p.add_argument("--n", type=int, required=True, help="half the ambient dimension")
    p.add_argument("output")
    p.set_defaults(func=cmd_ploose)

    p = sub.add_parser("check", help="replay a trace or report and check its invariants")
    p.add_argument("path")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("replay", help="replay a trace or report and print step hashes")
    p.add_argument("path")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("repl", help="apply moves interactively")
    p.add_argument("input")
    p.add_argument("--trace", default="repl-trace.json", help="where to write the trace on exit")
    p.set_defaults(func=cmd_repl)

    p = sub.add_parser("fixtures", help="print a built-in presentation")
    p.add_argument("name", choices=sorted(fixtures.BUILDERS))
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except IOFailure as e:
        print(dumps({"error": "IOError", "message": str(e), "details": {}}), file=sys.stderr)
        return 2
    except CarveError as e:
        print(dumps(e.to_dict()), file=sys.stderr)
        return 1
    except (KeyError, TypeError, ValueError) as e:
        # malformed documents that slipped past the schema check
        msg = f"missing field {e}" if isinstance(e, KeyError) else str(e)
        print(dumps({"error": "InvalidDocument", "message": msg, "details": {}}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
