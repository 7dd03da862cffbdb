"""Command line entry point: ``minicurry run`` and ``minicurry repl``."""

from __future__ import annotations

import argparse
import sys

from .errors import MiniCurryError
from .eval import BFS, DFS
from .session import Config, Session

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_NO_ANSWERS = 3


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if n <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {n}")
    return n


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="minicurry", description="Interpreter for a small functional logic language.")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="load a program and evaluate a goal")
    run.add_argument("file")
    run.add_argument("-e", "--eval", dest="goal", help="goal expression, optionally with 'where x free'")
    count = run.add_mutually_exclusive_group()
    count.add_argument("--all", action="store_true", help="print all answers")
    count.add_argument("-n", type=_positive, metavar="K", help="print at most K answers")
    run.add_argument("--strategy", choices=(BFS, DFS), default=BFS)
    run.add_argument("--max-steps", type=_positive, default=100000, metavar="N")
    run.add_argument("--max-depth", type=_positive, default=None, metavar="N")
    run.add_argument("--no-optimize", action="store_true", help="disable the equality optimization")
    run.add_argument("--auto-data", action="store_true", help="derive Data wherever possible")
    run.add_argument("--dump-types", action="store_true")
    run.add_argument("--dump-core", action="store_true")
    run.add_argument("--opt-report", action="store_true")
    run.add_argument("--expect-none", action="store_true", help="succeed only if the search completes without answers")

    repl = sub.add_parser("repl", help="interactive session")
    repl.add_argument("file", nargs="?")
    repl.add_argument("--auto-data", action="store_true")
    return ap


def run_batch(args, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    cfg = Config(
        strategy=args.strategy,
        max_answers=None if args.all else (args.n or 1),
        max_steps=args.max_steps,
        max_depth=args.max_depth,
        optimize=not args.no_optimize,
        auto_data=args.auto_data,
    )
    session = Session(cfg)
    try:
        session.load_file(args.file)
        if args.dump_types:
            for line in session.dump_types():
                print(line, file=out)
        if args.dump_core:
            for line in session.dump_core():
                print(line, file=out)
        if args.opt_report:
            for line in session.optimization_report():
                print(line, file=out)
        if args.goal is None:
            return EXIT_OK
        result = session.run(args.goal)
    except OSError as e:
        print(f"minicurry: cannot read {args.file}: {e.strerror}", file=err)
        return EXIT_ERROR
    except MiniCurryError as e:
        print(str(e), file=err)
        return EXIT_ERROR
    for a in result.answers:
        print(a.line(), file=out)
    line = result.exhaustion_line()
    if line:
        print(line, file=out)
    if args.expect_none:
        # only a search that ran to completion proves there is no answer
        clean = not result.answers and result.reason == "complete"
        return EXIT_OK if clean else EXIT_NO_ANSWERS
    return EXIT_OK if result.answers else EXIT_NO_ANSWERS


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command == "run":
        if args.goal is None and not (args.dump_types or args.dump_core or args.opt_report):
            ap.error("run: a goal (-e EXPR) or a dump option is required")
        return run_batch(args)
    from .repl import Repl

    return Repl(Config(max_answers=None, auto_data=args.auto_data), args.file).loop()


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
