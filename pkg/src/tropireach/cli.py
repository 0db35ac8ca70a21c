"""Command line: a thin client over the service layer.

Every subcommand reads a problem file, runs through LocalClient (or
HttpClient when --server is given) and prints JSON or CSV to stdout.
Exit codes: 0 success, 1 usage error, 2 input validation error, 3 oracle
cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .client import HttpClient, LocalClient
from .formats import FormatError, dumps_canonical
from .oracle import OracleCapExceeded

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_ORACLE_CAP = 3


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems instead of exiting with 2."""

    def error(self, message: str):
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tropireach",
                description="Backward reachability for max-plus linear "
                            "systems over tropical half-space targets")
    p.add_argument("--server", metavar="URL",
                   help="send the command to a running server instead of "
                        "computing in-process")
    sub = p.add_subparsers(dest="command", metavar="COMMAND")

    sp = sub.add_parser("approx", help="closure of the target set alone")
    sp.add_argument("problem", help="problem file (JSON)")

    sp = sub.add_parser("reach", help="backward reachable set")
    sp.add_argument("problem")
    sp.add_argument("--steps", type=int, default=None, metavar="N")
    sp.add_argument("--mode", choices=("one-shot", "iterated"), default=None)

    sp = sub.add_parser("member", help="membership of a point")
    sp.add_argument("problem")
    sp.add_argument("--point", required=True, metavar="X1,X2,...",
                    help="comma-separated coordinates; -inf and p/q allowed")
    sp.add_argument("--extract-control", action="store_true",
                    help="also produce a certifying control input")

    sp = sub.add_parser("sample", help="CSV membership grid")
    sp.add_argument("problem")
    sp.add_argument("--box", required=True, metavar="LO,HI",
                    help="per-axis range, e.g. -5,5")
    sp.add_argument("--res", required=True, type=int, metavar="K",
                    help="grid points per axis")
    sp.add_argument("--oracle", action="store_true",
                    help="append an in_oracle column (small systems only)")

    sp = sub.add_parser("compare-oracle",
                        help="sampled agreement with the exact oracle")
    sp.add_argument("problem")
    sp.add_argument("--samples", type=int, default=1000, metavar="K")
    sp.add_argument("--seed", type=int, default=0, metavar="S")

    sp = sub.add_parser("serve", help="run the HTTP service")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8000)

    return p


def _load_problem(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: malformed JSON at line {exc.lineno} "
                          f"column {exc.colno}: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise FormatError(f"{path}: top level must be an object")
    return obj


def _split_pair(text: str, what: str) -> tuple:
    parts = [t.strip() for t in text.split(",")]
    if len(parts) != 2:
        raise _UsageError(f"{what} expects exactly two comma-separated "
                          f"values, got {text!r}")
    return parts[0], parts[1]


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help and friends
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE

    if args.command == "serve":
        import uvicorn

        from .service import app
        uvicorn.run(app, host=args.host, port=args.port)
        return EXIT_OK

    client = HttpClient(args.server) if args.server else LocalClient()
    try:
        problem = _load_problem(args.problem)
        if args.command == "approx":
            print(dumps_canonical(client.approx(problem)), end="")
        elif args.command == "reach":
            print(dumps_canonical(
                client.reach(problem, args.steps, args.mode)), end="")
        elif args.command == "member":
            point = [t.strip() for t in args.point.split(",")]
            out = client.member(problem, point, args.extract_control)
            print(dumps_canonical(out), end="")
        elif args.command == "sample":
            lo, hi = _split_pair(args.box, "--box")
            print(client.sample(problem, lo, hi, args.res, args.oracle),
                  end="")
        elif args.command == "compare-oracle":
            report = client.compare_oracle(problem, args.samples, args.seed)
            print(dumps_canonical(report), end="")
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OracleCapExceeded as exc:
        print(f"error: oracle cap exceeded: {exc}", file=sys.stderr)
        return EXIT_ORACLE_CAP
    except (FormatError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
