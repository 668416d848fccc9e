"""Command-line front end: ``torus-bns <command> FILE [options]``.

Exit codes: 0 on success, 2 for unreadable or malformed input, 3 when the input is
well formed but violates a mathematical precondition.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from torus_bns_mcp import __version__
from torus_bns_mcp.config import global_config, logger
from torus_bns_mcp.document.report_formatter import FORMATS, ReportFormatter
from torus_bns_mcp.errors import InputParseError
from torus_bns_mcp.services.alexander.alexander_service import alexander_polynomial
from torus_bns_mcp.services.bns.bns_service import bns_analyze, bns_sigma
from torus_bns_mcp.services.fiber.corpus import run_corpus
from torus_bns_mcp.services.fiber.fiber_service import fiber_classify
from torus_bns_mcp.services.gbs.gbs_service import gbs_analyze
from torus_bns_mcp.services.words.words_service import words_growth

EXIT_OK = 0
EXIT_PARSE_ERROR = 2
EXIT_SEMANTIC_ERROR = 3


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as error:
        raise InputParseError(f"cannot read '{path}': {error.strerror}")


def cmd_analyze(args: argparse.Namespace) -> dict[str, Any]:
    return bns_analyze(_read(args.file), seed=args.seed)


def cmd_fiber(args: argparse.Namespace) -> dict[str, Any]:
    return fiber_classify(_read(args.file), args.phi, oracle=args.oracle, seed=args.seed)


def cmd_alexander(args: argparse.Namespace) -> dict[str, Any]:
    return alexander_polynomial(_read(args.file), args.phi, seed=args.seed)


def cmd_sigma(args: argparse.Namespace) -> dict[str, Any]:
    return bns_sigma(_read(args.file), args.phi)


def cmd_gbs(args: argparse.Namespace) -> dict[str, Any]:
    return gbs_analyze(
        _read(args.file),
        enumerate_p=args.enumerate,
        stable_value=args.stable_value,
        characters=args.phi,
        bound=args.bound,
    )


def cmd_growth(args: argparse.Namespace) -> dict[str, Any]:
    return words_growth(_read(args.file), iterations=args.iterations)


def cmd_corpus(args: argparse.Namespace) -> dict[str, Any]:
    count = args.count if args.count is not None else global_config.corpus_size
    cases = run_corpus(args.seed, count)
    disagreements = [case.index for case in cases if not case.agree]
    rank_bound = [case.index for case in cases if not case.rank_bound_holds]
    small_b1 = [case.index for case in cases if case.b1 < 2]
    summary = [
        f"{len(cases)} automorphisms, {sum(len(case.ranks) for case in cases)} fibrations (seed {args.seed})",
        f"hierarchy = kernel = oracle on {len(cases) - len(disagreements)} of {len(cases)} automorphisms",
    ]
    if args.verbose:
        for case in cases:
            ranks = ", ".join(f"{entry.hierarchy}={entry.kernel}={entry.alexander}" for entry in case.ranks)
            summary.append(f"#{case.index} n={case.automorphism.rank} b1={case.b1}: {ranks}")
    return {
        "kind": "corpus",
        "summary": summary,
        "seed": args.seed,
        "count": len(cases),
        "disagreements": disagreements,
        "rank_below_n": rank_bound,
        "b1_below_2": small_b1,
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="torus-bns", description="BNS invariants of free-by-cyclic and GBS groups")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="text", help="Report format (default: text)")
    common.add_argument("--verbose", action="store_true", help="Log pipeline milestones to stderr")

    commands = parser.add_subparsers(dest="command", required=True)

    analyze = commands.add_parser("analyze", parents=[common], help="Presentation, hierarchy and sphere arrangement")
    analyze.add_argument("file")
    analyze.add_argument("--seed", type=int, help="Randomize the spanning tree of the presentation")
    analyze.set_defaults(handler=cmd_analyze)

    fiber = commands.add_parser("fiber", parents=[common], help="Fibration verdict and fiber rank of a character")
    fiber.add_argument("file")
    fiber.add_argument("--phi", required=True, help='Character, e.g. "x1=0, x2=0, t=1"')
    fiber.add_argument("--oracle", action="store_true", help="Compare with the Alexander polynomial degree")
    fiber.add_argument("--seed", type=int, help="Randomize the spanning tree of the presentation")
    fiber.set_defaults(handler=cmd_fiber)

    alexander = commands.add_parser("alexander", parents=[common], help="Alexander polynomial relative to a character")
    alexander.add_argument("file")
    alexander.add_argument("--phi", required=True, help='Character, e.g. "x1=0, x2=0, t=1"')
    alexander.add_argument("--seed", type=int, help="Randomize the spanning tree of the presentation")
    alexander.set_defaults(handler=cmd_alexander)

    sigma = commands.add_parser("sigma", parents=[common], help="Membership of characters in Sigma(G)")
    sigma.add_argument("file")
    sigma.add_argument("--phi", action="append", default=[], help="Character to test; repeatable")
    sigma.set_defaults(handler=cmd_sigma)

    gbs = commands.add_parser("gbs", parents=[common], help="Center, (kappa, epsilon) and fibrations of a GBS group")
    gbs.add_argument("file")
    gbs.add_argument("--enumerate", type=int, metavar="P", help="Build the fibration phi_P")
    gbs.add_argument("--stable-value", type=int, default=1, help="Stable letter value for --enumerate (default: 1)")
    gbs.add_argument("--phi", action="append", default=[], help="Character to classify; repeatable")
    gbs.add_argument("--bound", type=int, help="Bound on k and n in the admissibility table")
    gbs.set_defaults(handler=cmd_gbs)

    growth = commands.add_parser("growth", parents=[common], help="Least unipotent power and growth estimate")
    growth.add_argument("file")
    growth.add_argument("--iterations", type=int, help="Iterates sampled for the growth estimate")
    growth.set_defaults(handler=cmd_growth)

    corpus = commands.add_parser("corpus", parents=[common], help="Seeded three-way fiber rank agreement check")
    corpus.add_argument("--seed", type=int, default=0)
    corpus.add_argument("--count", type=int, help="Number of automorphisms (default: TORUS_BNS_CORPUS_SIZE)")
    corpus.set_defaults(handler=cmd_corpus)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.INFO if args.verbose else global_config.log_level
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        report = args.handler(args)
    except InputParseError as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    except ValueError as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_SEMANTIC_ERROR

    print(ReportFormatter.render(report, args.format).data)
    if report.get("kind") == "corpus" and (report["disagreements"] or report["rank_below_n"]):
        logger.error("Corpus found disagreeing fiber ranks")
        return EXIT_SEMANTIC_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
