"""Command-line front end.

Subcommands: ``subgroup`` answers membership/equivalence queries,
``build`` writes a reproducible truncation bundle, ``verify`` re-checks a
bundle against every invariant suite, ``mt`` answers unit-orbit queries
with certificates, ``export`` re-emits a bundle as canonical JSON or a
Graphviz chain.  Exit codes: 0 success, 1 verification failure, 2 usage or
parse errors.  Set ``DIMGROUP_LOG`` to a level name for diagnostics.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from pathlib import Path

from . import __version__
from .bundle import (
    BundleFormatError,
    canonical_bytes,
    loads,
    to_bundle,
    truncation_dot,
)
from .diagram import build_truncation, orbit_certificate
from .ratlattice import (
    RationalParseError,
    contains,
    equiv,
    parse_positive_rational,
    subgroup_from_generators,
)
from .verify import run_verification
import json

log = logging.getLogger("dimgroup")


def _configure_logging() -> None:
    level_name = os.environ.get("DIMGROUP_LOG", "").upper()
    if level_name:
        level = getattr(logging, level_name, None)
        if isinstance(level, int):
            logging.basicConfig(
                level=level, format="%(name)s %(levelname)s %(message)s"
            )


def _parse_gens(args: argparse.Namespace):
    return subgroup_from_generators(
        parse_positive_rational(g) for g in (args.gen or [])
    )


def cmd_subgroup(args: argparse.Namespace) -> int:
    H = _parse_gens(args)
    for q in args.contains or []:
        value = contains(H, parse_positive_rational(q))
        print(f"contains {q}: {'true' if value else 'false'}")
    for n, m in args.equiv or []:
        value = equiv(H, n, m)
        print(f"equiv {n} {m}: {'true' if value else 'false'}")
    return 0


def cmd_build(args: argparse.Namespace) -> int:
    H = _parse_gens(args)
    started = time.perf_counter()
    truncation = build_truncation(H, depth=args.depth, seed=args.seed)
    payload = canonical_bytes(to_bundle(truncation))
    log.debug("built depth-%d truncation in %.2fs", args.depth,
              time.perf_counter() - started)
    if args.out:
        Path(args.out).write_bytes(payload)
        final = truncation.levels[-1]
        print(
            f"wrote {args.out}: depth {args.depth}, seed {args.seed}, "
            f"final rank {final.rank}"
        )
    else:
        sys.stdout.buffer.write(payload)
    return 0


def _load_bundle(path: str):
    try:
        return loads(Path(path).read_bytes())
    except FileNotFoundError:
        raise BundleFormatError(f"no such bundle: {path}")


def cmd_verify(args: argparse.Namespace) -> int:
    truncation = _load_bundle(args.bundle)
    started = time.perf_counter()
    report = run_verification(truncation, oracle_box=args.oracle_box)
    elapsed = time.perf_counter() - started
    for line in report.human_lines():
        print(line)
    print(f"({elapsed:.2f}s)")
    if args.json:
        Path(args.json).write_bytes(canonical_bytes(report.to_json()))
    return 0 if report.ok else 1


def cmd_mt(args: argparse.Namespace) -> int:
    truncation = _load_bundle(args.bundle)
    cert = orbit_certificate(args.n, args.m, truncation)
    if cert is None:
        print(f"refused: {args.n}/{args.m} not in H")
        return 0
    if args.json:
        Path(args.json).write_bytes(canonical_bytes(cert.to_json()))
    print(
        f"certificate: h = {cert.h} "
        f"(verified at {len(cert.checks)} levels)"
    )
    return 0 if cert.ok else 1


def cmd_export(args: argparse.Namespace) -> int:
    truncation = _load_bundle(args.bundle)
    if args.format == "dot":
        payload = truncation_dot(truncation).encode()
    else:
        payload = canonical_bytes(to_bundle(truncation))
    if args.out:
        Path(args.out).write_bytes(payload)
    else:
        sys.stdout.buffer.write(payload)
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dimgroup",
        description="Exact dimension-group truncations from a subgroup of "
        "the positive rationals.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("subgroup", help="membership and equivalence queries")
    p.add_argument("--gen", action="append", metavar="P/Q",
                   help="generator (repeatable)")
    p.add_argument("--contains", action="append", metavar="P/Q",
                   help="membership query (repeatable)")
    p.add_argument("--equiv", action="append", nargs=2, type=int,
                   metavar=("N", "M"), help="equivalence query (repeatable)")
    p.set_defaults(fn=cmd_subgroup)

    p = sub.add_parser("build", help="build a truncation bundle")
    p.add_argument("--gen", action="append", metavar="P/Q")
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out", metavar="FILE")
    p.set_defaults(fn=cmd_build)

    p = sub.add_parser("verify", help="re-check all invariants of a bundle")
    p.add_argument("bundle")
    p.add_argument("--oracle-box", type=int, metavar="B",
                   help="also run the exhaustive box oracle with this bound")
    p.add_argument("--json", metavar="FILE",
                   help="write the machine-readable report here")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("mt", help="unit-orbit query with certificate")
    p.add_argument("bundle")
    p.add_argument("n", type=int)
    p.add_argument("m", type=int)
    p.add_argument("--json", metavar="FILE",
                   help="write the certificate here")
    p.set_defaults(fn=cmd_mt)

    p = sub.add_parser("export", help="re-emit a bundle")
    p.add_argument("bundle")
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.add_argument("-o", "--out", metavar="FILE")
    p.set_defaults(fn=cmd_export)
    return parser


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (RationalParseError, BundleFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
