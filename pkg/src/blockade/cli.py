"""Command-line interface: check, extract, verify, gen, bench."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .certificates import Certificate, verify_certificate
from .errors import (
    BlockadeError,
    CertificateStructureError,
    FinderContractBreach,
    GraphFormatError,
    InternalInvariantViolated,
    PreconditionViolated,
)
from .graph import complement, parse_rational
from .graphio import DIMACS, EDGELIST, format_graph, read_graph
from .lab.generators import FAMILIES, GeneratorSpec, generate
from .lab.harness import PIPELINES, default_suite, exponent_harness, rows_to_csv, rows_to_json
from .patterns import PATTERNS, find_induced_copy
from .profile import PROFILES, get_profile
from .round2 import HomSet, eh_extract, polynomial_rodl

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_REJECTED = 4
EXIT_INTERNAL = 5

_EXCLUDES = ("p5", "house")


def _overrides(pairs: list[str]) -> dict:
    out = {}
    for item in pairs:
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"expected KEY=VALUE, got {item!r}")
        out[key.strip()] = parse_rational(value)
    return out


def _profile(args):
    return get_profile(args.profile, _overrides(args.set))


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _excluded(args) -> str:
    if args.exclude:
        return args.exclude
    return "p5" if args.complement else "house"


def cmd_check(args) -> int:
    g, _ = read_graph(args.input, args.format)
    name = _excluded(args)
    copy = find_induced_copy(g, PATTERNS[name])
    if copy is None:
        print(f"in class: no induced {name} (n={g.n})")
    else:
        verts = " ".join(str(copy[i]) for i in sorted(copy))
        print(f"not in class: induced {name} on vertices {verts}")
    return EXIT_OK


def cmd_extract(args) -> int:
    g, _ = read_graph(args.input, args.format)
    profile = _profile(args)
    name = _excluded(args)
    copy = find_induced_copy(g, PATTERNS[name])
    if copy is not None:
        raise PreconditionViolated(f"input contains an induced {name}", witness=copy)
    # pipelines run on a house-free graph; P5-free input is handled in the complement
    work = complement(g) if args.complement else g
    if args.pipeline == "eh":
        out = eh_extract(work, profile, seed=args.seed)
        if args.complement:
            out = HomSet(out.s, "stable" if out.kind == "clique" else "clique")
        cert = out.certify(g, profile, "eh_extract")
    else:
        eps = parse_rational(args.eps)
        out = polynomial_rodl(work, eps, profile, seed=args.seed)
        # restrictedness is symmetric under complementation
        cert = out.certify(g, profile, "polynomial_rodl")
    _write(args.out, cert.to_json())
    return EXIT_OK


def cmd_verify(args) -> int:
    g, _ = read_graph(args.graph, args.format)
    text = Path(args.certificate).read_text()
    try:
        verdict = verify_certificate(Certificate.from_json(text), g)
    except CertificateStructureError as exc:
        print(f"REJECTED\n  structure: {exc}")
        return EXIT_REJECTED
    print(verdict.report())
    return EXIT_OK if verdict.accepted else EXIT_REJECTED


def cmd_gen(args) -> int:
    spec = GeneratorSpec(args.family, args.n, args.seed, complement=args.complement,
                         density=args.density)
    _write(args.out, format_graph(generate(spec), args.format or EDGELIST))
    return EXIT_OK


def cmd_bench(args) -> int:
    profile = _profile(args)
    sizes = tuple(int(s) for s in args.sizes.split(",")) if args.sizes else (64, 128, 256, 512)
    specs = default_suite(args.seed, sizes)
    pipelines = PIPELINES if args.pipeline == "both" else (args.pipeline,)
    rows = []
    for p in pipelines:
        rows += exponent_harness(specs, p, profile, workers=args.workers, timing=args.timing)
    _write(args.out, rows_to_csv(rows))
    if args.json:
        _write(args.json, rows_to_json(rows, profile))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blockade", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--profile", choices=sorted(PROFILES), default=None,
                        help="constants profile (BLOCKADE_PROFILE overrides)")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override one profile entry, e.g. --set c=1/8")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=(EDGELIST, DIMACS), default=None)
    common.add_argument("--complement", action="store_true",
                        help="treat the input as P5-free and work in its complement")
    common.add_argument("--exclude", choices=_EXCLUDES, default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="test class membership")
    p.add_argument("input")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("extract", parents=[common], help="write a certificate")
    p.add_argument("input")
    p.add_argument("--pipeline", choices=("rodl", "eh"), default="rodl")
    p.add_argument("--eps", default="1/4")
    p.add_argument("--out", "-o", default=None)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("verify", parents=[common], help="check a certificate against a graph")
    p.add_argument("graph")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", parents=[common], help="generate a graph")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--density", type=float, default=None)
    p.add_argument("--out", "-o", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", parents=[common], help="write the exponent table")
    p.add_argument("--pipeline", choices=(*PIPELINES, "both"), default="both")
    p.add_argument("--sizes", default=None, help="comma-separated sizes")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="record wall-clock millis")
    p.add_argument("--out", "-o", default=None)
    p.add_argument("--json", default=None, help="also write the rows as JSON")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GraphFormatError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PreconditionViolated as exc:
        witness = f" (witness: {exc.witness})" if exc.witness is not None else ""
        print(f"precondition violated: {exc}{witness}", file=sys.stderr)
        return EXIT_PRECONDITION
    except CertificateStructureError as exc:
        print(f"certificate rejected: {exc}", file=sys.stderr)
        return EXIT_REJECTED
    except (InternalInvariantViolated, FinderContractBreach, BlockadeError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
