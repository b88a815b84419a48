"""Command-line interface: ``multizero analyze | certify | convert``."""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from pathlib import Path

from .engine import VerdictKind, default_threads, timed_decide
from .errors import MultizeroError, WitnessVerificationError
from .model import AugmentedVerticalSystem, format_system, network_to_system, parse_network, parse_system
from .report import Report, verification_to_dict, witness_from_dict, witness_to_dict
from .witness import verify_witness

EXIT_CODES = {VerdictKind.PRECLUDED: 0, VerdictKind.MULTIPLE: 10,
              VerdictKind.MULTIPLE_NUMERIC: 11, VerdictKind.INCONCLUSIVE: 20}
EXIT_INPUT_ERROR = 1
EXIT_CERTIFY_FAIL = 2
EXIT_INTERNAL = 3

_NETWORK_SUFFIXES = {".crn", ".net", ".rxn"}
_MATRIX_SUFFIXES = {".mat", ".matrices"}


def _infer_format(path: Path, text: str) -> str:
    if path.suffix in _NETWORK_SUFFIXES:
        return "network"
    if path.suffix in _MATRIX_SUFFIXES:
        return "matrices"
    for line in text.splitlines():
        head = line.split("#", 1)[0].split()
        if head:
            return "network" if head[0] in ("species", "rxn") else "matrices"
    return "matrices"


def load_system(path: str, fmt: str | None = None) -> AugmentedVerticalSystem:
    p = Path(path)
    text = p.read_text()
    fmt = fmt or _infer_format(p, text)
    if fmt == "network":
        return network_to_system(parse_network(text))
    return parse_system(text)


def _error(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return EXIT_INPUT_ERROR


def cmd_analyze(args) -> int:
    random.seed(args.seed)
    try:
        system = load_system(args.input, args.format)
    except (OSError, MultizeroError) as exc:
        return _error(f"{args.input}: {exc}")
    threads = args.threads if args.threads is not None else default_threads()
    mode = {"max": "maximal", "singleton": "singleton"}[args.partitions]
    try:
        verdict, elapsed = timed_decide(system, partitions=mode, precision=args.precision,
                                        witness=not args.no_witness, threads=threads)
    except WitnessVerificationError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    report = Report.from_verdict(system, verdict, elapsed, source=args.input)
    print(report.to_json() if args.json else report.to_text(), end="" if not args.json else "\n")
    if args.witness_out and verdict.witness is not None:
        Path(args.witness_out).write_text(
            json.dumps(witness_to_dict(verdict.witness, verdict.verification), indent=2) + "\n")
    return EXIT_CODES[verdict.kind]


def cmd_certify(args) -> int:
    try:
        system = load_system(args.input, args.format)
        data = json.loads(Path(args.witness).read_text())
        w = witness_from_dict(data)
    except (OSError, MultizeroError, ValueError, KeyError, TypeError) as exc:
        return _error(str(exc))
    if len(w.kappa) != system.m_bar or len(w.x) != system.n or len(w.y) != system.n \
            or len(w.b) != system.L.rows:
        return _error("witness dimensions do not match the system")
    rep = verify_witness(system, w, args.tolerance)
    print(json.dumps(verification_to_dict(rep), indent=2))
    return 0 if rep.passed else EXIT_CERTIFY_FAIL


def cmd_convert(args) -> int:
    try:
        system = load_system(args.input, "network")
    except (OSError, MultizeroError) as exc:
        return _error(f"{args.input}: {exc}")
    print(format_system(system), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="multizero", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="decide whether multiple positive zeros exist")
    a.add_argument("--input", required=True)
    a.add_argument("--format", choices=["network", "matrices"])
    a.add_argument("--partitions", choices=["max", "singleton"], default="max")
    a.add_argument("--precision", type=int, default=128, help="working precision in bits")
    a.add_argument("--json", action="store_true", help="machine-readable report")
    a.add_argument("--no-witness", action="store_true", help="skip witness construction")
    a.add_argument("--witness-out", help="write the witness JSON to this file")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--threads", type=int, default=None,
                   help="worker processes (default: MULTIZERO_THREADS or CPU count)")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("certify", help="re-verify a previously emitted witness")
    c.add_argument("--input", required=True)
    c.add_argument("--format", choices=["network", "matrices"])
    c.add_argument("--witness", required=True, help="witness or report JSON")
    c.add_argument("--tolerance", type=float, default=None)
    c.set_defaults(func=cmd_certify)

    v = sub.add_parser("convert", help="print the (C, M, L) matrices of a network")
    v.add_argument("--input", required=True)
    v.add_argument("--emit", choices=["matrices"], default="matrices")
    v.set_defaults(func=cmd_convert)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    if args.command == "analyze" and args.precision < 64:
        return _error("precision must be at least 64 bits")
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
