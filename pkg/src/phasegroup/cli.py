"""Command-line front end.

Exit codes: 0 Equivalent, 1 NotEquivalent, 2 Inconclusive, 3 input could
not be parsed, 4 integration failure, 5 generator sets live in different
spaces.
"""

from __future__ import annotations

import argparse
import json
import sys

from .core import DEFAULT_TOL, PhaseGroupError, SpaceMismatch, Status, ToleranceConfig
from .monodromy import IntegrationFailure
from .morphisms import covering, embedding, equivalence
from .serialize import (document_from_json, dumps, generators_to_json, report_to_json, resolve,
                        verdict_to_json)
from .witness import residual_gate, verify_conjugacy, witness_from_dict

EXIT_PARSE = 3
EXIT_INTEGRATION = 4
EXIT_SPACE = 5


class ParseError(Exception):
    pass


def _read_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc


def _load(path: str, tol: ToleranceConfig):
    raw = _read_json(path)
    try:
        doc = document_from_json(raw, tol)
    except (ValueError, KeyError, TypeError, PhaseGroupError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return resolve(doc, tol)


def _tolerances(args) -> ToleranceConfig:
    tol = DEFAULT_TOL
    try:
        if args.tol:
            tol = tol.with_overrides(args.tol)
        if args.seed is not None:
            tol = tol.with_overrides([f"seed={args.seed}"])
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    return tol


def _emit(obj: dict) -> None:
    sys.stdout.write(dumps(obj) + "\n")


def cmd_monodromy(args) -> int:
    tol = _tolerances(args)
    g, result = _load(args.system, tol)
    for w in (result.warnings if result else []):
        print(f"warning: {w}", file=sys.stderr)
    out = generators_to_json(g, result)
    if result is not None:
        out["pole_order"] = [loop["center"] for loop in out["loops"] if "center" in loop]
    _emit(out)
    return 0


_RELATIONS = {"classify": equivalence, "embed": embedding, "cover": covering}


def _cmd_relation(args) -> int:
    tol = _tolerances(args)
    g1, _ = _load(args.a, tol)
    g2, _ = _load(args.b, tol)
    verdict = _RELATIONS[args.command](g1, g2, args.category, tol, args.allow_inversion)
    _emit(verdict_to_json(verdict))
    return verdict.status.exit_code


def cmd_verify(args) -> int:
    tol = _tolerances(args)
    raw = _read_json(args.witness)
    try:
        if isinstance(raw, dict) and "variant" not in raw and "witness" in raw:
            raw = raw["witness"]
        if raw is None:
            raise ValueError("document carries no witness")
        w = witness_from_dict(raw)
    except (ValueError, KeyError, TypeError, PhaseGroupError) as exc:
        raise ParseError(f"{args.witness}: {exc}") from exc
    g1, _ = _load(args.a, tol)
    g2, _ = _load(args.b, tol)
    if g1.space != g2.space:
        raise SpaceMismatch(f"{g1.space} vs {g2.space}")
    try:
        report = verify_conjugacy(w, g1, g2, tol)
    except ValueError as exc:
        raise ParseError(f"witness does not fit the generator sets: {exc}") from exc
    gate = residual_gate(w, tol)
    ok = report.max_residual <= gate
    _emit({"residual_report": report_to_json(report), "gate": gate, "passed": bool(ok)})
    return Status.EQUIVALENT.exit_code if ok else Status.NOT_EQUIVALENT.exit_code


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", action="append", default=[], metavar="KEY=VALUE",
                        help="override a tolerance field (repeatable)")
    common.add_argument("--seed", type=int, default=None, help="random seed")

    parser = argparse.ArgumentParser(prog="phasegroup",
                                     description="Phase groups of linear and Riccati systems "
                                                 "and their classification.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("monodromy", parents=[common], help="compute generator matrices")
    p.add_argument("system", help="system JSON file, or - for standard input")
    p.set_defaults(func=cmd_monodromy)

    for name, helptext in (("classify", "decide equivalence"), ("embed", "decide embedding"),
                           ("cover", "decide covering")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("a", help="source system or generators JSON")
        p.add_argument("b", help="target system or generators JSON")
        p.add_argument("--category", choices=["top", "smooth", "rholo", "holo"], default="top")
        p.add_argument("--allow-inversion", action="store_true",
                       help="also match generators with inverted targets")
        p.set_defaults(func=_cmd_relation)

    p = sub.add_parser("verify", parents=[common], help="check a stored witness")
    p.add_argument("witness", help="witness or verdict JSON")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except IntegrationFailure as exc:
        print(f"integration failure: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except SpaceMismatch as exc:
        print(f"space mismatch: {exc}", file=sys.stderr)
        return EXIT_SPACE


if __name__ == "__main__":
    sys.exit(main())
