"""Command-line front end: ``python3 -m ellifloor <subcommand> ...``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Sequence

from .arith import Partition, format_partition, parse_partition, scalar_to_json
from .diagrams import ProfileError, TangencyProfile, enumerate_diagrams, enumerate_markings

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DISAGREE = 3

CSV_COLUMNS = ["delta", "d1", "d2", "g", "mu0", "muInf", "nu0", "nuInf", "classical", "refined"]


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _add_problem_args(p: argparse.ArgumentParser, connected_default: bool = True) -> None:
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--d1", type=int, required=True)
    p.add_argument("--d2", type=int, required=True)
    p.add_argument("--g", type=int, required=True)
    for name in ("mu0", "nu0", "muinf", "nuinf"):
        p.add_argument("--" + name, default=None, help="partition such as 1^2,3^1")
    p.add_argument("--refined", action="store_true")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--connected", dest="connected", action="store_true", default=connected_default)
    group.add_argument("--disconnected", dest="connected", action="store_false")


def _profile(args) -> TangencyProfile:
    given = [args.mu0, args.nu0, args.muinf, args.nuinf]
    if all(x is None for x in given):
        return TangencyProfile.absolute(args.delta, args.d1, args.d2)
    mu0, nu0, muinf, nuinf = (parse_partition(x) if x else Partition() for x in given)
    return TangencyProfile(mu0, nu0, muinf, nuinf)


def _problem(args, refined: bool | None = None):
    from .invariants import Problem
    return Problem(args.delta, args.d1, args.d2, args.g, _profile(args),
                   args.refined if refined is None else refined, args.connected)


def _csv_row(problem, classical, refined) -> list[str]:
    p = problem.profile
    return [str(problem.delta), str(problem.d1), str(problem.d2), str(problem.g),
            format_partition(p.mu0), format_partition(p.muInf), format_partition(p.nu0), format_partition(p.nuInf),
            "" if classical is None else str(classical), "" if refined is None else str(refined)]


def _csv(rows: list[list[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    w.writerows(rows)
    return buf.getvalue().rstrip("\n")


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_invariant(args, out) -> int:
    from .invariants import relative_invariant
    res = relative_invariant(_problem(args))
    if args.format == "json":
        obj = res.to_json()
        obj["method"] = "floor-diagrams"
        print(_dump(obj), file=out)
    elif args.format == "csv":
        other = relative_invariant(_problem(args, not args.refined))
        cl, rf = (other, res) if args.refined else (res, other)
        print(_csv([_csv_row(res.problem, cl.value, rf.value)]), file=out)
    else:
        print(res.value, file=out)
    return EXIT_OK


def cmd_diagrams(args, out) -> int:
    prof = _profile(args)
    Ds = enumerate_diagrams(args.delta, args.d1, args.d2, args.g, prof, args.connected)
    if args.format == "text":
        for D in Ds:
            print(D.floors, [(e.tail, e.head, e.weight, e.fixed) for e in D.elevators], file=out)
    else:
        print(_dump([D.to_json() for D in Ds]), file=out)
    return EXIT_OK


def cmd_markings(args, out) -> int:
    from .multiplicities import diagram_mult
    prof = _profile(args)
    rows = []
    for D in enumerate_diagrams(args.delta, args.d1, args.d2, args.g, prof, args.connected):
        ms = enumerate_markings(D, prof)
        rows.append({
            "diagram": D.to_json(),
            "markings": [M.to_json()["marks"] for M in ms],
            "multiplicities": [scalar_to_json(diagram_mult(M, args.refined)) for M in ms],
        })
    if args.format == "text":
        for r in rows:
            print(len(r["markings"]), "markings:", ", ".join(
                m if isinstance(m, str) else json.dumps(m, sort_keys=True) for m in r["multiplicities"]), file=out)
    else:
        print(_dump(rows), file=out)
    return EXIT_OK


def cross_check_cells(deltas, max_d1, max_d2, max_g, max_part, refined, jobs=1):
    """Direct enumeration, recursion and Fock expectation on every cell of a grid."""
    from .invariants import invariant_table
    from .caporaso_harris import caporaso_harris
    from .fock import fock_invariant
    direct = invariant_table(deltas, range(max_d1 + 1), range(max_d2 + 1), range(-max(max_d2, 1), max_g + 1),
                             refined=refined, connected=False, max_part=max_part, jobs=jobs)
    cells = []
    for res in direct:
        pr = res.problem
        ch = caporaso_harris(pr)
        fk = fock_invariant(pr)
        cells.append({
            "problem": pr.to_json(),
            "direct": scalar_to_json(res.value),
            "caporaso_harris": scalar_to_json(ch),
            "fock": scalar_to_json(fk),
            "agree": res.value == ch == fk,
        })
    return cells


def cmd_cross_check(args, out) -> int:
    deltas = args.delta if args.delta else [0]
    cells = []
    for refined in ([False, True] if args.both else [args.refined]):
        cells += cross_check_cells(deltas, args.max_d1, args.max_d2, args.max_g, args.max_part, refined, args.jobs)
    bad = [c for c in cells if not c["agree"]]
    report = {"cells": len(cells), "disagreements": len(bad), "all_agree": not bad}
    report["details"] = cells if args.verbose else bad
    print(_dump(report), file=out)
    return EXIT_OK if not bad else EXIT_DISAGREE


def cmd_series(args, out) -> int:
    from .series import eisenstein, quasi_modular_check
    if args.eisenstein:
        s = eisenstein(args.eisenstein, args.order)
        print(_dump(s.to_json()) if args.format == "json" else " ".join(s.to_json()), file=out)
        return EXIT_OK
    if args.g is None or args.d2 is None:
        print("series needs --g and --d2 (or --eisenstein K)", file=sys.stderr)
        return EXIT_INPUT
    rep = quasi_modular_check(args.g, args.d2, args.delta, None, args.order)
    if args.format == "json":
        print(_dump(rep.to_json()), file=out)
    else:
        print("direct     ", " ".join(rep.direct.to_json()), file=out)
        print("structural ", " ".join(rep.structural.to_json()), file=out)
        print("ok" if rep.ok else "mismatch at y^%d" % rep.first_mismatch, file=out)
    return EXIT_OK if rep.ok else EXIT_DISAGREE


def _int_list(text: str) -> list[int]:
    out = []
    for chunk in text.split(","):
        if ".." in chunk:
            a, b = chunk.split("..")
            out.extend(range(int(a), int(b) + 1))
        elif chunk:
            out.append(int(chunk))
    return out


def _genus3_family(w: int) -> int:
    from .invariants import Problem, relative_invariant
    prof = TangencyProfile(Partition(), Partition.single(w), Partition(), Partition.single(w))
    return relative_invariant(Problem(0, 3, w, 3, prof)).value


def cmd_polyfit(args, out) -> int:
    from .series import poly_fit
    if args.samples:
        data = json.load(sys.stdin if args.samples == "-" else open(args.samples))
        inputs, values = data["inputs"], [Fraction(v) for v in data["values"]]
        heldout = [(p, Fraction(v)) for p, v in data.get("heldout", [])]
    else:
        train, test = _int_list(args.train), _int_list(args.test)
        inputs = train
        values = [_genus3_family(w) for w in train]
        heldout = [(w, _genus3_family(w)) for w in test]
    rep = poly_fit(inputs, values, args.degree, heldout)
    if args.format == "json":
        print(_dump(rep.to_json()), file=out)
    else:
        print(rep.polynomial, file=out)
        print("exact" if rep.exact else "inexact", "heldout", [str(r) for r in rep.heldout_residuals], file=out)
    return EXIT_OK


def cmd_fock_eval(args, out) -> int:
    from .fock import vacuum_expectation
    word = json.loads(args.word)
    gens = [(str(f), int(n)) for f, n in word]
    value = vacuum_expectation(gens, args.refined)
    print(_dump(scalar_to_json(value)) if args.format == "json" else value, file=out)
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ellifloor", description="Floor-diagram counts on line bundles over an elliptic curve")
    sub = parser.add_subparsers(dest="command", required=True)

    def fmt(p, default="text"):
        p.add_argument("--format", choices=["json", "csv", "text"], default=default)
        p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("invariant", help="one invariant from floor diagrams")
    _add_problem_args(p)
    fmt(p)
    p.set_defaults(func=cmd_invariant)

    p = sub.add_parser("diagrams", help="enumerate floor diagrams as JSON")
    _add_problem_args(p)
    fmt(p, "json")
    p.set_defaults(func=cmd_diagrams)

    p = sub.add_parser("markings", help="marking classes of every diagram")
    _add_problem_args(p)
    fmt(p, "json")
    p.set_defaults(func=cmd_markings)

    p = sub.add_parser("cross-check", help="enumeration vs recursion vs Fock on a grid")
    p.add_argument("--delta", type=int, action="append")
    p.add_argument("--max-d1", type=int, required=True)
    p.add_argument("--max-d2", type=int, required=True)
    p.add_argument("--max-g", type=int, required=True)
    p.add_argument("--max-part", type=int, default=2)
    p.add_argument("--refined", action="store_true")
    p.add_argument("--both", action="store_true", help="classical and refined")
    p.add_argument("--verbose", action="store_true", help="list every cell, not only disagreements")
    fmt(p, "json")
    p.set_defaults(func=cmd_cross_check)

    p = sub.add_parser("series", help="generating series and quasi-modularity check")
    p.add_argument("--g", type=int)
    p.add_argument("--d2", type=int)
    p.add_argument("--delta", type=int, default=0)
    p.add_argument("--order", type=int, default=6)
    p.add_argument("--eisenstein", type=int, default=None, help="print G_K instead")
    fmt(p)
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("polyfit", help="exact polynomial interpolation")
    p.add_argument("--samples", default=None, help="JSON file (or -) with inputs, values, heldout")
    p.add_argument("--train", default="1..12")
    p.add_argument("--test", default="13,14")
    p.add_argument("--degree", type=int, default=9)
    fmt(p)
    p.set_defaults(func=cmd_polyfit)

    p = sub.add_parser("fock-eval", help="vacuum expectation of a product of generators")
    p.add_argument("--word", required=True, help='JSON list such as [["a",1],["b",-1]]')
    p.add_argument("--refined", action="store_true")
    fmt(p)
    p.set_defaults(func=cmd_fock_eval)
    return parser


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except (ProfileError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print("error:", exc, file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
