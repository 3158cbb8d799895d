"""Command-line entry point.

Exit codes: 0 success, 1 verification failure, 2 usage, input or budget error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

from .certificate import CertificateError, certify, verify_certificate
from .enumerate import BudgetError
from .gf import FieldError, FieldSpec
from .hypergraph import BigHypergraph, copies_for_solution, count_copies
from .instances import ap_system, random_subset, random_system
from .normalize import Degenerate, LinSystem, apply_column_permutation, apply_removals, normalize
from .removal import STRATEGIES, count_solutions, iter_solutions, removal_pipeline
from .textio import (
    ParseError,
    format_certificate,
    format_field,
    format_instance,
    parse_certificate,
    parse_instance,
)


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load(path: str) -> LinSystem:
    return parse_instance(_read(path))


def _emit(args, text_lines, doc) -> None:
    if getattr(args, "json", False):
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print("\n".join(text_lines))


def _field_from(args) -> FieldSpec:
    return FieldSpec(args.p, args.n, tuple(args.modulus or ()))


def _normalized_certificate(s: LinSystem):
    out = normalize(s)
    if isinstance(out, Degenerate):
        raise UsageError(f"system is degenerate ({out.kind}: {out.reason}); no certificate")
    cert, A2 = certify(out.system.A)
    return apply_column_permutation(out, cert.trace.colperm), cert, A2


# -- subcommands ------------------------------------------------------------------


def cmd_field(args) -> int:
    F = _field_from(args)
    doc = {"p": F.p, "n": F.n, "q": F.q, "modulus": list(F.modulus)}
    _emit(args, [format_field(F), f"q: {F.q}"], doc)
    return 0


def cmd_gen(args) -> int:
    s = random_system(_field_from(args), args.k, args.m, args.seed, args.density,
                      args.plant, args.homogeneous)
    sys.stdout.write(format_instance(s))
    return 0


def cmd_ap(args) -> int:
    F = _field_from(args)
    X = args.set if args.set is not None else random_subset(F, args.density, args.seed)
    for e in X:
        if not 0 <= e < F.q:
            raise UsageError(f"{e} is not an element of {F!r}")
    sys.stdout.write(format_instance(ap_system(F, args.length, X)))
    return 0


def cmd_normalize(args) -> int:
    s = _load(args.instance)
    out = normalize(s)
    if isinstance(out, Degenerate):
        lines = [f"status: {out.kind}", f"reason: {out.reason}", "transcript:"]
        lines += ["  " + ln for ln in out.transcript.describe().splitlines()]
        doc = {"status": out.kind, "reason": out.reason,
               "transcript": out.transcript.describe().splitlines()}
    else:
        lines = ["status: normalized", f"k: {out.k}", f"m: {out.m}",
                 f"free_factor: {out.free_factor}", "transcript:"]
        lines += ["  " + ln for ln in out.transcript.describe().splitlines()]
        lines += ["instance:", format_instance(out.system).rstrip("\n")]
        doc = {"status": "normalized", "k": out.k, "m": out.m, "free_factor": out.free_factor,
               "transcript": out.transcript.describe().splitlines(),
               "instance": format_instance(out.system)}
    _emit(args, lines, doc)
    return 0


def cmd_certify(args) -> int:
    s = _load(args.instance)
    ns, cert, A2 = _normalized_certificate(s)
    report = verify_certificate(A2, cert)
    text = format_certificate(cert)
    doc = {"certificate": text, "ok": report.ok, "report": report.lines()}
    if args.json:
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        sys.stdout.write(text)
        print("\n".join(report.lines()))
    return 0 if report.ok else 1


def cmd_count(args) -> int:
    s = _load(args.instance)
    n = count_solutions(s, args.budget, args.threads)
    _emit(args, [f"solutions: {n}"], {"solutions": n})
    return 0


def cmd_copies(args) -> int:
    s = _load(args.instance)
    ns, cert, _ = _normalized_certificate(s)
    K = BigHypergraph.build(cert, ns.system.sets)
    q_k = K.edges_per_label
    sols = count_solutions(ns.system, args.budget, args.threads)
    copies = count_copies(K, budget=args.budget, threads=args.threads)
    ok = copies == q_k * sols
    lines = [f"copies: {copies}", f"normalized_solutions: {sols}", f"q^k: {q_k}",
             f"identity: {'pass' if ok else 'fail'}"]
    doc = {"copies": copies, "normalized_solutions": sols, "q_k": q_k, "identity": ok}
    if args.list:
        listing = []
        for x in iter_solutions(ns.system, args.budget):
            cs = copies_for_solution(K, x)
            listing.append({"solution": list(x), "assignments": [list(c.assignment) for c in cs]})
            lines.append(f"solution {' '.join(map(str, x))}")
            lines += ["  copy " + " ".join(map(str, c.assignment)) for c in cs]
        doc["listing"] = listing
    _emit(args, lines, doc)
    return 0 if ok else 1


def _report_doc(s: LinSystem, rep) -> dict:
    doc = rep.as_dict()
    doc["instance"] = format_instance(s)
    doc["certificate_digest"] = (
        hashlib.sha256(format_certificate(rep.certificate).encode()).hexdigest()
        if rep.certificate is not None else None
    )
    return doc


def cmd_remove(args) -> int:
    s = _load(args.instance)
    rep = removal_pipeline(s, args.strategy, args.budget, args.threads)
    doc = _report_doc(s, rep)
    if args.json:
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        c, r, v = doc["counts"], doc["removal"], doc["verification"]
        lines = [f"status: {rep.status}", f"strategy: {rep.strategy}"]
        lines += [f"{key}: {c[key]}" for key in sorted(c)]
        lines += [f"{key}: {r[key]}" for key in ("k", "m", "edge_set_size", "threshold",
                                                   "removed_pairs", "removed_elements")]
        for i, elems in sorted(rep.removed_original.items()):
            lines.append(f"remove X{i + 1}: {' '.join(map(str, elems))}")
        lines += [f"{key}: {v[key]}" for key in sorted(v)]
        lines.append(f"certificate_digest: {doc['certificate_digest']}")
        print("\n".join(lines))
    return 0 if rep.ok else 1


def cmd_verify(args) -> int:
    s = _load(args.instance)
    if args.certificate:
        cert = parse_certificate(_read(args.certificate))
        out = normalize(s)
        if isinstance(out, Degenerate):
            print(f"fail: instance is degenerate ({out.kind})")
            return 1
        if sorted(cert.trace.colperm) != list(range(out.m)):
            print("fail: certificate column permutation does not match the instance")
            return 1
        ns = apply_column_permutation(out, cert.trace.colperm)
        report = verify_certificate(ns.system.A, cert)
        print("\n".join(report.lines()))
        print("verify: " + ("pass" if report.ok else "fail"))
        return 0 if report.ok else 1
    with open(args.report, encoding="utf-8") as fh:
        doc = json.load(fh)
    failures = []
    if doc.get("instance") and parse_instance(doc["instance"]) != s:
        failures.append("report was produced for a different instance")
    removed = {int(i) - 1: v for i, v in doc["removal"]["removed_original"].items()}
    if any(not 0 <= i < s.m for i in removed):
        failures.append("removal refers to a nonexistent set")
    else:
        before = count_solutions(s, args.budget, args.threads)
        after = count_solutions(apply_removals(s, removed), args.budget, args.threads)
        if before != doc["counts"]["solutions_before"]:
            failures.append(f"solutions_before is {before}, report says "
                            f"{doc['counts']['solutions_before']}")
        if after != 0:
            failures.append(f"{after} solutions survive the removals")
        if doc["counts"]["final_solutions"] != after:
            failures.append("final_solutions disagrees with the recount")
    for f in failures:
        print(f"fail: {f}")
    print("verify: " + ("fail" if failures else "pass"))
    return 1 if failures else 0


# -- parser ---------------------------------------------------------------------------


def _add_field_args(p, positional=False):
    if positional:
        p.add_argument("p", type=int)
        p.add_argument("n", type=int, nargs="?", default=1)
    else:
        p.add_argument("--p", type=int, required=True, help="characteristic")
        p.add_argument("--n", type=int, default=1, help="extension degree")
    p.add_argument("--modulus", type=int, nargs="+",
                   help="ascending modulus coefficients c_0 .. c_n (monic)")


def _add_run_args(p):
    p.add_argument("--budget", type=int, default=None, help="enumeration budget (default 1e8)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--json", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linremoval",
        description="Removal machinery for linear systems over finite fields.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("field", help="describe GF(p^n)")
    _add_field_args(p, positional=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("gen", help="random instance")
    _add_field_args(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--plant", type=int, default=0, help="number of planted solutions")
    p.add_argument("--homogeneous", action="store_true")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("ap", help="arithmetic progression instance")
    _add_field_args(p)
    p.add_argument("--length", type=int, default=3)
    p.add_argument("--set", type=int, nargs="*", default=None, help="explicit set X")
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_ap)

    for name, func, hlp in [
        ("normalize", cmd_normalize, "reduce to canonical form"),
        ("certify", cmd_certify, "build and audit the kernel certificate"),
        ("count", cmd_count, "count solutions"),
        ("copies", cmd_copies, "count copies of H in K"),
        ("remove", cmd_remove, "run the removal pipeline"),
    ]:
        p = sub.add_parser(name, help=hlp)
        p.add_argument("instance", help="instance file ('-' for stdin)")
        _add_run_args(p)
        p.set_defaults(func=func)
        if name == "copies":
            p.add_argument("--list", action="store_true", help="list copies per solution")
        if name == "remove":
            p.add_argument("--strategy", choices=STRATEGIES, default="greedy")

    p = sub.add_parser("verify", help="re-check a certificate or removal report")
    p.add_argument("instance")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--certificate")
    grp.add_argument("--report", help="JSON report from 'remove --json'")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except BudgetError as e:
        print(f"error: budget exceeded: {e}", file=sys.stderr)
        return 2
    except (ParseError, FieldError, UsageError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except CertificateError as e:
        print(f"error: certificate construction failed: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
