"""Batch command line front end.

Exit codes: 0 for definite positive / completed output, 1 for definite
negative verdicts, 2 for input errors, 3 for undetermined verdicts.
Exact values are printed as "p/q" or "(c0 + c1*lam + ...)/q"; nothing is
ever rendered through floating point.

Budgets honour the environment overrides BRATTELI_MAX_LEVEL,
BRATTELI_MAX_CELLS and BRATTELI_CLOSURE_BOUND.
"""

import argparse
import json
import sys
from fractions import Fraction
from math import lcm

from ._infinity import is_infinite
from .classify import (
    BAD,
    GOOD,
    CertificateFailureError,
    back_and_forth,
    good_order_exists,
    homeomorphic,
    is_good,
)
from .construct import DensityError, odometer_from_grouplike
from .diagram import (
    DiagramError,
    EnumerationTooLargeError,
    class_decomposition,
    condensation_dot,
    diagram_from_json_dict,
)
from .exact import QQ, UNDETERMINED, group_from_generators
from .measure import degenerate_classes, ergodic_measures
from .svalues import ClopenValuesSet, clopen_values, svalues_member

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_UNDETERMINED = 3


class CliError(Exception):
    def __init__(self, message, code=EXIT_INPUT):
        super().__init__(message)
        self.code = code


def save_document(doc):
    """Canonical JSON serialization; loading and saving is byte stable."""
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def load_document(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    try:
        return diagram_from_json_dict(doc)
    except DiagramError as exc:
        raise CliError(f"{path}: {exc}")


def _measures_of(diagram):
    if not getattr(diagram, "stationary", False):
        raise CliError(
            "finite-rank documents are analyzable only through their "
            "construction metadata; stationary diagrams expected here"
        )
    return ergodic_measures(diagram)


def pick_measure(diagram, measures, class_index):
    if class_index is not None:
        for mu in measures:
            if mu.alpha == class_index - 1:
                return mu
        raise CliError(f"class {class_index} carries no ergodic measure")
    full = [mu for mu in measures if mu.full]
    if len(full) == 1:
        return full[0]
    raise CliError(
        "no unique full measure; select one with --measure CLASS "
        f"(candidates: {[m.alpha + 1 for m in measures]})"
    )


def _vertices_str(vertices):
    return "{" + ",".join(str(v + 1) for v in vertices) + "}"


def _root_str(alg):
    if alg.is_rational:
        return str(alg.as_rational())
    lo, hi = alg.interval()
    from .exact import poly_str

    return f"root of {poly_str(alg.minpoly)} in ({lo}, {hi}]"


def cmd_analyze(args):
    diagram = load_document(args.file)
    dec = class_decomposition(diagram)
    measures = _measures_of(diagram)
    degenerate = degenerate_classes(diagram, dec)
    lines = [f"diagram: {diagram.name or args.file} (stationary, {diagram.vertex_count} vertices)"]
    lines.append("classes:")
    minimal = set(dec.minimal_components())
    report_classes = []
    for i, cls in enumerate(dec.classes):
        tag = " [minimal]" if i in minimal else ""
        lines.append(f"  class {i + 1}: vertices {_vertices_str(cls)}{tag}")
        report_classes.append(
            {"index": i + 1, "vertices": [v + 1 for v in cls], "minimal": i in minimal}
        )
    lines.append("measures:")
    report_measures = []
    for mu in measures:
        tag = "finite" if mu.finite else "infinite"
        lines.append(
            f"  class {mu.alpha + 1} {_vertices_str(mu.alpha_vertices())}: {tag}, "
            f"lambda = {_root_str(mu.lam_algebraic)}, "
            f"finite part on {_vertices_str(mu.b_f)}, mass = {mu.mass.exact_str()}"
        )
        report_measures.append(
            {
                "class": mu.alpha + 1,
                "kind": tag,
                "lambda": _root_str(mu.lam_algebraic),
                "finite_subdiagram": [v + 1 for v in mu.b_f],
                "support": [v + 1 for v in mu.support],
                "mass": mu.mass.exact_str(),
                "eigenvector": {v + 1: mu.x[v].exact_str() for v in mu.b_f},
            }
        )
    if degenerate:
        lines.append(
            "degenerate classes (no ergodic measure): "
            + ", ".join(f"{i + 1} (root {_root_str(r)})" for i, r in degenerate)
        )
    note = (
        "clopen values sets are compared only through their exact presentations; "
        "equalities claimed under external normalizations are not asserted"
    )
    lines.append(f"note: {note}")
    if args.json:
        out = {
            "diagram": diagram.to_json_dict(),
            "classes": report_classes,
            "measures": report_measures,
            "degenerate_classes": [i + 1 for i, _ in degenerate],
            "note": note,
        }
        sys.stdout.write(save_document(out))
    else:
        print("\n".join(lines))
    return EXIT_OK


def _parse_fraction(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise CliError(f"cannot parse rational value {text!r}")


def cmd_svalues(args):
    diagram = load_document(args.file)
    mu = pick_measure(diagram, _measures_of(diagram), args.measure)
    svals = clopen_values(mu, normalized=args.normalized)
    rows = []
    saw_undetermined = False
    for text in args.member:
        value = _parse_fraction(text)
        res = svalues_member(svals, value)
        rows.append((text, res))
        saw_undetermined = saw_undetermined or res.status == UNDETERMINED
    print(f"measure: class {mu.alpha + 1}, values set: {svals.describe()}")
    for text, res in rows:
        extra = f" (lambda power {res.n})" if res.status == "yes" and res.n else ""
        print(f"  {text}: {res.status}{extra}")
    if args.json:
        sys.stdout.write(
            save_document(
                {
                    "set": svals.describe(),
                    "members": {t: r.status for t, r in rows},
                }
            )
        )
    return EXIT_UNDETERMINED if saw_undetermined else EXIT_OK


def cmd_good(args):
    diagram = load_document(args.file)
    mu = pick_measure(diagram, _measures_of(diagram), args.measure)
    verdict = is_good(mu, closure_bound=args.bound)
    detail = verdict.detail or {}
    crit = detail.get("rational_criterion")
    if verdict.status == GOOD:
        print(f"good: {mu.name}")
        if crit:
            print(
                f"  criterion: gcd {crit['alpha_gcd']} divides "
                f"lambda^{crit['power']} = {crit['lambda']}^{crit['power']}"
            )
    elif verdict.status == BAD:
        w = verdict.witness
        print(f"bad: {mu.name}")
        if crit:
            print(
                f"  criterion: gcd {crit['alpha_gcd']} never divides a power "
                f"of lambda = {crit['lambda']}"
            )
        print(
            f"  witness: no clopen subset of the level-{w.region.level} cylinder "
            f"ending at vertex {w.vertex + 1} region attains {w.value.exact_str()}"
        )
    else:
        print(f"undetermined: {mu.name} (raise BRATTELI_CLOSURE_BOUND to search further)")
    if args.json:
        out = {"verdict": verdict.status}
        if verdict.witness is not None:
            out["witness"] = {
                "region": verdict.witness.region.to_json_dict(),
                "value": verdict.witness.value.exact_str(),
                "vertex": verdict.witness.vertex + 1,
            }
        if crit:
            out["rational_criterion"] = {k: str(v) for k, v in crit.items()}
        sys.stdout.write(save_document(out))
    if verdict.status == GOOD:
        return EXIT_OK
    return EXIT_NEGATIVE if verdict.status == BAD else EXIT_UNDETERMINED


_REASON_TEXT = {
    "svalues_mismatch": "clopen values sets differ",
    "defective_profile_mismatch": "defective sets differ",
    "goodness_mismatch": "goodness mismatch",
    "criteria_met": "criteria met",
}


def cmd_homeo(args):
    da = load_document(args.file_a)
    db = load_document(args.file_b)
    ma = pick_measure(da, _measures_of(da), args.measure_a)
    mb = pick_measure(db, _measures_of(db), args.measure_b)
    verdict = homeomorphic(ma, mb)
    if verdict.verdict == "homeomorphic":
        print("homeomorphic")
        code = EXIT_OK
    elif verdict.verdict == "not_homeomorphic":
        print(f"not homeomorphic ({_REASON_TEXT.get(verdict.reason, verdict.reason)})")
        code = EXIT_NEGATIVE
    else:
        print("undetermined (the criteria are silent for this pair)")
        code = EXIT_UNDETERMINED
    if args.json:
        sys.stdout.write(save_document({"verdict": verdict.verdict, "reason": verdict.reason}))
    return code


def cmd_certify(args):
    da = load_document(args.file_a)
    db = load_document(args.file_b)
    ma = pick_measure(da, _measures_of(da), args.measure_a)
    mb = pick_measure(db, _measures_of(db), args.measure_b)
    try:
        cert = back_and_forth(ma, mb, args.depth)
    except (ValueError, CertificateFailureError) as exc:
        print(f"certificate failed: {exc}")
        return EXIT_NEGATIVE
    if not cert.verify():
        print("certificate failed verification")
        return EXIT_NEGATIVE
    text = save_document(cert.to_json_dict())
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"verified certificate of depth {cert.depth} written to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_construct(args):
    gens = []
    for chunk in args.grouplike.replace(",", " ").split():
        gens.append(_parse_fraction(chunk))
    if not gens or any(g <= 0 for g in gens):
        raise CliError("--grouplike needs positive rational generators")
    # the subring generated by the values: Z[1/B] with B the lcm of denominators
    b = lcm(*(g.denominator for g in gens))
    group = group_from_generators(QQ, [1])
    lam = QQ.from_rational(b) if b > 1 else None
    svals = ClopenValuesSet(QQ, group, lam=lam)
    try:
        diagram, measure = odometer_from_grouplike(svals, name=f"grouplike[{args.grouplike}]")
    except DensityError as exc:
        print(f"density violation: {exc}")
        return EXIT_NEGATIVE
    doc = diagram.to_json_dict()
    doc.setdefault("metadata", {})
    doc["metadata"].update(
        {
            "provenance": "odometer_extension",
            "generators": [str(g) for g in gens],
            "prefix_primes": list(measure.prefix_primes),
            "cycle_primes": list(measure.cycle_primes),
            "values_set": measure.svalues.describe(),
            "edge_order": "lexicographic",
        }
    )
    text = save_document(doc)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"construction written to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_dot(args):
    diagram = load_document(args.file)
    sys.stdout.write(condensation_dot(diagram))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bratteli",
        description="Exact analysis of ergodic tail-invariant measures on Bratteli diagrams",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="classes, Perron roots, measures with finiteness tags")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("svalues", help="membership table for the clopen values set")
    p.add_argument("file")
    p.add_argument("--measure", type=int, default=None, help="1-based class index")
    p.add_argument("--member", action="append", required=True, help="rational value p/q")
    p.add_argument("--normalized", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_svalues)

    p = sub.add_parser("good", help="goodness verdict (with witness when bad)")
    p.add_argument("file")
    p.add_argument("--measure", type=int, default=None)
    p.add_argument("--bound", type=int, default=None, help="lambda-power search bound")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_good)

    p = sub.add_parser("homeo", help="homeomorphism verdict for two diagram measures")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--measure-a", type=int, default=None)
    p.add_argument("--measure-b", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_homeo)

    p = sub.add_parser("certify", help="back-and-forth certificate between two measures")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--measure-a", type=int, default=None)
    p.add_argument("--measure-b", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("construct", help="diagram realizing a dense rational group-like set")
    p.add_argument("--grouplike", required=True, help="rational generators, e.g. '1, 1/6'")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("dot", help="DOT export of the condensation DAG")
    p.add_argument("file")
    p.set_defaults(func=cmd_dot)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (DiagramError, EnumerationTooLargeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
