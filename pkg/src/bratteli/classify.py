"""Goodness and homeomorphism classification of non-defective measures.

Goodness of an ergodic diagram measure reduces to an exact group question:
the measure is good iff some lambda power pushes every finite-subdiagram
entry outside the measure's own class into the additive group generated by
the class entries.  For rational eigenvectors this is the gcd criterion
"gcd of the class numerators divides a power of lambda" and is decided
completely; over a number field the bounded coset search may come back
undetermined, which is surfaced, never guessed.

Homeomorphism verdicts combine goodness, equality of clopen values sets
and the defective-set profile.  When both measures are bad the criteria
are silent (the values set is not a complete invariant) and the verdict is
undetermined.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from math import gcd, lcm

from ._infinity import INF, is_infinite
from .diagram import ClopenSet, CylinderSet
from .exact import NO, UNDETERMINED, YES, QQ, group_from_generators, lambda_closure_member
from .measure import DefectiveProfile, ErgodicMeasure, defective_profile
from .oracle import (
    EnumerationBudget,
    _BudgetExhausted,
    _NodeBudget,
    as_space,
    bounded_combinations,
)
from .svalues import clopen_values, find_svalues_scale, svalues_equal

GOOD = "good"
BAD = "bad"
HOMEOMORPHIC = "homeomorphic"
NOT_HOMEOMORPHIC = "not_homeomorphic"

REASON_SVALUES = "svalues_mismatch"
REASON_PROFILE = "defective_profile_mismatch"
REASON_GOODNESS = "goodness_mismatch"
REASON_CRITERIA = "criteria_met"


@dataclass(frozen=True)
class GoodnessWitness:
    """A bad pair: a cylinder region and a clopen value smaller than its
    measure that no clopen subset can attain."""

    region: ClopenSet
    value: object
    vertex: int           # original-diagram vertex whose entry fails the group test
    certificate: object   # the definite "no" closure result


@dataclass(frozen=True)
class GoodnessVerdict:
    status: str                 # good | bad | undetermined
    witness: GoodnessWitness | None = None
    detail: dict | None = None

    def __bool__(self):
        return self.status == GOOD


def _alpha_group(mu):
    return group_from_generators(mu.field, [mu.x[v] for v in mu.alpha_vertices()])


def _rational_criterion(mu):
    """The gcd form of the criterion, for reporting: with the finite part
    written as (p_1/q, ..., p_n/q), fully reduced, the measure is good iff
    the gcd of the class numerators divides a power of lambda."""
    from .exact.polys import factor_int

    q = lcm(*(mu.x[v].as_fraction().denominator for v in mu.b_f))
    numerators = {v: int(mu.x[v].as_fraction() * q) for v in mu.b_f}
    overall = gcd(*(numerators[v] for v in mu.b_f))
    numerators = {v: p // overall for v, p in numerators.items()}
    g = gcd(*(numerators[v] for v in mu.alpha_vertices()))
    lam = int(mu.lam.as_fraction())
    lam_factors = factor_int(lam)
    divides, r = True, 0
    for p, e in factor_int(g).items() if g > 1 else ():
        if p not in lam_factors:
            divides, r = False, None
            break
        r = max(r, -(-e // lam_factors[p]))
    return {
        "denominator": q,
        "numerators": {v + 1: numerators[v] for v in sorted(numerators)},
        "alpha_gcd": g,
        "lambda": lam,
        "gcd_divides_lambda_power": divides,
        "power": r,
    }


def is_good(mu, closure_bound=None):
    """Goodness verdict with a certified witness in the bad case.

    Objects built good by construction (product and compactification
    objects, constructed odometer extensions) report good directly.
    """
    if getattr(mu, "good_by_construction", False):
        return GoodnessVerdict(GOOD, detail={"note": "good by construction"})
    if not isinstance(mu, ErgodicMeasure):
        raise TypeError(f"cannot decide goodness of {mu!r}")
    alpha_set = set(mu.alpha_vertices())
    others = [v for v in mu.b_f if v not in alpha_set]
    detail = {}
    if mu.field is QQ:
        detail["rational_criterion"] = _rational_criterion(mu)
    if not others:
        detail["note"] = "finite subdiagram equals the measure class; nothing to check"
        return GoodnessVerdict(GOOD, detail=detail)
    h_alpha = _alpha_group(mu)
    results = {}
    failing = None
    undecided = False
    for v in others:
        res = lambda_closure_member(h_alpha, mu.lam, mu.x[v], bound=closure_bound)
        results[v] = res
        if res.status == NO and failing is None:
            failing = v
        undecided = undecided or res.status == UNDETERMINED
    detail["memberships"] = {v + 1: r.status for v, r in results.items()}
    if failing is not None:
        witness = _bad_witness(mu, failing, results[failing])
        return GoodnessVerdict(BAD, witness=witness, detail=detail)
    if undecided:
        return GoodnessVerdict(UNDETERMINED, detail=detail)
    detail["power"] = max((r.n for r in results.values()), default=0)
    return GoodnessVerdict(GOOD, detail=detail)


def _bad_witness(mu, vertex, certificate):
    """Region: a cylinder ending in the measure class; value: x_vertex / lambda^M
    below the region's measure.  Subsets of the region only realize values in
    the lambda closure of the class group, which the certificate excludes."""
    space, index = mu.support_diagram()
    a = mu.alpha_vertices()[0]
    region = ClopenSet(
        space, [CylinderSet(space, (index[a],), (0,))], normalized=True
    )
    region_value = mu.x[a] / mu.lam
    m = 1
    value = mu.x[vertex] / mu.lam
    while not (value < region_value):
        m += 1
        value = value / mu.lam
    return GoodnessWitness(region=region, value=value, vertex=vertex, certificate=certificate)


@dataclass(frozen=True)
class HomeoVerdict:
    verdict: str          # homeomorphic | not_homeomorphic | undetermined
    reason: str | None = None

    def __bool__(self):
        return self.verdict == HOMEOMORPHIC


def _svalues_of(m, closure_bound=None):
    if isinstance(m, ErgodicMeasure):
        return clopen_values(m)
    if hasattr(m, "svalues"):
        return m.svalues
    raise TypeError(f"no clopen values set for {m!r}")


def _profile_of(m):
    if isinstance(m, ErgodicMeasure):
        return defective_profile(m)
    if hasattr(m, "profile"):
        return m.profile
    raise TypeError(f"no defective profile for {m!r}")


def _identical(a, b):
    if a is b:
        return True
    if isinstance(a, ErgodicMeasure) and isinstance(b, ErgodicMeasure):
        return a.equivalent_to(b)
    return False


def homeomorphic(a, b, closure_bound=None):
    """Measure-homeomorphism verdict for two non-defective measures.

    Requires single ergodic measures or good abstract objects; sums with a
    positively charged defective set are rejected.
    """
    for m in (a, b):
        if not (isinstance(m, ErgodicMeasure) or hasattr(m, "svalues")):
            raise TypeError("homeomorphism verdicts need non-defective measures")
    if _identical(a, b):
        return HomeoVerdict(HOMEOMORPHIC, REASON_CRITERIA)
    ga, gb = is_good(a, closure_bound), is_good(b, closure_bound)
    if UNDETERMINED in (ga.status, gb.status):
        return HomeoVerdict(UNDETERMINED)
    if (ga.status == GOOD) != (gb.status == GOOD):
        return HomeoVerdict(NOT_HOMEOMORPHIC, REASON_GOODNESS)
    if ga.status == BAD:
        # the clopen values set is not a complete invariant for bad measures
        return HomeoVerdict(UNDETERMINED)
    eq = svalues_equal(_svalues_of(a), _svalues_of(b), closure_bound)
    if eq is False:
        return HomeoVerdict(NOT_HOMEOMORPHIC, REASON_SVALUES)
    if eq is None:
        return HomeoVerdict(UNDETERMINED)
    pa, pb = _profile_of(a), _profile_of(b)
    same = pa.same_kind(pb)
    if same is None:
        return HomeoVerdict(UNDETERMINED)
    if not same:
        return HomeoVerdict(NOT_HOMEOMORPHIC, REASON_PROFILE)
    return HomeoVerdict(HOMEOMORPHIC, REASON_CRITERIA)


@dataclass(frozen=True)
class WeakHomeoVerdict:
    verdict: str              # homeomorphic | not_homeomorphic | undetermined
    scale: Fraction | None    # c with c * S(first) = S(second), when found

    def __bool__(self):
        return self.verdict == HOMEOMORPHIC


def weakly_homeomorphic(a, b, closure_bound=None):
    """Search for c > 0 with c * S(a) = S(b) and matching defective profiles."""
    ga, gb = is_good(a, closure_bound), is_good(b, closure_bound)
    if UNDETERMINED in (ga.status, gb.status):
        return WeakHomeoVerdict(UNDETERMINED, None)
    if ga.status == BAD or gb.status == BAD:
        raise ValueError("weak homeomorphism comparison is defined for good measures")
    pa, pb = _profile_of(a), _profile_of(b)
    same = pa.same_kind(pb)
    if same is None:
        return WeakHomeoVerdict(UNDETERMINED, None)
    if not same:
        return WeakHomeoVerdict(NOT_HOMEOMORPHIC, None)
    search = find_svalues_scale(_svalues_of(a), _svalues_of(b), closure_bound)
    if search.scale is not None:
        return WeakHomeoVerdict(HOMEOMORPHIC, search.scale)
    return WeakHomeoVerdict(
        NOT_HOMEOMORPHIC if search.definite else UNDETERMINED, None
    )


def good_order_exists(m):
    """Whether the measure admits a good order: exactly when the defective
    set is a single point.  None when the profile is unknown."""
    profile = _profile_of(m)
    if profile.kind == DefectiveProfile.EMPTY:
        raise ValueError(
            "good-order predicate applies to infinite measures; "
            "this measure has an empty defective set"
        )
    if not profile.definite:
        return None
    return profile.kind == DefectiveProfile.SINGLE_POINT


class CertificateFailureError(Exception):
    """A matching step of the back-and-forth construction failed; carries the
    offending cell (signals a goodness or values-set defect)."""

    def __init__(self, message, cell=None):
        super().__init__(message)
        self.cell = cell


@dataclass
class MatchedCell:
    left: ClopenSet
    right: ClopenSet
    parent: int | None
    infinite: bool
    value_text: str


@dataclass
class Stage:
    cells: list
    refined_side: str  # "left" / "right" / "start"


class BackForthCertificate:
    """Stages of paired clopen partitions with measure-matching bijections."""

    def __init__(self, left_measure, right_measure, stages):
        self.left_measure = left_measure
        self.right_measure = right_measure
        self.stages = stages

    @property
    def depth(self):
        return len(self.stages) - 1

    def verify(self):
        """Re-check partition structure, refinement and value matching.

        Partition-ness is checked locally: the children of every cell must
        tile it exactly, which together with the stage-0 cell being the
        whole space makes every stage a partition of the whole.
        """
        left = as_space(self.left_measure)
        right = as_space(self.right_measure)

        def tiles(parts, parent):
            nonempty = [p for p in parts if not p.is_empty()]
            if not nonempty:
                return parent.is_empty()
            level = max(max(p.level for p in nonempty), parent.level)
            seen = set()
            for part in nonempty:
                for cyl in part.refined_to(level).cylinders:
                    key = cyl.key()
                    if key in seen:
                        return False  # overlap
                    seen.add(key)
            parent_keys = {c.key() for c in parent.refined_to(level).cylinders}
            return seen == parent_keys

        first = self.stages[0].cells
        if len(first) != 1:
            return False
        if not (first[0].left == left.whole() and first[0].right == right.whole()):
            return False
        for j, stage in enumerate(self.stages):
            for cell in stage.cells:
                va = left.clopen_value(cell.left)
                vb = right.clopen_value(cell.right)
                if not _values_match(va, vb):
                    return False
                if cell.infinite != is_infinite(va):
                    return False
            if j == 0:
                continue
            by_parent = {}
            for cell in stage.cells:
                by_parent.setdefault(cell.parent, []).append(cell)
            if set(by_parent) != set(range(len(self.stages[j - 1].cells))):
                return False
            for parent_idx, cells in by_parent.items():
                parent = self.stages[j - 1].cells[parent_idx]
                if not tiles([c.left for c in cells], parent.left):
                    return False
                if not tiles([c.right for c in cells], parent.right):
                    return False
        return True

    def to_json_dict(self):
        return {
            "depth": self.depth,
            "stages": [
                {
                    "refined_side": stage.refined_side,
                    "cells": [
                        {
                            "left": cell.left.to_json_dict(),
                            "right": cell.right.to_json_dict(),
                            "parent": cell.parent,
                            "value": cell.value_text,
                        }
                        for cell in stage.cells
                    ],
                }
                for stage in self.stages
            ],
        }


def _values_match(a, b):
    if is_infinite(a) or is_infinite(b):
        return is_infinite(a) and is_infinite(b)
    if a.field is b.field:
        return a == b
    if a.is_rational and b.is_rational:
        return a.as_fraction() == b.as_fraction()
    raise CertificateFailureError(
        "values of the two measures lie in incomparable fields"
    )


def _value_text(v):
    return "inf" if is_infinite(v) else v.exact_str()


def _match_partition(space, container, targets, budget):
    """Partition `container` into cells matching `targets` exactly.

    targets: list of finite field values and INF entries.  Finite targets
    are realized by exact cylinder-count combinations; infinite targets
    split the remaining infinite cylinders (absorbing finite leftovers).
    """
    inf_positions = [i for i, t in enumerate(targets) if is_infinite(t)]
    fin_positions = [i for i, t in enumerate(targets) if not is_infinite(t)]
    order = sorted(
        fin_positions,
        key=cmp_to_key(lambda i, j: (targets[j] - targets[i]).sign()),
    )
    t_inf = len(inf_positions)
    for level in range(container.level, budget.max_level + 1):
        refined = container.refined_to(level)
        groups = {}
        inf_cyls = []
        for cyl in refined.cylinders:
            v = space.cylinder_value(cyl)
            if is_infinite(v):
                inf_cyls.append(cyl)
            else:
                groups.setdefault(cyl.terminal_vertex, []).append(cyl)
        if t_inf == 0 and inf_cyls:
            raise CertificateFailureError(
                "finite targets cannot cover an infinite region", container
            )
        if t_inf and len(inf_cyls) < t_inf:
            continue  # refine further: infinite cylinders multiply
        vertices = sorted(groups)
        units = [(space.vertex_value(v, level), v) for v in vertices]
        units = sorted(units, key=cmp_to_key(lambda a, b: (b[0] - a[0]).sign()))
        avail = {v: len(groups[v]) for v in vertices}
        node_budget = _NodeBudget(budget.max_cells)
        assignment = {}

        def solve(pos):
            if pos == len(order):
                return True
            if t_inf == 0 and pos == len(order) - 1:
                # exactness of the remainder is forced by the value identity
                assignment[order[pos]] = tuple(avail[v] for _, v in units)
                return True
            idx = order[pos]
            unit_list = [(u, avail[v]) for u, v in units]
            for ks in bounded_combinations(unit_list, targets[idx], node_budget):
                for k, (_, v) in zip(ks, units):
                    avail[v] -= k
                assignment[idx] = ks
                if solve(pos + 1):
                    return True
                for k, (_, v) in zip(ks, units):
                    avail[v] += k
                del assignment[idx]
            return False

        try:
            solved = solve(0)
        except _BudgetExhausted:
            raise CertificateFailureError("matching budget exhausted", container)
        if not solved:
            continue
        taken = {v: 0 for v in vertices}
        out = [None] * len(targets)
        for idx in fin_positions:
            ks = assignment[idx]
            chosen = []
            for k, (_, v) in zip(ks, units):
                chosen.extend(groups[v][taken[v] : taken[v] + k])
                taken[v] += k
            out[idx] = ClopenSet(space.diagram, chosen, normalized=True)
        if t_inf == 0 and fin_positions:
            last = out[order[-1]]
            if not (space.clopen_value(last) == targets[order[-1]]):
                continue
        leftovers = []
        for v in vertices:
            leftovers.extend(groups[v][taken[v] :])
        # spread surplus cylinders round-robin so no single infinite cell
        # concentrates finite mass its future partner cannot match
        for pos, idx in enumerate(inf_positions):
            rest = inf_cyls[pos::t_inf] + leftovers[pos::t_inf]
            out[idx] = ClopenSet(space.diagram, rest)
        return out
    raise CertificateFailureError(
        "no exact matching partition within the level budget", container
    )


def _split_cell(space, clopen):
    """Refine a cell: finite cylinders become singleton pieces, the infinite
    part splits into at most two infinite pieces.

    Keeping the infinite part coarse is what makes exact matching feasible:
    infinite-cylinder counts grow at diagram-specific rates, so fully
    atomizing them forces the partner side arbitrarily deep.  A cell that is
    a single infinite cylinder is refined one level first, so every cell
    strictly refines at every stage.
    """
    cylinders = clopen.cylinders
    if len(cylinders) == 1:
        cylinders = cylinders[0].children()
    fin, inf_cyls = [], []
    for c in cylinders:
        (inf_cyls if is_infinite(space.cylinder_value(c)) else fin).append(c)
    pieces = [ClopenSet(space.diagram, [c], normalized=True) for c in fin]
    if len(inf_cyls) >= 2:
        mid = (len(inf_cyls) + 1) // 2
        pieces.append(ClopenSet(space.diagram, inf_cyls[:mid]))
        pieces.append(ClopenSet(space.diagram, inf_cyls[mid:]))
    elif inf_cyls:
        pieces.append(ClopenSet(space.diagram, inf_cyls))
    return pieces


def back_and_forth(mu, nu, depth, budget=None, closure_bound=None):
    """Build a depth-k certificate of the homeomorphism criteria.

    Preconditions: both measures good, equal clopen values sets and matching
    definite profiles; definite failures raise, and a failed matching step
    raises CertificateFailureError with the offending cell.
    """
    budget = budget or EnumerationBudget(max_level=depth + 4)
    if not is_good(mu, closure_bound):
        raise ValueError("left measure is not certified good")
    if not is_good(nu, closure_bound):
        raise ValueError("right measure is not certified good")
    if svalues_equal(_svalues_of(mu), _svalues_of(nu), closure_bound) is False:
        raise ValueError("clopen values sets differ")
    same = _profile_of(mu).same_kind(_profile_of(nu))
    if same is False:
        raise ValueError("defective profiles differ")
    left = as_space(mu)
    right = as_space(nu)
    whole_l, whole_r = left.whole(), right.whole()
    v0 = left.clopen_value(whole_l)
    if not _values_match(v0, right.clopen_value(whole_r)):
        raise CertificateFailureError("total masses differ", whole_l)
    stages = [
        Stage(
            [MatchedCell(whole_l, whole_r, None, is_infinite(v0), _value_text(v0))],
            "start",
        )
    ]
    for j in range(1, depth + 1):
        refine_left = j % 2 == 1
        src_space, dst_space = (left, right) if refine_left else (right, left)
        new_cells = []
        for idx, cell in enumerate(stages[-1].cells):
            src = cell.left if refine_left else cell.right
            dst = cell.right if refine_left else cell.left
            pieces = _split_cell(src_space, src)
            targets = [src_space.clopen_value(p) for p in pieces]
            matched = _match_partition(dst_space, dst, targets, budget)
            for piece, partner, value in zip(pieces, matched, targets):
                l, r = (piece, partner) if refine_left else (partner, piece)
                new_cells.append(
                    MatchedCell(l, r, idx, is_infinite(value), _value_text(value))
                )
        stages.append(Stage(new_cells, "left" if refine_left else "right"))
    return BackForthCertificate(mu, nu, stages)
