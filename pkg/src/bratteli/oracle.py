"""Brute-force ground truth at desk scale.

Everything here enumerates honestly: exhaustive clopen values, exact
subset-sum searches for goodness witnesses, partition searches for
refinability, and exact invariance counting for odometer maps.  A search
that runs out of budget reports "inconclusive", which is strictly
distinguished from an exhaustive "none"; turning either into a verdict is
the classification layer's job.
"""

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key

from ._infinity import INF, is_infinite
from .diagram import ClopenSet, cylinders_at_level
from .measure import ErgodicMeasure, MeasureSum
from .svalues import clopen_values

DEFAULT_MAX_LEVEL = int(os.environ.get("BRATTELI_MAX_LEVEL", "5"))
DEFAULT_MAX_CELLS = int(os.environ.get("BRATTELI_MAX_CELLS", str(10**6)))


@dataclass(frozen=True)
class EnumerationBudget:
    max_level: int = DEFAULT_MAX_LEVEL
    max_cells: int = DEFAULT_MAX_CELLS
    value_bound: object = None

    def __post_init__(self):
        if self.max_level < 1 or self.max_cells < 1:
            raise ValueError("budget must be positive")


class _NodeBudget:
    def __init__(self, cap):
        self.cap = cap
        self.used = 0

    def spend(self):
        self.used += 1
        if self.used > self.cap:
            raise _BudgetExhausted


class _BudgetExhausted(Exception):
    pass


class SupportSpace:
    """An ergodic diagram measure viewed on its own support diagram."""

    def __init__(self, mu):
        self.measure = mu
        self.diagram, self.index = mu.support_diagram()
        self.inverse = {i: v for v, i in self.index.items()}
        self.field = mu.field

    def vertex_value(self, space_vertex, level):
        return self.measure.vertex_value(self.inverse[space_vertex], level)

    def cylinder_value(self, cyl):
        return self.vertex_value(cyl.terminal_vertex, cyl.level)

    def clopen_value(self, clopen):
        total = self.field.zero()
        for c in clopen.cylinders:
            v = self.cylinder_value(c)
            if is_infinite(v):
                return INF
            total = total + v
        return total

    def level_units(self, level):
        """(finite units, infinite count): units are (vertex, unit value, count)."""
        h = self.diagram.path_counts(level)
        finite, inf_count = [], 0
        for i in range(self.diagram.vertex_count):
            value = self.vertex_value(i, level)
            if is_infinite(value):
                inf_count += h[i]
            elif not value.is_zero():
                finite.append((i, value, h[i]))
        return finite, inf_count

    def whole(self, level=1):
        return ClopenSet(self.diagram, cylinders_at_level(self.diagram, level), normalized=True)


class SumSpace:
    """A weighted sum of ergodic measures on the union of their supports."""

    def __init__(self, sum_measure):
        self.measure = sum_measure
        vertices = sum_measure.space_vertices()
        self.diagram, self.index = sum_measure.diagram.restrict(vertices)
        self.inverse = {i: v for v, i in self.index.items()}
        self.field = sum_measure.terms[0][0].field

    def vertex_value(self, space_vertex, level):
        orig = self.inverse[space_vertex]
        total = None
        for mu, w in self.measure.terms:
            v = mu.vertex_value(orig, level)
            if is_infinite(v):
                return INF
            contrib = w * v
            total = contrib if total is None else total + contrib
        return total

    def cylinder_value(self, cyl):
        return self.vertex_value(cyl.terminal_vertex, cyl.level)

    def clopen_value(self, clopen):
        total = self.field.zero()
        for c in clopen.cylinders:
            v = self.cylinder_value(c)
            if is_infinite(v):
                return INF
            total = total + v
        return total

    def level_units(self, level):
        h = self.diagram.path_counts(level)
        finite, inf_count = [], 0
        for i in range(self.diagram.vertex_count):
            value = self.vertex_value(i, level)
            if is_infinite(value):
                inf_count += h[i]
            elif not value.is_zero():
                finite.append((i, value, h[i]))
        return finite, inf_count

    def whole(self, level=1):
        return ClopenSet(self.diagram, cylinders_at_level(self.diagram, level), normalized=True)


def as_space(mu):
    if isinstance(mu, ErgodicMeasure):
        return SupportSpace(mu)
    if isinstance(mu, MeasureSum):
        return SumSpace(mu)
    if hasattr(mu, "level_units") and hasattr(mu, "cylinder_value"):
        return mu
    raise TypeError(f"cannot view {mu!r} as a cylinder space")


def _floor_multiples(value, cap, target):
    """Largest k <= cap with k * value <= target (value > 0)."""
    if value.is_rational and (not hasattr(target, "field") or target.is_rational):
        t = target if isinstance(target, Fraction) else target.as_fraction()
        k = int(t / value.as_fraction())
        return min(cap, k)
    lo, hi = 0, cap
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid * value <= target:
            lo = mid
        else:
            hi = mid - 1
    return lo


def bounded_combinations(units, target, node_budget):
    """Yield (k_1, ..., k_m) with sum k_i * v_i = target, 0 <= k_i <= cap_i.

    units: list of (value, cap) with positive finite values.  Deterministic
    order: larger values first, counts descending.
    """
    m = len(units)
    suffix_max = [None] * (m + 1)
    zero = target - target
    suffix_max[m] = zero
    for i in range(m - 1, -1, -1):
        suffix_max[i] = suffix_max[i + 1] + units[i][1] * units[i][0]

    ks = [0] * m

    def rec(i, remaining):
        node_budget.spend()
        if remaining.is_zero() if hasattr(remaining, "is_zero") else remaining == 0:
            for j in range(i, m):
                ks[j] = 0
            yield tuple(ks)
            return
        if i == m:
            return
        if suffix_max[i] < remaining:
            return
        value, cap = units[i]
        top = _floor_multiples(value, cap, remaining)
        for k in range(top, -1, -1):
            ks[i] = k
            yield from rec(i + 1, remaining - k * value)
        ks[i] = 0

    yield from rec(0, target)


@dataclass(frozen=True)
class EnumeratedValues:
    values: tuple
    complete: bool  # False when the cap truncated the enumeration


def _sorted_values(field, values):
    if field.is_rational:
        return tuple(sorted(values, key=lambda v: v.as_fraction()))
    return tuple(sorted(values, key=cmp_to_key(lambda a, b: (a - b).sign())))


def _enumerate_rational(space, units, bound, max_cells):
    """Bounded-knapsack sum set over a common denominator, via a bitmask."""
    from math import lcm

    fracs = [(u.as_fraction(), c) for _, u, c in units]
    total = sum(f * c for f, c in fracs)
    cap = total if bound is None else min(total, bound.as_fraction())
    den = lcm(*(f.denominator for f, _ in fracs)) if fracs else 1
    limit = int(cap * den)
    if limit > 8 * max_cells:
        return None  # too wide for the bit window; fall back to the generic DP
    window = (1 << (limit + 1)) - 1
    mask = 1
    for f, count in fracs:
        p = int(f * den)
        if p == 0:
            continue
        useful = min(count, limit // p)
        chunk = 1
        while useful > 0:
            take = min(chunk, useful)
            mask = (mask | (mask << (p * take))) & window
            useful -= take
            chunk <<= 1
    values = []
    complete = True
    i = 0
    m = mask
    while m:
        if m & 1:
            values.append(space.field.from_rational(Fraction(i, den)))
            if len(values) > max_cells:
                complete = False
                break
        m >>= 1
        i += 1
    return EnumeratedValues(tuple(values), complete)


def enumerate_clopen_values(mu, budget=None):
    """Exact set of finite measures of all clopen sets up to the budget level."""
    budget = budget or EnumerationBudget()
    space = as_space(mu)
    units, _ = space.level_units(budget.max_level)
    bound = budget.value_bound
    if bound is not None and not hasattr(bound, "field"):
        bound = space.field.from_rational(bound)
    if space.field.is_rational and units:
        fast = _enumerate_rational(space, units, bound, budget.max_cells)
        if fast is not None:
            return fast
    values = {space.field.zero()}
    complete = True
    for _, unit, count in units:
        new = set()
        for base in values:
            acc = base
            for k in range(count + 1):
                if k:
                    acc = acc + unit
                if bound is not None and acc > bound:
                    break
                new.add(acc)
                if len(new) + len(values) > budget.max_cells:
                    complete = False
                    break
            if not complete:
                break
        values = new
        if not complete:
            break
    return EnumeratedValues(_sorted_values(space.field, values), complete)


@dataclass(frozen=True)
class SubsetSearchResult:
    found: object          # ClopenSet or None
    conclusive: bool       # False only when the budget was exhausted

    def __bool__(self):
        return self.found is not None


def subset_search(mu, region, target, budget=None):
    """A clopen subset of `region` with exact measure `target`, if one exists
    at cylinder depth within the budget.

    region is a ClopenSet over the measure's own space diagram.  "Not found"
    with conclusive=True means no union of cylinders up to max_level works;
    it is not a badness proof.
    """
    budget = budget or EnumerationBudget()
    space = as_space(mu)
    if isinstance(target, (int, Fraction)):
        target = space.field.from_rational(target)
    if is_infinite(target):
        raise ValueError("subset search targets must be finite")
    if target.sign() < 0:
        raise ValueError("subset search targets must be non-negative")
    if target.is_zero():
        return SubsetSearchResult(ClopenSet(space.diagram, ()), True)
    node_budget = _NodeBudget(budget.max_cells)
    inconclusive = False
    start = max(region.level, 1)
    for level in range(start, budget.max_level + 1):
        refined = region.refined_to(level)
        groups = {}
        for cyl in refined.cylinders:
            v = space.cylinder_value(cyl)
            if is_infinite(v):
                continue
            groups.setdefault(cyl.terminal_vertex, []).append(cyl)
        units = [
            (space.vertex_value(vertex, level), len(groups[vertex]), vertex)
            for vertex in sorted(groups)
        ]
        units_desc = sorted(
            units, key=cmp_to_key(lambda a, b: (b[0] - a[0]).sign())
        )
        try:
            for ks in bounded_combinations(
                [(u[0], u[1]) for u in units_desc], target, node_budget
            ):
                chosen = []
                for k, (_, _, vertex) in zip(ks, units_desc):
                    chosen.extend(groups[vertex][:k])
                return SubsetSearchResult(
                    ClopenSet(space.diagram, chosen, normalized=True), True
                )
        except _BudgetExhausted:
            inconclusive = True
            break
    return SubsetSearchResult(None, not inconclusive)


@dataclass(frozen=True)
class RefinabilityResult:
    partition: object      # list of ClopenSet or None
    conclusive: bool

    def __bool__(self):
        return self.partition is not None


def refinability_check(mu, region, parts, budget=None):
    """Exact clopen partition of `region` with the prescribed part measures.

    Preconditions (checked): the parts sum to the region's measure and every
    part is a member of the clopen values set.
    """
    budget = budget or EnumerationBudget()
    space = as_space(mu)
    parts = [
        space.field.from_rational(p) if isinstance(p, (int, Fraction)) else p
        for p in parts
    ]
    total = space.clopen_value(region)
    if is_infinite(total):
        raise ValueError("refinability is defined for regions of finite measure")
    acc = space.field.zero()
    for p in parts:
        if p.sign() < 0:
            raise ValueError("parts must be non-negative")
        acc = acc + p
    if not (acc == total):
        raise ValueError("parts must sum exactly to the measure of the region")
    svals = clopen_values(mu) if isinstance(mu, ErgodicMeasure) else mu.svalues
    for p in parts:
        if svals.member(p).status == "no":
            raise ValueError(f"part {p!r} is not a clopen value of the measure")

    order = sorted(
        range(len(parts)), key=cmp_to_key(lambda i, j: (parts[j] - parts[i]).sign())
    )
    node_budget = _NodeBudget(budget.max_cells)
    inconclusive = False
    for level in range(max(region.level, 1), budget.max_level + 1):
        refined = region.refined_to(level)
        groups = {}
        for cyl in refined.cylinders:
            v = space.cylinder_value(cyl)
            if is_infinite(v):
                raise ValueError("refinability is defined for regions of finite measure")
            groups.setdefault(cyl.terminal_vertex, []).append(cyl)
        vertices = sorted(groups)
        units = [(space.vertex_value(v, level), v) for v in vertices]
        units = sorted(units, key=cmp_to_key(lambda a, b: (b[0] - a[0]).sign()))
        avail = {v: len(groups[v]) for v in vertices}
        assignment = [None] * len(parts)

        def solve(pos):
            if pos == len(order) - 1:
                # the last part takes the remainder; sums force exactness
                ks = tuple(avail[v] for _, v in units)
                assignment[order[pos]] = ks
                return True
            idx = order[pos]
            unit_list = [(u, avail[v]) for u, v in units]
            try:
                for ks in bounded_combinations(unit_list, parts[idx], node_budget):
                    for k, (_, v) in zip(ks, units):
                        avail[v] -= k
                    assignment[idx] = ks
                    if solve(pos + 1):
                        return True
                    for k, (_, v) in zip(ks, units):
                        avail[v] += k
                    assignment[idx] = None
            except _BudgetExhausted:
                raise
            return False

        try:
            if solve(0):
                taken = {v: 0 for v in vertices}
                out = []
                for idx in range(len(parts)):
                    ks = assignment[idx]
                    chosen = []
                    for k, (_, v) in zip(ks, units):
                        chosen.extend(groups[v][taken[v] : taken[v] + k])
                        taken[v] += k
                    out.append(ClopenSet(space.diagram, chosen, normalized=True))
                # remainder exactness for the last part
                last = out[order[-1]]
                if not (space.clopen_value(last) == parts[order[-1]]):
                    return RefinabilityResult(None, True)
                return RefinabilityResult(out, True)
        except _BudgetExhausted:
            inconclusive = True
            break
    return RefinabilityResult(None, not inconclusive)


def vershik_successor_digits(digits, bases):
    """Adic successor on digit tuples (little-endian); the maximal tuple
    wraps to the minimal one."""
    out = list(digits)
    for i, b in enumerate(bases):
        if out[i] + 1 < b:
            out[i] += 1
            return tuple(out)
        out[i] = 0
    return tuple(out)


def _odometer_bases(mu, depth):
    if hasattr(mu, "odometer_bases"):
        return mu.odometer_bases(depth)
    if isinstance(mu, ErgodicMeasure) and mu.diagram.vertex_count == 1:
        return [mu.diagram.F[0][0]] * depth
    raise TypeError("no odometer component recognized for invariance checking")


def verify_invariance(mu, successor, depth, value_fn=None):
    """Exact check that the successor map preserves the measure on all
    level-`depth` cylinders of the odometer component (wrap included)."""
    bases = _odometer_bases(mu, depth)
    if value_fn is None:
        if hasattr(mu, "odometer_cylinder_value"):
            def value_fn(digits):
                return mu.odometer_cylinder_value(len(digits))
        else:
            def value_fn(digits):
                return mu.vertex_value(0, len(digits))

    tuples = [()]
    for b in bases:
        tuples = [t + (d,) for t in tuples for d in range(b)]
    image = {}
    for t in tuples:
        s = successor(t)
        if s in image:
            return False  # not a bijection, cannot preserve counting measure
        image[s] = t
    if len(image) != len(tuples):
        return False
    for t in tuples:
        if value_fn(image[t]) != value_fn(t):
            return False
    return True
