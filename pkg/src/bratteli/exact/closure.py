"""Membership in lambda-power closures U_N lambda^{-N} H and scale search.

The rational case (H a group of rationals, lambda a positive integer) is
decided completely by prime valuations.  Over a genuine number field the
search is bounded, with a coset-cycle certificate upgrading exhaustion to
a definite "no" whenever the orbit of lambda^N x modulo H repeats.
"""

import os
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from . import polys
from .field import QQ
from .subgroup import FinGenSubgroup

DEFAULT_CLOSURE_BOUND = int(os.environ.get("BRATTELI_CLOSURE_BOUND", "64"))

YES = "yes"
NO = "no"
UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class ClosureResult:
    status: str           # yes / no / undetermined
    n: int | None = None  # minimal N with lambda^N x in H, when status == yes

    def __bool__(self):
        return self.status == YES


class ClosurePreconditionError(ValueError):
    """lambda H is not contained in H."""


def check_lambda_stable(group, lam):
    for b in group.basis_elements():
        if not group.member(lam * b):
            raise ClosurePreconditionError("lambda * H is not contained in H")


def _as_positive_int(lam):
    if not lam.is_rational:
        return None
    v = lam.as_fraction()
    if v.denominator == 1 and v > 0:
        return int(v)
    return None


def lambda_closure_member(group, lam, x, bound=None, check_stability=True):
    """Decide whether lambda^N x lands in H for some N >= 0.

    Returns yes(minimal N), no, or undetermined (irrational case only,
    once the bound is exhausted without a coset cycle).
    """
    if bound is None:
        bound = DEFAULT_CLOSURE_BOUND
    if isinstance(x, (int, Fraction)):
        x = group.field.from_rational(x)
    if check_stability:
        check_lambda_stable(group, lam)
    if group.member(x):
        return ClosureResult(YES, 0)

    if group.field is QQ:
        lam_int = _as_positive_int(lam)
        if lam_int is None:
            raise ClosurePreconditionError(
                "a rational lambda stabilizing a rational group must be a positive integer"
            )
        g = group.cyclic_generator()
        if g == 0:
            return ClosureResult(NO)  # closure of the zero group is {0}
        y = x.as_fraction() / g
        den = y.denominator
        if den == 1:
            # integer multiple of g not caught above cannot happen
            return ClosureResult(YES, 0)
        if lam_int == 1:
            return ClosureResult(NO)
        lam_factors = polys.factor_int(lam_int)
        n_needed = 0
        for p, e in polys.factor_int(den).items():
            if p not in lam_factors:
                return ClosureResult(NO)
            n_needed = max(n_needed, -(-e // lam_factors[p]))
        return ClosureResult(YES, n_needed)

    # general bounded search with coset-cycle detection
    powers = [x]
    cur = x
    for n in range(1, bound + 1):
        cur = cur * lam
        if group.member(cur):
            return ClosureResult(YES, n)
        powers.append(cur)
    # cycle: lambda^i x == lambda^j x modulo H with i < j proves the orbit
    # is eventually periodic through nonzero cosets, hence never in H
    for j in range(1, len(powers)):
        for i in range(j):
            if group.member(powers[j] - powers[i]):
                return ClosureResult(NO)
    return ClosureResult(UNDETERMINED)


def scaled_group_equal(g1, g2, c, lam=None, bound=None):
    """Whether c*G1 = G2; with lam, the lambda-closures are compared.

    Returns True/False, or None when the irrational bounded search is
    inconclusive.
    """
    if isinstance(c, (int, Fraction)):
        c = g1.field.from_rational(c)
    scaled = g1.scaled(c)
    if lam is None:
        return scaled == g2
    if scaled == g2:
        return True
    saw_undetermined = False
    for b in scaled.basis_elements():
        r = lambda_closure_member(g2, lam, b, bound)
        if r.status == NO:
            return False
        if r.status == UNDETERMINED:
            saw_undetermined = True
    for b in g2.basis_elements():
        r = lambda_closure_member(scaled, lam, b, bound)
        if r.status == NO:
            return False
        if r.status == UNDETERMINED:
            saw_undetermined = True
    return None if saw_undetermined else True


def rational_closure_profile(group, lam):
    """Canonical data of D = U_N lambda^{-N} (g Z) for rational presentations.

    Returns (lam_primes, exponents) where exponents maps primes outside
    lam_primes to the valuation every element of D must dominate.  Two
    presentations describe the same set iff their profiles coincide.
    """
    g = group.cyclic_generator()
    if g == 0:
        return frozenset(), None  # the zero group
    lam_int = 1 if lam is None else _as_positive_int(lam)
    if lam_int is None:
        raise ClosurePreconditionError("rational profile needs an integer lambda")
    lam_primes = frozenset(polys.factor_int(lam_int)) if lam_int > 1 else frozenset()
    exps = {}
    for p, e in polys.factor_int(g.numerator).items():
        if p not in lam_primes:
            exps[p] = e
    for p, e in polys.factor_int(g.denominator).items():
        if p not in lam_primes:
            exps[p] = exps.get(p, 0) - e
    return lam_primes, {p: e for p, e in exps.items() if e}


@dataclass(frozen=True)
class ScaleSearchResult:
    scale: Fraction | None
    definite: bool  # False: the restricted search was inconclusive


def find_scale(g1, g2, lam1=None, lam2=None, bound=None):
    """Search for rational c > 0 with c*G1 = G2 (closures when lambdas given).

    Complete for rational presentations via valuation profiles; for number
    fields only generator-ratio candidates are tried, so a miss is
    reported as indefinite.
    """
    if g1.field is QQ and g2.field is QQ:
        if g1.is_zero() or g2.is_zero():
            if g1.is_zero() and g2.is_zero():
                return ScaleSearchResult(Fraction(1), True)
            return ScaleSearchResult(None, True)
        p1, e1 = rational_closure_profile(g1, lam1)
        p2, e2 = rational_closure_profile(g2, lam2)
        if p1 != p2:
            return ScaleSearchResult(None, True)
        c = Fraction(1)
        for p in set(e1) | set(e2):
            c *= Fraction(p) ** (e2.get(p, 0) - e1.get(p, 0))
        return ScaleSearchResult(c, True)

    if g1.field is not g2.field:
        return ScaleSearchResult(None, False)
    lam = lam1
    if (lam1 is None) != (lam2 is None) or (
        lam1 is not None and not (lam1 == lam2)
    ):
        return ScaleSearchResult(None, False)
    candidates = []
    for b1 in g1.basis_elements():
        for b2 in g2.basis_elements():
            try:
                ratio = b2 / b1
            except ZeroDivisionError:
                continue
            if ratio.is_rational:
                r = ratio.as_fraction()
                if r > 0 and r not in candidates:
                    candidates.append(r)
    for c in sorted(candidates):
        verdict = scaled_group_equal(g1, g2, c, lam, bound)
        if verdict is True:
            return ScaleSearchResult(c, True)
    # candidate ratios are not exhaustive over a number field, so a miss
    # never certifies that no scale exists
    return ScaleSearchResult(None, False)
