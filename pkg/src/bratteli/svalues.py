"""Clopen values sets: symbolic presentations, membership, products, reciprocals.

A set is stored as scale * (U_N lambda^{-N} H) intersected with [0, infinity)
(or with [0, gamma] for finite measures), never enumerated.  The lattice H is
kept with the scale folded in ("effective" lattice), so membership queries
never divide by the scale; the scale itself is retained as metadata for
reports and scale searches.
"""

from dataclasses import dataclass
from fractions import Fraction

from ._infinity import INF, is_infinite
from .exact import (
    QQ,
    ClosureResult,
    FinGenSubgroup,
    NO,
    ScaleSearchResult,
    TensorField,
    UNDETERMINED,
    UnsupportedFieldError,
    YES,
    find_scale,
    group_from_generators,
    lambda_closure_member,
    rational_closure_profile,
)
from .exact.polys import factor_int


class ClopenValuesSet:
    """Symbolic presentation of the finite values of a measure on clopen sets."""

    def __init__(self, field, group, lam=None, scale=None, bound=None):
        self.field = field
        self.group = group            # effective lattice: scale already folded in
        self.lam = lam                # FieldElement with lam * H inside H, or None
        self.scale = scale if scale is not None else field.one()
        self.bound = bound            # gamma for finite measures, else None

    @property
    def is_bounded(self):
        return self.bound is not None

    def coerce(self, value):
        if isinstance(value, (int, Fraction)):
            return self.field.from_rational(value)
        if value.field is self.field:
            return value
        if value.field is QQ:
            return self.field.from_rational(value.coords[0])
        raise ValueError("value lies in a different field than this set")

    def member(self, value, closure_bound=None):
        """yes / no / undetermined membership, exact.

        Zero is always a member (the empty clopen set); negative values and
        values above the bound are definite non-members.
        """
        if is_infinite(value):
            return ClosureResult(NO)
        v = self.coerce(value)
        s = v.sign()
        if s < 0:
            return ClosureResult(NO)
        if s == 0:
            return ClosureResult(YES, 0)
        if self.bound is not None and v > self.bound:
            return ClosureResult(NO)
        if self.lam is None:
            return ClosureResult(YES, 0) if self.group.member(v) else ClosureResult(NO)
        return lambda_closure_member(self.group, self.lam, v, bound=closure_bound)

    def scaled(self, c):
        """The set c * S for a positive rational c."""
        c = Fraction(c)
        if c <= 0:
            raise ValueError("scaling factor must be positive")
        return ClopenValuesSet(
            self.field,
            self.group.scaled(c),
            lam=self.lam,
            scale=self.scale * c,
            bound=None if self.bound is None else self.bound * c,
        )

    def unbounded(self):
        """The group-like set generated by this one, with the bound removed."""
        return ClopenValuesSet(self.field, self.group, lam=self.lam, scale=self.scale)

    def describe(self):
        gens = ", ".join(b.exact_str() for b in self.group.basis_elements())
        lam = self.lam.exact_str() if self.lam is not None else None
        parts = [f"group <{gens or '0'}>"]
        if lam is not None:
            parts.append(f"divided by powers of {lam}")
        if self.bound is not None:
            parts.append(f"within [0, {self.bound.exact_str()}]")
        return ", ".join(parts)

    def __repr__(self):
        return f"ClopenValuesSet({self.describe()})"


def clopen_values(mu, normalized=False):
    """Presentation of S(mu) for an ergodic diagram measure.

    Raw values by default; normalized=True rescales so the finite part is a
    probability measure.  Verdict-level consumers are normalization
    invariant.
    """
    field = mu.field
    scale = field.one() if not normalized else mu.mass.inverse()
    gens = [mu.x[v] * scale for v in mu.b_f]
    group = group_from_generators(field, gens)
    bound = None
    if mu.finite:
        bound = mu.mass * scale
    return ClopenValuesSet(field, group, lam=mu.lam, scale=scale, bound=bound)


def svalues_member(svals, value, closure_bound=None):
    return svals.member(value, closure_bound)


def svalues_equal(s1, s2, closure_bound=None):
    """True / False / None (undetermined) equality of two presentations."""
    if s1.is_bounded != s2.is_bounded:
        return False
    if s1.is_bounded:
        if s1.field is QQ and s2.field is QQ:
            if s1.bound.as_fraction() != s2.bound.as_fraction():
                return False
        elif s1.field is s2.field:
            if not (s1.bound == s2.bound):
                return False
        else:
            return None
        # a bounded group-like set determines and is determined by the
        # group it generates together with its bound
    if s1.field is QQ and s2.field is QQ:
        p1 = rational_closure_profile(s1.group, s1.lam)
        p2 = rational_closure_profile(s2.group, s2.lam)
        return p1 == p2
    if s1.field is not s2.field:
        return None
    lam_pair_ok = (s1.lam is None) == (s2.lam is None) and (
        s1.lam is None or s1.lam == s2.lam
    )
    if not lam_pair_ok:
        return None
    if s1.lam is None:
        return s1.group == s2.group
    from .exact.closure import scaled_group_equal

    return scaled_group_equal(s1.group, s2.group, Fraction(1), s1.lam, closure_bound)


def find_svalues_scale(s1, s2, closure_bound=None):
    """Search for rational c > 0 with c * S1 = S2.

    Complete for rational presentations; restricted to generator ratios over
    number fields (indefinite misses are flagged).
    """
    if s1.is_bounded != s2.is_bounded:
        return ScaleSearchResult(None, True)
    if s1.is_bounded:
        # the bound is the supremum, so any scale is forced
        if not (s1.bound.is_rational and s2.bound.is_rational):
            ratio_ok = None
        else:
            ratio_ok = True
        if ratio_ok is None:
            return ScaleSearchResult(None, False)
        c = s2.bound.as_fraction() / s1.bound.as_fraction()
        verdict = svalues_equal(s1.scaled(c), s2, closure_bound)
        if verdict is True:
            return ScaleSearchResult(c, True)
        if verdict is False:
            return ScaleSearchResult(None, True)
        return ScaleSearchResult(None, False)
    return find_scale(s1.group, s2.group, s1.lam, s2.lam, closure_bound)


@dataclass(frozen=True)
class GroupLikeFinite:
    """A finite truncation of a candidate group-like set."""

    values: tuple
    gamma: Fraction

    def __post_init__(self):
        values = tuple(sorted(Fraction(v) for v in self.values))
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "gamma", Fraction(self.gamma))
        if not values or values[0] != 0:
            raise ValueError("a truncation must contain 0")
        if any(v < 0 or v > self.gamma for v in values):
            raise ValueError("values must lie in [0, gamma]")


@dataclass(frozen=True)
class GroupLikeVerdict:
    ok: bool
    difference_closed: bool        # condition: beta - alpha stays inside
    subgroup_mod_gamma: bool       # condition: truncation + gamma Z closed under subtraction
    failure: tuple | None = None   # witnessing pair


def is_group_like_truncated(trunc):
    """Check the two finite-data group-likeness conditions on a truncation.

    The conditions are equivalent (each is checked independently and the
    suite asserts they always agree): differences of members stay members,
    and the truncation plus gamma Z is subtraction closed.
    """
    values = set(trunc.values)
    if trunc.gamma not in values:
        raise ValueError("gamma itself must belong to the truncation")
    diff_ok, diff_fail = True, None
    for a in trunc.values:
        for b in trunc.values:
            if a <= b and (b - a) not in values:
                diff_ok, diff_fail = False, (a, b)
                break
        if not diff_ok:
            break
    mod_ok, mod_fail = True, None
    for a in trunc.values:
        for b in trunc.values:
            r = (a - b) % trunc.gamma
            if r not in values:
                mod_ok, mod_fail = False, (a, b)
                break
        if not mod_ok:
            break
    return GroupLikeVerdict(
        ok=diff_ok and mod_ok,
        difference_closed=diff_ok,
        subgroup_mod_gamma=mod_ok,
        failure=diff_fail or mod_fail,
    )


@dataclass(frozen=True)
class PrimeMultiset:
    """Primes with multiplicities (possibly infinite) encoding a reciprocal set.

    n is a reciprocal iff every prime power of n is dominated by the
    multiset; divisor- and lcm-closure hold by construction.
    """

    entries: tuple  # sorted tuple of (prime, multiplicity or INF)

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(sorted((int(p), m) for p, m in d.items())))

    def as_dict(self):
        return dict(self.entries)

    @property
    def is_dense(self):
        """Rec(D) is infinite iff some multiplicity is infinite."""
        return any(is_infinite(m) for _, m in self.entries)

    def contains(self, n):
        if n <= 0:
            raise ValueError("reciprocals are positive integers")
        if n == 1:
            return True
        table = self.as_dict()
        for p, e in factor_int(n).items():
            m = table.get(p)
            if m is None:
                return False
            if not is_infinite(m) and e > m:
                return False
        return True

    def __repr__(self):
        inner = ", ".join(f"{p}: {m}" for p, m in self.entries)
        return f"PrimeMultiset({{{inner}}})"


def rec_set(svals):
    """The reciprocal structure {n : 1/n in D} of a rational group-like set."""
    if svals.field is not QQ:
        raise ValueError("reciprocal sets are supported for rational presentations only")
    if svals.member(Fraction(1)).status != YES:
        raise ValueError("the set must contain 1")
    lam_primes, exps = rational_closure_profile(svals.group, svals.lam)
    if exps is None:
        raise ValueError("the zero group has no reciprocals")
    entries = {p: INF for p in lam_primes}
    for p, e in exps.items():
        if e < 0:
            entries[p] = -e
    return PrimeMultiset.from_dict(entries)


def rec_member(svals_or_multiset, n):
    """Whether 1/n belongs to the set (equivalently n is a reciprocal)."""
    pm = svals_or_multiset
    if isinstance(pm, ClopenValuesSet):
        pm = rec_set(pm)
    return pm.contains(n)


def _resolve_product_context(s1, s2):
    """Common context for a product, avoiding the tensor path when possible."""
    f1, f2 = s1.field, s2.field
    if f1 is QQ and f2 is QQ:
        return QQ, (lambda a, b: a * b)
    if f1 is QQ:
        return f2, (lambda a, b: f2.from_rational(a.as_fraction()) * b)
    if f2 is QQ:
        return f1, (lambda a, b: a * f1.from_rational(b.as_fraction()))
    if f1 is f2:
        return f1, (lambda a, b: a * b)
    tensor = TensorField(f1, f2)
    return tensor, tensor.embed


def product_svalues(s1, s2):
    """Presentation of the clopen values set of a product measure.

    The result is generated by pairwise products of generators, carries the
    product of the lambdas, and is bounded by the product of bounds exactly
    when both factors are bounded.
    """
    context, mul = _resolve_product_context(s1, s2)
    one1 = s1.field.one()
    one2 = s2.field.one()
    gens1 = list(s1.group.basis_elements()) or [s1.field.zero()]
    gens2 = list(s2.group.basis_elements()) or [s2.field.zero()]
    gens = [mul(a, b) for a in gens1 for b in gens2]
    group = FinGenSubgroup(context, gens)
    lam = None
    if s1.lam is not None or s2.lam is not None:
        lam = mul(s1.lam if s1.lam is not None else one1,
                  s2.lam if s2.lam is not None else one2)
    bound = None
    if s1.is_bounded and s2.is_bounded:
        bound = mul(s1.bound, s2.bound)
    scale = mul(s1.scale, s2.scale)
    return ClopenValuesSet(context, group, lam=lam, scale=scale, bound=bound)
