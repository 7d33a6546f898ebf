"""Constructions: odometers realizing prescribed group-like sets, infinite
extensions, added minimal components, and compactified product objects.

The odometer realization takes a rational group-like presentation, reads
off its reciprocal prime structure, lays the primes out round-robin (the
set realized is independent of the order), and extends the odometer by a
second component whose per-level edge ratio terms are identically one, so
the extension carries the full infinite measure.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import prod

from ._infinity import INF, is_infinite
from .classify import GOOD, is_good
from .diagram import ClopenSet, CylinderSet, FiniteRankDiagram, cylinders_at_level
from .exact import QQ, group_from_generators
from .measure import DefectiveProfile, ErgodicMeasure
from .oracle import vershik_successor_digits
from .svalues import ClopenValuesSet, PrimeMultiset, clopen_values, rec_set


class DensityError(ValueError):
    """The reciprocal set is finite, so no dense rational realization exists."""


@dataclass(frozen=True)
class OdometerOrder:
    """Edge order on a single-vertex-per-level component; only the
    lexicographic order is provided.  The maximal path wraps to the minimal
    one so the successor is total at every finite depth."""

    kind: str = "lexicographic"


@dataclass(frozen=True)
class AbstractGoodMeasure:
    """A good non-defective measure known only through its invariants.

    Stands in for measures on compactified product spaces, which have no
    diagram presentation; it exists to exercise the classification
    criteria.
    """

    svalues: ClopenValuesSet
    profile: DefectiveProfile
    provenance: str
    name: str = ""

    good_by_construction = True

    def __repr__(self):
        return f"<AbstractGoodMeasure {self.provenance}: {self.svalues.describe()}>"


def _prime_layout(multiset):
    """Round-robin prime sequence: prefix consuming finite multiplicities,
    then the infinite primes as the repeating cycle."""
    finite = {p: m for p, m in multiset.entries if not is_infinite(m)}
    infinite = sorted(p for p, m in multiset.entries if is_infinite(m))
    prefix = []
    while any(m > 0 for m in finite.values()):
        for p, m in sorted(multiset.entries):
            if is_infinite(m):
                prefix.append(p)
            elif finite[p] > 0:
                prefix.append(p)
                finite[p] -= 1
    return prefix, infinite


def _extension_matrix(p):
    # vertex 0: the infinite component; vertex 1: the odometer
    return ((p, 0), (p, p))


class OdometerExtensionMeasure:
    """The infinite ergodic measure of a constructed odometer extension.

    Cylinders ending at the odometer vertex at level N have measure
    1/(p_1 ... p_N); cylinders ending at the extension vertex are infinite.
    """

    INFINITE_VERTEX = 0
    ODOMETER_VERTEX = 1

    def __init__(self, diagram, prefix_primes, cycle_primes, svalues, name=None):
        self.diagram = diagram
        self.prefix_primes = tuple(prefix_primes)
        self.cycle_primes = tuple(cycle_primes)
        self.svalues = svalues
        self.field = QQ
        self.finite = False
        self.mass = INF
        self.name = name or "odometer extension"
        self.profile = DefectiveProfile(
            DefectiveProfile.CANTOR, DefectiveProfile.ZERO, mass=QQ.zero()
        )

    good_by_construction = True

    def prime_at(self, n):
        """The prime used for the level-n incidence matrix."""
        if n <= len(self.prefix_primes):
            return self.prefix_primes[n - 1]
        return self.cycle_primes[(n - 1 - len(self.prefix_primes)) % len(self.cycle_primes)]

    def odometer_bases(self, depth):
        """Edge counts per cylinder level of the odometer component.

        The root convention (root edges = column sums of the first matrix)
        duplicates the first prime, so level k >= 2 of a cylinder is governed
        by the level-(k-1) matrix.  The realized values set is unaffected.
        """
        return [self.prime_at(1)] + [self.prime_at(n) for n in range(1, depth)]

    def odometer_cylinder_value(self, level):
        return Fraction(1, prod(self.odometer_bases(level)))

    def extension_ratio_terms(self, count):
        """The per-level ratio a_n / p_n; identically 1 by the choice a_n = p_n,
        so the divergence condition holds term by term."""
        bases = self.odometer_bases(count)
        return [Fraction(p, p) for p in bases]

    def vertex_value(self, vertex, level):
        if vertex == self.ODOMETER_VERTEX:
            return QQ.from_rational(self.odometer_cylinder_value(level))
        return INF

    def cylinder_value(self, cyl):
        return self.vertex_value(cyl.terminal_vertex, cyl.level)

    def cylinder_measure(self, cyl, normalized=False):
        return self.cylinder_value(cyl)

    def clopen_value(self, clopen):
        total = QQ.zero()
        for c in clopen.cylinders:
            v = self.cylinder_value(c)
            if is_infinite(v):
                return INF
            total = total + v
        return total

    clopen_measure = clopen_value

    def level_units(self, level):
        h = self.diagram.path_counts(level)
        finite = [
            (self.ODOMETER_VERTEX,
             QQ.from_rational(self.odometer_cylinder_value(level)),
             h[self.ODOMETER_VERTEX])
        ]
        return finite, h[self.INFINITE_VERTEX]

    def whole(self, level=1):
        return ClopenSet(self.diagram, cylinders_at_level(self.diagram, level), normalized=True)

    def __repr__(self):
        return f"<{self.name}: infinite, S = {self.svalues.describe()}>"


def multiset_svalues(multiset):
    """Canonical presentation of the group-like set with the given reciprocal
    structure: H = (1/prod p^m) Z divided by powers of the infinite primes."""
    denom = 1
    lam = 1
    for p, m in multiset.entries:
        if is_infinite(m):
            lam *= p
        else:
            denom *= p**m
    group = group_from_generators(QQ, [Fraction(1, denom)])
    lam_el = QQ.from_rational(lam) if lam > 1 else None
    return ClopenValuesSet(QQ, group, lam=lam_el)


def odometer_from_grouplike(svals_or_multiset, name=None):
    """Finite-rank diagram carrying a good infinite measure whose clopen
    values set is the prescribed dense rational group-like set.

    Raises DensityError when the reciprocal set is finite, ValueError for
    non-rational presentations or sets without 1.
    """
    if isinstance(svals_or_multiset, PrimeMultiset):
        multiset = svals_or_multiset
    else:
        multiset = rec_set(svals_or_multiset)
    if not multiset.is_dense:
        raise DensityError(
            f"reciprocal structure {multiset!r} is finite; the rational part "
            "cannot be dense"
        )
    prefix, cycle = _prime_layout(multiset)
    diagram = FiniteRankDiagram(
        [_extension_matrix(p) for p in prefix],
        [_extension_matrix(p) for p in cycle],
        name=name or "odometer extension",
    )
    measure = OdometerExtensionMeasure(
        diagram, prefix, cycle, multiset_svalues(multiset), name=name
    )
    return diagram, measure


def add_infinite_components(diagram, alpha, count, roots=None):
    """Append `count` fresh minimal components, each a single vertex with a
    self-loop heavier than the measure's eigenvalue and one edge into the
    measure class.  Preserves the clopen values set and the goodness verdict
    of the class-alpha measure.

    When the measure class was not itself minimal the minimal-component
    count grows by `count`; feeding a simple base un-sources its only class,
    leaving exactly `count` minimal components.
    """
    if count < 0:
        raise ValueError("component count must be non-negative")
    if count == 0:
        return diagram
    if isinstance(alpha, ErgodicMeasure):
        lam_alg = alpha.lam_algebraic
        target = alpha.alpha_vertices()[0]
    else:
        from .measure import ergodic_measures

        measures = [m for m in ergodic_measures(diagram) if m.alpha == alpha]
        if not measures:
            raise ValueError(f"class {alpha} carries no ergodic measure")
        lam_alg = measures[0].lam_algebraic
        target = measures[0].alpha_vertices()[0]
    if roots is None:
        lam_alg.refine_below(Fraction(1, 2))
        base = int(lam_alg.interval()[1]) + 1
        while not (base > lam_alg):
            base += 1
        roots = [base] * count
    if len(roots) != count or any(not (r > lam_alg) for r in roots):
        raise ValueError("each new component root must strictly exceed lambda")
    n = diagram.vertex_count
    size = n + count
    f = [[0] * size for _ in range(size)]
    for i in range(n):
        for j in range(n):
            f[i][j] = diagram.F[i][j]
    for k, root in enumerate(roots):
        u = n + k
        f[u][u] = int(root)
        f[target][u] = 1  # the new component feeds the measure class
    from .diagram import StationaryDiagram

    return StationaryDiagram(f, name=f"{diagram.name or 'diagram'}+{count}inf")


def _good_bounded_svalues(mu, closure_bound=None):
    if isinstance(mu, ErgodicMeasure):
        if not mu.finite:
            raise ValueError("the construction extends a finite measure")
        verdict = is_good(mu, closure_bound)
        if verdict.status != GOOD:
            raise ValueError("the construction needs a certified good measure")
        return clopen_values(mu)
    svals = getattr(mu, "svalues", None)
    if svals is None or not getattr(mu, "good_by_construction", False):
        raise ValueError("expected a good finite measure or presentation")
    return svals


def counting_product(mu, closure_bound=None, name=None):
    """Product with the counting measure on the two-sided integer grid,
    compactified pointwise: the defective set is a full Cantor copy of the
    base space and the values set loses its bound."""
    svals = _good_bounded_svalues(mu, closure_bound)
    return AbstractGoodMeasure(
        svalues=svals.unbounded(),
        profile=DefectiveProfile(DefectiveProfile.CANTOR, DefectiveProfile.ZERO),
        provenance="counting_product",
        name=name or "counting product",
    )


def one_point_compactification(mu, closure_bound=None, name=None):
    """Same values set as the counting product, but the whole product space
    is compactified by a single point, which is then the defective set."""
    svals = _good_bounded_svalues(mu, closure_bound)
    return AbstractGoodMeasure(
        svalues=svals.unbounded(),
        profile=DefectiveProfile(
            DefectiveProfile.SINGLE_POINT, DefectiveProfile.ZERO, count=1
        ),
        provenance="one_point_compactification",
        name=name or "one point compactification",
    )


def vershik_successor(mu, digits, order=OdometerOrder()):
    """Adic successor of a finite odometer path given as little-endian digits."""
    if order.kind != "lexicographic":
        raise ValueError("only the lexicographic order is implemented")
    bases = odometer_bases_of(mu, len(digits))
    for d, b in zip(digits, bases):
        if not (0 <= d < b):
            raise ValueError("digit out of range for the odometer")
    return vershik_successor_digits(tuple(digits), bases)


def odometer_bases_of(mu, depth):
    """Edge counts per level of an odometer component."""
    if hasattr(mu, "odometer_bases"):
        return mu.odometer_bases(depth)
    if isinstance(mu, ErgodicMeasure) and mu.diagram.vertex_count == 1:
        return [mu.diagram.F[0][0]] * depth
    diagram = mu if not isinstance(mu, ErgodicMeasure) else mu.diagram
    if hasattr(diagram, "vertex_count") and diagram.vertex_count == 1:
        return [diagram.F[0][0]] * depth
    raise TypeError("no odometer component recognized")
