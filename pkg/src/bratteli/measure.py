"""Ergodic tail-invariant measures of a stationary diagram, evaluated exactly.

Each vertex class alpha with Perron root lambda > 1 carries one ergodic
measure: the extension of the unique invariant probability measure of the
alpha-subdiagram to the saturation of its path space.  Concretely the
measure of a cylinder ending at vertex v at level N is x_v / lambda^N,
where x solves A_f x = lambda x on the finite subdiagram B_f, is +infinity
on the rest of the support, and 0 off the support (the measure is extended
by zero so that sums of measures on one diagram evaluate uniformly).

B_f is computed by an exact spectral test: an upstream class joins iff its
spectral radius is strictly below lambda and every one-step downstream
support class joined.  A left Perron vector argument shows this is
equivalent to the extension solve having a strictly positive solution, so
the solve (performed for included classes only) is asserted positive and
a failure raises UnsupportedSpectrumError instead of guessing.
"""

from dataclasses import dataclass
from fractions import Fraction

from ._infinity import INF, is_infinite
from .diagram import StationaryDiagram, class_decomposition
from .exact import NumberField, QQ, largest_real_root
from .exact.polys import char_poly


class UnsupportedSpectrumError(Exception):
    """An eigen-solve degenerated where the spectral analysis promised it cannot."""


def _solve_system(field, equations, n):
    """Solve a consistent linear system over the field; unique solution expected.

    equations: list of (coefficient row, rhs).  Raises on inconsistency or
    rank deficiency.
    """
    rows = [list(coeffs) + [rhs] for coeffs, rhs in equations]
    pivots = []
    r = 0
    for col in range(n):
        pivot = None
        for i in range(r, len(rows)):
            if not rows[i][col].is_zero():
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = rows[r][col].inverse()
        rows[r] = [c * inv for c in rows[r]]
        for i in range(len(rows)):
            if i != r and not rows[i][col].is_zero():
                factor = rows[i][col]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    for i in range(r, len(rows)):
        if not rows[i][n].is_zero():
            raise UnsupportedSpectrumError("inconsistent linear system")
    if len(pivots) != n:
        raise UnsupportedSpectrumError("rank-deficient linear system")
    sol = [field.zero()] * n
    for i, col in enumerate(pivots):
        sol[col] = rows[i][n]
    return sol


@dataclass(frozen=True)
class DefectiveProfile:
    """Topological type and mass of the set of points with only infinite
    clopen neighbourhoods."""

    kind: str                 # empty | single_point | finite | cantor | cantor_plus_finite | unknown
    mass_class: str           # zero | finite_positive | infinite
    count: int | None = None  # number of isolated points for the finite kinds
    mass: object | None = None

    EMPTY = "empty"
    SINGLE_POINT = "single_point"
    FINITE = "finite"
    CANTOR = "cantor"
    CANTOR_PLUS_FINITE = "cantor_plus_finite"
    UNKNOWN = "unknown"

    ZERO = "zero"
    FINITE_POSITIVE = "finite_positive"
    INFINITE = "infinite"

    @property
    def definite(self):
        return self.kind != self.UNKNOWN

    def same_kind(self, other):
        if not (self.definite and other.definite):
            return None
        return self.kind == other.kind and self.count == other.count


class ErgodicMeasure:
    """One ergodic invariant measure of a stationary diagram."""

    def __init__(self, diagram, decomposition, alpha, field, lam, lam_algebraic,
                 support, b_f, x, mass, name=None):
        self.diagram = diagram
        self.decomposition = decomposition
        self.alpha = alpha
        self.field = field
        self.lam = lam
        self.lam_algebraic = lam_algebraic
        self.support = tuple(support)
        self.b_f = tuple(b_f)
        self.b_inf = tuple(v for v in support if v not in set(b_f))
        self.x = dict(x)
        self.mass = mass
        self.name = name or f"measure[class {{{','.join(str(v + 1) for v in self.alpha_vertices())}}}]"
        self._support_diagram = None
        self._value_cache = {}

    def alpha_vertices(self):
        return self.decomposition.classes[self.alpha]

    @property
    def finite(self):
        return len(self.b_f) == len(self.support)

    @property
    def full(self):
        return len(self.support) == self.diagram.vertex_count

    def support_diagram(self):
        """The measure's canonical space: the diagram restricted to its support."""
        if self._support_diagram is None:
            self._support_diagram = self.diagram.restrict(self.support)
        return self._support_diagram

    def rescaled(self, c):
        """The measure with all values multiplied by a positive rational c."""
        c = Fraction(c)
        if c <= 0:
            raise ValueError("rescaling factor must be positive")
        return ErgodicMeasure(
            self.diagram, self.decomposition, self.alpha, self.field, self.lam,
            self.lam_algebraic, self.support, self.b_f,
            {v: val * c for v, val in self.x.items()}, self.mass * c,
            name=f"{self.name} * {c}",
        )

    def normalized_value(self, value):
        return value / self.mass

    def vertex_value(self, vertex, level, normalized=False):
        """Measure of any cylinder ending at `vertex` at `level` (0 off support)."""
        key = (vertex, level, normalized)
        cached = self._value_cache.get(key)
        if cached is not None:
            return cached
        if vertex in self.x:
            value = self.x[vertex] / self.lam**level
            if normalized:
                value = self.normalized_value(value)
        elif vertex in set(self.b_inf):
            value = INF
        else:
            value = self.field.zero()
        self._value_cache[key] = value
        return value

    def cylinder_measure(self, cylinder, normalized=False):
        return self.vertex_value(cylinder.terminal_vertex, cylinder.level, normalized)

    def clopen_measure(self, clopen, normalized=False):
        total = self.field.zero()
        for c in clopen.cylinders:
            v = self.cylinder_measure(c, normalized)
            if is_infinite(v):
                return INF
            total = total + v
        return total

    def equivalent_to(self, other):
        """Structural identity: same diagram, class and eigenvector."""
        return (
            isinstance(other, ErgodicMeasure)
            and self.diagram == other.diagram
            and self.alpha == other.alpha
            and self.x == other.x
        )

    def __repr__(self):
        tag = "finite" if self.finite else "infinite"
        return f"<{self.name}: {tag}, lambda={self.lam.exact_str()}>"


class MeasureSum:
    """A positively weighted sum of ergodic measures on one diagram."""

    def __init__(self, terms):
        terms = [(mu, Fraction(w)) for mu, w in terms]
        if not terms:
            raise ValueError("a measure sum needs at least one term")
        if any(w <= 0 for _, w in terms):
            raise ValueError("weights must be positive")
        base = terms[0][0].diagram
        if any(mu.diagram != base for mu, _ in terms):
            raise ValueError("all terms must live on the same diagram")
        self.terms = tuple(terms)
        self.diagram = base

    def cylinder_measure(self, cylinder, normalized=False):
        total = None
        for mu, w in self.terms:
            v = mu.cylinder_measure(cylinder, normalized)
            if is_infinite(v):
                return INF
            contrib = w * v
            total = contrib if total is None else total + contrib
        return total

    def clopen_measure(self, clopen, normalized=False):
        total = None
        for c in clopen.cylinders:
            v = self.cylinder_measure(c, normalized)
            if is_infinite(v):
                return INF
            total = v if total is None else total + v
        if total is None:
            return self.terms[0][0].field.zero()
        return total

    def space_vertices(self):
        out = set()
        for mu, _ in self.terms:
            out.update(mu.support)
        return tuple(sorted(out))

    def infinite_vertices(self):
        out = set()
        for mu, _ in self.terms:
            out.update(mu.b_inf)
        return tuple(sorted(out))

    def __repr__(self):
        return " + ".join(
            (f"{w}*" if w != 1 else "") + mu.name for mu, w in self.terms
        )


def _perron_data(matrix):
    """Perron root of an irreducible non-negative integer block."""
    return largest_real_root(char_poly(matrix))


def _block(a, rows, cols):
    return [[a[v][w] for w in cols] for v in rows]


def ergodic_measures(diagram, decomposition=None):
    """All ergodic invariant measures, one per class with Perron root > 1.

    Classes whose root is <= 1 (loopless classes and bare cycles) carry
    only atomic or empty path spaces and are skipped; see
    degenerate_classes for the list.
    """
    dec = decomposition or class_decomposition(diagram)
    a = diagram.A()
    out = []
    roots = [_perron_data(_block(a, cls, cls)) for cls in dec.classes]
    for alpha, cls in enumerate(dec.classes):
        lam_alg = roots[alpha]
        if not (lam_alg > 1):
            continue
        field = NumberField.get(lam_alg) if not lam_alg.is_rational else QQ
        lam = field.gen() if not lam_alg.is_rational else QQ.from_rational(lam_alg.as_rational())

        support_classes = [b for b in range(len(dec.classes)) if dec.reach[b][alpha]]
        support = sorted(v for b in support_classes for v in dec.classes[b])

        # Perron vector on alpha, anchored at its lowest vertex
        x = {}
        n = len(cls)
        eqs = []
        for i, v in enumerate(cls):
            row = [field.from_rational(a[v][w]) for w in cls]
            row[i] = row[i] - lam
            eqs.append((row, field.zero()))
        anchor = [field.zero()] * n
        anchor[0] = field.one()
        eqs.append((anchor, field.one()))
        sol = _solve_system(field, eqs, n)
        for v, value in zip(cls, sol):
            if not value.sign() > 0:
                raise UnsupportedSpectrumError(
                    f"Perron vector not positive on class {alpha}"
                )
            x[v] = value

        # classes join B_f downward-first: all one-step support successors
        # must be in, and the class spectral radius must be < lambda
        included = {alpha}
        order = _topological_support_order(dec, diagram, support_classes, alpha)
        for beta in order:
            if beta == alpha:
                continue
            succ = [
                g for g in dec.one_step_successors(diagram, beta)
                if g in support_classes
            ]
            if any(g not in included for g in succ):
                continue
            if not (roots[beta] < lam_alg):
                continue
            bverts = dec.classes[beta]
            rhs_vec = []
            for v in bverts:
                acc = field.zero()
                for g in succ:
                    for w in dec.classes[g]:
                        if a[v][w]:
                            acc = acc + a[v][w] * x[w]
                rhs_vec.append(acc)
            m = len(bverts)
            eqs = []
            for i, v in enumerate(bverts):
                row = [field.from_rational(-a[v][w]) for w in bverts]
                row[i] = row[i] + lam
                eqs.append((row, rhs_vec[i]))
            sol = _solve_system(field, eqs, m)
            if any(not value.sign() > 0 for value in sol):
                raise UnsupportedSpectrumError(
                    f"extension solve for class {beta} not positive despite "
                    f"spectral radius below lambda"
                )
            for v, value in zip(bverts, sol):
                x[v] = value
            included.add(beta)

        b_f = sorted(v for b in included for v in dec.classes[b])
        mass = _restricted_mass(diagram, b_f, x, lam, field)
        out.append(
            ErgodicMeasure(diagram, dec, alpha, field, lam, lam_alg, support, b_f, x, mass)
        )
    return out


def degenerate_classes(diagram, decomposition=None):
    """Classes skipped by ergodic_measures (Perron root <= 1), with roots."""
    dec = decomposition or class_decomposition(diagram)
    a = diagram.A()
    out = []
    for i, cls in enumerate(dec.classes):
        root = _perron_data(_block(a, cls, cls))
        if not (root > 1):
            out.append((i, root))
    return out


def _topological_support_order(dec, diagram, support_classes, alpha):
    """Support classes ordered so every class follows its one-step successors."""
    succ = {
        b: [g for g in dec.one_step_successors(diagram, b) if g in support_classes]
        for b in support_classes
    }
    done = []
    pending = set(support_classes)
    while pending:
        progress = [b for b in sorted(pending) if all(g not in pending for g in succ[b])]
        if not progress:
            raise AssertionError("support class graph is not acyclic")
        for b in progress:
            done.append(b)
            pending.discard(b)
    return done


def _restricted_mass(diagram, b_f, x, lam, field):
    """Total mass of the measure on the finite subdiagram, viewed as its own
    space (root edges are the column sums of the restricted matrix)."""
    sub, index = diagram.restrict(b_f)
    total = field.zero()
    for v in b_f:
        total = total + sub.root_edges()[index[v]] * x[v]
    return total / lam


def restricted_mass_at_level(mu, level):
    """Sum of all level-`level` cylinder values inside X_{B_f}; constant in
    the level by the eigenvector identity (exposed for tests)."""
    sub, index = mu.diagram.restrict(mu.b_f)
    h = sub.path_counts(level)
    total = mu.field.zero()
    for v in mu.b_f:
        total = total + h[index[v]] * mu.x[v]
    return total / mu.lam**level


def total_mass(mu):
    """Total mass of mu restricted to its finite subdiagram."""
    return mu.mass


def cylinder_measure(mu, cylinder, normalized=False):
    return mu.cylinder_measure(cylinder, normalized)


def clopen_measure(mu, clopen, normalized=False):
    return mu.clopen_measure(clopen, normalized)


def infinite_cylinder_counts(mu, level):
    """Per-vertex counts of level-`level` cylinders of the support space that
    leave X_{B_f} (pass through an infinite-measure vertex)."""
    if level < 1:
        raise ValueError("level must be >= 1")
    sup, index = mu.support_diagram()
    h = sup.path_counts(level)
    b_f = set(mu.b_f)
    # paths staying inside B_f, counted with the support space's root edges
    q = {v: (sup.root_edges()[index[v]] if v in b_f else 0) for v in mu.support}
    for n in range(1, level):
        m = sup.matrix_at(n)
        q = {
            v: (
                sum(m[index[v]][index[w]] * q[w] for w in mu.b_f)
                if v in b_f
                else 0
            )
            for v in mu.support
        }
    out = {}
    for v in mu.support:
        out[v] = h[index[v]] - q[v]
    return out


def _profile_kind(space_diagram, space_index, u_vertices):
    """Topological type of the set of paths staying inside u_vertices."""
    if not u_vertices:
        return DefectiveProfile.EMPTY, None
    f = space_diagram.F
    # walk digraph adjacency inside U, with multiplicities: A = F^T
    a = [[f[space_index[w]][space_index[v]] for w in u_vertices] for v in u_vertices]
    idx = {v: i for i, v in enumerate(u_vertices)}
    counts = _branch_counts_from_adj(a)
    roots = space_diagram.root_edges()
    if all(is_infinite(c) for c in counts):
        return DefectiveProfile.CANTOR, None
    if all(not is_infinite(c) for c in counts):
        total = sum(roots[space_index[v]] * counts[idx[v]] for v in u_vertices)
        if total == 1:
            return DefectiveProfile.SINGLE_POINT, 1
        return DefectiveProfile.FINITE, total
    # mixed: clean split only when no branching vertex reaches a finite one
    k = len(u_vertices)
    reach = [[bool(a[i][j]) for j in range(k)] for i in range(k)]
    for i in range(k):
        reach[i][i] = True
    for t in range(k):
        for i in range(k):
            if reach[i][t]:
                for j in range(k):
                    if reach[t][j]:
                        reach[i][j] = True
    for i in range(k):
        if is_infinite(counts[i]) and any(
            reach[i][j] and not is_infinite(counts[j]) for j in range(k)
        ):
            return DefectiveProfile.UNKNOWN, None
    total = sum(
        roots[space_index[v]] * counts[idx[v]]
        for v in u_vertices
        if not is_infinite(counts[idx[v]])
    )
    return DefectiveProfile.CANTOR_PLUS_FINITE, total


def _branch_counts_from_adj(a):
    n = len(a)

    class _Tiny:
        def __init__(self, mat):
            self._a = mat

        def A(self):
            return tuple(tuple(row) for row in self._a)

    from .diagram import class_decomposition as _cd

    dec = _cd(_Tiny(a))
    counts = [None] * n
    for comp in dec.classes:
        has_cycle = len(comp) > 1 or a[comp[0]][comp[0]] > 0
        if not has_cycle:
            continue
        branching = any(sum(a[v]) >= 2 for v in comp)
        for v in comp:
            counts[v] = INF if branching else 1
    changed = True
    while changed:
        changed = False
        for v in range(n):
            if counts[v] is not None:
                continue
            if any(a[v][w] and counts[w] is None for w in range(n)):
                continue
            total = 0
            for w in range(n):
                if a[v][w]:
                    if is_infinite(counts[w]):
                        total = INF
                        break
                    total += a[v][w] * counts[w]
            counts[v] = total
            changed = True
    if any(c is None for c in counts):
        raise AssertionError("branch count propagation failed")
    return counts


def _term_defective_mass(mu, weight, u_vertices, space_diagram, space_index):
    """Exact mass the term gives to the set of paths staying in u_vertices."""
    u = set(u_vertices) & set(mu.support)
    if not u:
        return mu.field.zero() * weight
    w_part = sorted(u & set(mu.b_f))
    inf_part = sorted(u & set(mu.b_inf))
    a = mu.diagram.A()
    field = mu.field
    # tau: largest eigen-solution <= x on the B_f part of U.
    # core: rows whose B_f-children all stay inside the part (exact rows)
    core = set(w_part)
    while True:
        drop = set()
        for v in core:
            acc = field.zero()
            for w in core:
                if a[v][w]:
                    acc = acc + a[v][w] * mu.x[w]
            if not (acc == mu.lam * mu.x[v]):
                drop.add(v)
        if not drop:
            break
        core -= drop
    tau = {v: mu.x[v] for v in core}
    rest = [v for v in w_part if v not in core]
    if rest:
        eqs = []
        for i, v in enumerate(rest):
            row = [field.from_rational(-a[v][w]) for w in rest]
            row[i] = row[i] + mu.lam
            rhs = field.zero()
            for w in core:
                if a[v][w]:
                    rhs = rhs + a[v][w] * mu.x[w]
            eqs.append((row, rhs))
        sol = _solve_system(field, eqs, len(rest))
        for v, value in zip(rest, sol):
            tau[v] = value
    positive = {v for v in w_part if tau[v].sign() > 0}
    if inf_part and positive:
        # reachability from infinite vertices to tau-positive ones inside U
        uu = sorted(u)
        idx = {v: i for i, v in enumerate(uu)}
        reach = [[bool(a[v][w]) for w in uu] for v in uu]
        for i in range(len(uu)):
            reach[i][i] = True
        for t in range(len(uu)):
            for i in range(len(uu)):
                if reach[i][t]:
                    for j in range(len(uu)):
                        if reach[t][j]:
                            reach[i][j] = True
        for v in inf_part:
            if any(reach[idx[v]][idx[w]] for w in positive):
                return INF
    total = field.zero()
    roots = space_diagram.root_edges()
    for v in w_part:
        total = total + roots[space_index[v]] * tau[v]
    return (total / mu.lam) * weight


def defective_profile(measure):
    """Kind and mass class of the defective set.

    For a single ergodic measure the mass is zero (the ergodic dichotomy);
    for sums each term's mass on the stayed-in subdiagram is evaluated
    exactly.
    """
    if isinstance(measure, ErgodicMeasure):
        if not measure.b_inf:
            return DefectiveProfile(
                DefectiveProfile.EMPTY, DefectiveProfile.ZERO, count=0, mass=measure.field.zero()
            )
        space, index = measure.support_diagram()
        kind, count = _profile_kind(space, index, measure.b_inf)
        return DefectiveProfile(kind, DefectiveProfile.ZERO, count=count, mass=measure.field.zero())

    if not isinstance(measure, MeasureSum):
        raise TypeError("expected an ErgodicMeasure or MeasureSum")
    space_vertices = measure.space_vertices()
    space, index = measure.diagram.restrict(space_vertices)
    u = measure.infinite_vertices()
    kind, count = _profile_kind(space, index, u)
    if not u:
        return DefectiveProfile(kind, DefectiveProfile.ZERO, count=count)
    total = None
    for mu, w in measure.terms:
        t = _term_defective_mass(mu, w, u, space, index)
        if is_infinite(t):
            return DefectiveProfile(kind, DefectiveProfile.INFINITE, count=count, mass=INF)
        total = t if total is None else total + t
    if total is None or total.is_zero():
        mass_class = DefectiveProfile.ZERO
    else:
        mass_class = DefectiveProfile.FINITE_POSITIVE
    return DefectiveProfile(kind, mass_class, count=count, mass=total)
