"""Finitely generated additive subgroups of a real number field.

A subgroup generated by field elements is a Z-lattice in Q^d (d the field
degree).  We store it as the smallest positive integer denominator D and
the row-style Hermite normal form of D*L, which is canonical: any
generator list spanning the same lattice produces the identical pair.
"""

from fractions import Fraction
from math import gcd, lcm

from .field import QQ, FieldElement


def _xgcd(a, b):
    x, nx = 1, 0
    y, ny = 0, 1
    g, ng = a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    return x, y, g


def hermite_normal_form(rows, width):
    """Canonical row HNF of the lattice spanned by integer rows.

    Pivots are positive, pivot columns strictly increase, and every entry
    above a pivot is reduced into [0, pivot).
    """
    basis = []       # echelon rows, pivot columns increasing
    pivot_cols = []

    def insert(vec):
        vec = list(vec)
        j = 0
        while j < width:
            if vec[j] == 0:
                j += 1
                continue
            if j in pivot_cols:
                p = pivot_cols.index(j)
                row = basis[p]
                a, b = row[j], vec[j]
                if b % a == 0:
                    q = b // a
                    for t in range(j, width):
                        vec[t] -= q * row[t]
                else:
                    x, y, g = _xgcd(a, b)
                    ag, bg = a // g, b // g
                    for t in range(j, width):
                        rt, vt = row[t], vec[t]
                        row[t] = x * rt + y * vt
                        vec[t] = -bg * rt + ag * vt
                continue
            # vec starts a new pivot at column j
            pos = 0
            while pos < len(pivot_cols) and pivot_cols[pos] < j:
                pos += 1
            basis.insert(pos, vec)
            pivot_cols.insert(pos, j)
            return
        # fully reduced to zero

    for r in rows:
        insert(r)

    # positive pivots, then reduce entries above each pivot
    for i, j in enumerate(pivot_cols):
        if basis[i][j] < 0:
            basis[i] = [-c for c in basis[i]]
    for i in range(len(basis) - 1, -1, -1):
        p = basis[i][pivot_cols[i]]
        for k in range(i):
            q = basis[k][pivot_cols[i]] // p
            if q:
                for t in range(width):
                    basis[k][t] -= q * basis[i][t]
    return tuple(tuple(r) for r in basis)


class FinGenSubgroup:
    """Z-module spanned by generators in a field context; membership is exact."""

    __slots__ = ("field", "generators", "denominator", "rows", "_pivots")

    def __init__(self, field, generators):
        self.field = field
        gens = []
        for g in generators:
            if isinstance(g, (int, Fraction)):
                g = field.from_rational(g)
            if not isinstance(g, FieldElement) or g.field is not field:
                if isinstance(g, FieldElement) and g.field is QQ:
                    g = field.from_rational(g.coords[0])
                else:
                    raise ValueError(
                        "generator has wrong coordinate dimension for this field"
                    )
            gens.append(g)
        if not gens:
            raise ValueError("at least one generator required (use 0 for the zero group)")
        self.generators = tuple(gens)
        d = field.dim
        denom = 1
        for g in gens:
            for c in g.coords:
                denom = lcm(denom, c.denominator)
        rows = [[int(c * denom) for c in g.coords] for g in gens]
        hnf = hermite_normal_form(rows, d)
        # shrink to the smallest denominator representing the same lattice
        g_all = 0
        for row in hnf:
            for c in row:
                g_all = gcd(g_all, abs(c))
        if hnf and g_all:
            k = gcd(denom, g_all)
            denom //= k
            hnf = tuple(tuple(c // k for c in row) for row in hnf)
        else:
            denom = 1
            hnf = ()
        self.denominator = denom
        self.rows = hnf
        self._pivots = tuple(next(j for j, c in enumerate(row) if c) for row in hnf)

    @property
    def rank(self):
        return len(self.rows)

    def is_zero(self):
        return not self.rows

    def basis_elements(self):
        d = Fraction(1, self.denominator)
        return tuple(
            self.field.element(tuple(Fraction(c) * d for c in row)) for row in self.rows
        )

    def member(self, x):
        if isinstance(x, (int, Fraction)):
            x = self.field.from_rational(x)
        if x.field is not self.field:
            if x.field is QQ:
                x = self.field.from_rational(x.coords[0])
            else:
                raise ValueError("element has wrong coordinate dimension for this group")
        vec = [c * self.denominator for c in x.coords]
        if any(c.denominator != 1 for c in vec):
            return False
        vec = [int(c) for c in vec]
        for row, j in zip(self.rows, self._pivots):
            if vec[j] == 0:
                continue
            if vec[j] % row[j] != 0:
                return False
            q = vec[j] // row[j]
            for t in range(j, len(vec)):
                vec[t] -= q * row[t]
        return not any(vec)

    def contains_group(self, other):
        return all(self.member(b) for b in other.basis_elements())

    def scaled(self, c):
        """The group c*G for a nonzero scalar (rational or field element)."""
        if isinstance(c, (int, Fraction)):
            c = self.field.from_rational(c)
        if self.is_zero():
            return FinGenSubgroup(self.field, (self.field.zero(),))
        return FinGenSubgroup(self.field, tuple(c * b for b in self.basis_elements()))

    def cyclic_generator(self):
        """For groups of rationals: the g >= 0 with G = g*Z."""
        if self.field is not QQ:
            raise ValueError("cyclic generator is defined for rational groups only")
        if self.is_zero():
            return Fraction(0)
        return Fraction(self.rows[0][0], self.denominator)

    def __eq__(self, other):
        if not isinstance(other, FinGenSubgroup):
            return NotImplemented
        return (
            self.field is other.field
            and self.denominator == other.denominator
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((id(self.field), self.denominator, self.rows))

    def __repr__(self):
        if self.is_zero():
            return "FinGenSubgroup(0)"
        gens = ", ".join(b.exact_str() for b in self.basis_elements())
        return f"FinGenSubgroup<{gens}>"


def group_from_generators(field, gens):
    """The additive group generated by the given field elements."""
    return FinGenSubgroup(field, gens)


def group_member(group, x):
    """Exact membership of x in the Z-span of the group's generators."""
    return group.member(x)
