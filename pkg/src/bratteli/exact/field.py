"""Real number fields Q(lam) and their elements in power-basis coordinates.

A FieldElement is a vector of rationals over a field context.  Contexts
are interned, so two measures built over the same eigenvalue share one
field object and their values compare directly.  The degree-1 case is the
plain rational field.

TensorField models Q[x,y]/(f(x), g(y)) for products of clopen values
sets over two genuinely different fields.  It is a ring, not a field
(no division); if the two roots are algebraically dependent a sign query
on a true zero cannot terminate, so refinement is capped and raises
UnsupportedFieldError.
"""

from fractions import Fraction
from math import lcm

from . import polys
from .algebraic import AlgebraicNumber, poly_str


class UnsupportedFieldError(Exception):
    """Field composition exceeds supported degree or cannot be decided."""


class RationalField:
    """The rational field; elements have a single coordinate."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    dim = 1
    degree = 1
    is_rational = True

    def element(self, coords):
        return FieldElement(self, (Fraction(coords[0]),))

    def from_rational(self, value):
        return FieldElement(self, (Fraction(value),))

    def zero(self):
        return self.from_rational(0)

    def one(self):
        return self.from_rational(1)

    def mul(self, a, b):
        return (a[0] * b[0],)

    def inv(self, a):
        if a[0] == 0:
            raise ZeroDivisionError("division by zero")
        return (1 / a[0],)

    def sign(self, coords):
        v = coords[0]
        return 0 if v == 0 else (1 if v > 0 else -1)

    def symbol_note(self):
        return None

    def __repr__(self):
        return "QQ"


QQ = RationalField()


class NumberField:
    """Q(lam) for an irrational real algebraic lam, with interning."""

    _registry = {}

    def __init__(self, root):
        if root.is_rational:
            raise ValueError("use QQ for rational generators")
        self.root = root
        self.minpoly = root.minpoly
        self.dim = self.degree = root.degree
        self.is_rational = False
        # reduction table for x^d .. x^(2d-2) mod minpoly
        d = self.degree
        lead = Fraction(self.minpoly[-1])
        base = tuple(-Fraction(c) / lead for c in self.minpoly[:-1])  # x^d
        table = [base]
        for _ in range(d - 2):
            prev = table[-1]
            shifted = [Fraction(0)] + list(prev[:-1])
            top = prev[-1]
            nxt = tuple(shifted[i] + top * base[i] for i in range(d))
            table.append(nxt)
        self._pow_table = table

    @classmethod
    def get(cls, root):
        if root.is_rational:
            return QQ
        key = (root.minpoly, root.root_index)
        if key not in cls._registry:
            cls._registry[key] = cls(root)
        return cls._registry[key]

    def element(self, coords):
        coords = tuple(Fraction(c) for c in coords)
        if len(coords) != self.dim:
            raise ValueError(f"expected {self.dim} coordinates, got {len(coords)}")
        return FieldElement(self, coords)

    def from_rational(self, value):
        return self.element((Fraction(value),) + (Fraction(0),) * (self.dim - 1))

    def zero(self):
        return self.from_rational(0)

    def one(self):
        return self.from_rational(1)

    def gen(self):
        coords = [Fraction(0)] * self.dim
        coords[1] = Fraction(1)
        return self.element(coords)

    def mul(self, a, b):
        d = self.dim
        conv = [Fraction(0)] * (2 * d - 1)
        for i, ca in enumerate(a):
            if ca == 0:
                continue
            for j, cb in enumerate(b):
                conv[i + j] += ca * cb
        out = conv[:d]
        for k in range(d, 2 * d - 1):
            c = conv[k]
            if c == 0:
                continue
            red = self._pow_table[k - d]
            for i in range(d):
                out[i] += c * red[i]
        return tuple(out)

    def inv(self, a):
        """Inverse modulo the minimal polynomial via the extended Euclid algorithm."""
        if all(c == 0 for c in a):
            raise ZeroDivisionError("division by zero")
        r0 = tuple(Fraction(c) for c in self.minpoly)
        r1 = polys.trim(a)
        s0, s1 = (), (Fraction(1),)
        while polys.degree(r1) > 0:
            q, r = polys.poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, polys.poly_add(s0, polys.poly_neg(polys.poly_mul(q, s1)))
        # r1 is a nonzero constant: minpoly irreducible
        c = r1[0]
        inv = polys.poly_scale(s1, 1 / c)
        out = list(inv) + [Fraction(0)] * (self.dim - len(inv))
        return tuple(out[: self.dim])

    def sign(self, coords):
        return self.root.sign_of_poly(polys.trim(coords))

    def symbol_note(self):
        lo, hi = self.root.interval()
        return f"lam: root of {poly_str(self.minpoly)} in ({lo}, {hi}]"

    def __repr__(self):
        return f"QQ(lam), lam^{self.degree}: {poly_str(self.minpoly)}"


class TensorField:
    """Q[x,y]/(f(x), g(y)) with x, y the two roots; a ring with interval signs."""

    MAX_DIM = 16
    MAX_SIGN_REFINEMENTS = 256

    def __init__(self, left, right):
        if left.is_rational or right.is_rational:
            raise ValueError("tensor context requires two irrational fields")
        self.left = left
        self.right = right
        self.dim = left.dim * right.dim
        self.is_rational = False
        if self.dim > self.MAX_DIM:
            raise UnsupportedFieldError(
                f"composite field degree {self.dim} exceeds supported bound {self.MAX_DIM}"
            )

    def element(self, coords):
        coords = tuple(Fraction(c) for c in coords)
        if len(coords) != self.dim:
            raise ValueError(f"expected {self.dim} coordinates, got {len(coords)}")
        return FieldElement(self, coords)

    def from_rational(self, value):
        coords = [Fraction(0)] * self.dim
        coords[0] = Fraction(value)
        return self.element(coords)

    def zero(self):
        return self.from_rational(0)

    def one(self):
        return self.from_rational(1)

    def embed(self, a, b):
        """Element a (x) b from components in the two factor fields."""
        d2 = self.right.dim
        coords = [Fraction(0)] * self.dim
        for i, ca in enumerate(a.coords):
            for j, cb in enumerate(b.coords):
                coords[i * d2 + j] = ca * cb
        return self.element(coords)

    def _rows(self, coords):
        d2 = self.right.dim
        return [coords[i * d2 : (i + 1) * d2] for i in range(self.left.dim)]

    def mul(self, a, b):
        d1, d2 = self.left.dim, self.right.dim
        ra, rb = self._rows(a), self._rows(b)
        # convolve in x with coefficients multiplied in Q[y]/(g)
        conv = [[Fraction(0)] * d2 for _ in range(2 * d1 - 1)]
        for i, rowa in enumerate(ra):
            if all(c == 0 for c in rowa):
                continue
            for j, rowb in enumerate(rb):
                prod = self.right.mul(rowa, rowb) if not all(c == 0 for c in rowb) else None
                if prod is None:
                    continue
                tgt = conv[i + j]
                for t in range(d2):
                    tgt[t] += prod[t]
        out = conv[:d1]
        table = self.left._pow_table
        for k in range(d1, 2 * d1 - 1):
            row = conv[k]
            if all(c == 0 for c in row):
                continue
            red = table[k - d1]
            for i in range(d1):
                if red[i] == 0:
                    continue
                tgt = out[i]
                for t in range(d2):
                    tgt[t] += red[i] * row[t]
        return tuple(c for row in out for c in row)

    def inv(self, a):
        raise UnsupportedFieldError("no division in a composite tensor context")

    def sign(self, coords):
        if all(c == 0 for c in coords):
            return 0
        rows = self._rows(list(coords))
        xr, yr = self.left.root, self.right.root
        for _ in range(self.MAX_SIGN_REFINEMENTS):
            ylo, yhi = yr.interval()
            ivs = [polys.poly_eval_interval(polys.trim(row) or (Fraction(0),), ylo, yhi) for row in rows]
            xlo, xhi = xr.interval()
            acc_lo, acc_hi = ivs[-1]
            for lo_c, hi_c in reversed(ivs[:-1]):
                cands = (acc_lo * xlo, acc_lo * xhi, acc_hi * xlo, acc_hi * xhi)
                acc_lo, acc_hi = min(cands) + lo_c, max(cands) + hi_c
            if acc_lo > 0:
                return 1
            if acc_hi < 0:
                return -1
            xr.refine()
            yr.refine()
        raise UnsupportedFieldError(
            "sign undecidable: composite roots may be algebraically dependent"
        )

    def symbol_note(self):
        return f"{self.left.symbol_note()}; mu: {self.right.symbol_note()}".replace(
            "mu: lam:", "mu: root of", 1
        )

    def __repr__(self):
        return f"Tensor({self.left!r}, {self.right!r})"


class FieldElement:
    """Immutable element of a field context, in power-basis coordinates."""

    __slots__ = ("field", "coords", "_hash")

    def __init__(self, field, coords):
        self.field = field
        self.coords = coords
        self._hash = None

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field is self.field:
                return other
            if other.field is QQ:
                return self.field.from_rational(other.coords[0])
            if self.field is QQ:
                raise TypeError("cannot coerce a field element into the rationals")
            raise TypeError("elements of different fields")
        if isinstance(other, (int, Fraction)):
            return self.field.from_rational(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return FieldElement(self.field, tuple(a + b for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, tuple(-c for c in self.coords))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return FieldElement(self.field, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return FieldElement(self.field, self.field.mul(self.coords, other.coords))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * FieldElement(self.field, self.field.inv(other.coords))

    def __rtruediv__(self, other):
        inv = FieldElement(self.field, self.field.inv(self.coords))
        return inv * other

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return (self.field.one() / self) ** (-n)
        out = self.field.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inverse(self):
        return FieldElement(self.field, self.field.inv(self.coords))

    def is_zero(self):
        return all(c == 0 for c in self.coords)

    @property
    def is_rational(self):
        return self.field is QQ or all(c == 0 for c in self.coords[1:])

    def as_fraction(self):
        if not self.is_rational:
            raise ValueError("element is not rational")
        return self.coords[0]

    def sign(self):
        return self.field.sign(self.coords)

    def _cmp(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return (self - other).sign()

    def __eq__(self, other):
        if isinstance(other, FieldElement) and other.field is self.field:
            return self.coords == other.coords
        try:
            c = self._cmp(other)
        except TypeError:
            return NotImplemented
        if c is NotImplemented:
            return NotImplemented
        return c == 0

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((id(self.field), self.coords))
        return self._hash

    def exact_str(self):
        """Serialization format: "p/q" for rationals, else "(c0 + c1*lam + ...)/q"."""
        if self.is_rational:
            return str(self.coords[0])
        q = lcm(*(c.denominator for c in self.coords))
        ints = [int(c * q) for c in self.coords]
        parts = []
        for i, c in enumerate(ints):
            if c == 0:
                continue
            sym = "" if i == 0 else ("lam" if i == 1 else f"lam^{i}")
            mag = abs(c)
            coeff = str(mag) if (mag != 1 or i == 0) else ""
            body = coeff + ("*" if coeff and sym else "") + sym
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(("- " if c < 0 else "+ ") + body)
        body = " ".join(parts) if parts else "0"
        if q == 1:
            text = body if len(parts) <= 1 else f"({body})"
        else:
            text = f"({body})/{q}"
        note = self.field.symbol_note()
        return f"{text} where {note}" if note else text

    def __repr__(self):
        return self.exact_str()
