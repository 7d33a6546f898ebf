"""Real algebraic numbers as (irreducible minimal polynomial, isolating interval).

Comparisons refine the rational isolating interval and use exact sign
tests only; a number also remembers which real root of its minimal
polynomial it is (root_index, counted left to right), which makes
equality a syntactic check.
"""

from fractions import Fraction

from . import polys


class AlgebraicNumber:
    """A real root of an irreducible primitive integer polynomial.

    For a rational p/q the minimal polynomial is (-p, q) and the interval
    is the point itself.  The isolating interval is refined in place as
    comparisons demand; the represented number never changes.
    """

    __slots__ = ("minpoly", "_lo", "_hi", "root_index", "_sturm")

    def __init__(self, minpoly, lo, hi):
        minpoly = polys.primitive(minpoly)
        if polys.degree(minpoly) < 1:
            raise ValueError("minimal polynomial must be non-constant")
        self.minpoly = minpoly
        lo, hi = Fraction(lo), Fraction(hi)
        if polys.degree(minpoly) == 1:
            q, p = minpoly[1], -minpoly[0]
            val = Fraction(p, q)
            self._lo = self._hi = val
            self.root_index = 0
            self._sturm = None
            return
        if not (lo < hi):
            raise ValueError("isolating interval must have positive width")
        if polys.poly_eval(minpoly, lo) == 0 or polys.poly_eval(minpoly, hi) == 0:
            raise ValueError("interval endpoints must not be roots")
        self._sturm = polys.sturm_chain(minpoly)
        if polys.count_roots(self._sturm, lo, hi) != 1:
            raise ValueError("interval does not isolate exactly one root")
        self._lo, self._hi = lo, hi
        bound = polys.root_bound(minpoly)
        self.root_index = polys.count_roots(self._sturm, -bound, lo)

    @classmethod
    def from_rational(cls, value):
        value = Fraction(value)
        return cls((-value.numerator, value.denominator), value, value)

    @property
    def degree(self):
        return polys.degree(self.minpoly)

    @property
    def is_rational(self):
        return self.degree == 1

    def as_rational(self):
        if not self.is_rational:
            raise ValueError("not a rational number")
        return self._lo

    def interval(self):
        return self._lo, self._hi

    def refine(self):
        """Halve the isolating interval (no-op for rationals)."""
        if self.is_rational:
            return
        mid = (self._lo + self._hi) / 2
        # bisection keeps the endpoint sign change of the (simple) root
        if polys.poly_eval(self.minpoly, self._lo) * polys.poly_eval(self.minpoly, mid) < 0:
            self._hi = mid
        else:
            self._lo = mid

    def refine_below(self, width):
        while self._hi - self._lo > width:
            self.refine()

    def sign_of_poly(self, coeffs):
        """Exact sign of h(alpha) for rational coefficients h, deg h < deg minpoly.

        Such an h is either identically zero or nonzero at alpha (the
        minimal polynomial is irreducible), so interval refinement
        terminates.
        """
        coeffs = polys.trim(coeffs)
        if not coeffs:
            return 0
        if self.is_rational:
            v = polys.poly_eval(coeffs, self._lo)
            return 0 if v == 0 else (1 if v > 0 else -1)
        if polys.degree(coeffs) >= self.degree:
            raise ValueError("expected coordinates reduced mod the minimal polynomial")
        while True:
            lo, hi = polys.poly_eval_interval(coeffs, self._lo, self._hi)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            self.refine()

    def compare(self, other):
        if not isinstance(other, AlgebraicNumber):
            other = AlgebraicNumber.from_rational(other)
        if self.minpoly == other.minpoly:
            if self.root_index == other.root_index:
                return 0
            return -1 if self.root_index < other.root_index else 1
        # distinct irreducible minimal polynomials share no root, so the
        # intervals eventually separate
        while True:
            if self._hi < other._lo:
                return -1
            if other._hi < self._lo:
                return 1
            self.refine()
            other.refine()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational and self._lo == other
        if not isinstance(other, AlgebraicNumber):
            return NotImplemented
        return self.minpoly == other.minpoly and self.root_index == other.root_index

    def __hash__(self):
        return hash((self.minpoly, self.root_index))

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    def __repr__(self):
        if self.is_rational:
            return f"AlgebraicNumber({self._lo})"
        return f"AlgebraicNumber({poly_str(self.minpoly)} in ({self._lo}, {self._hi}])"


def poly_str(coeffs):
    """Human-readable polynomial, e.g. x^2 - x - 1."""
    parts = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if c == 0:
            continue
        term = "x" if i == 1 else (f"x^{i}" if i > 1 else "")
        mag = abs(c)
        coeff = "" if (mag == 1 and i > 0) else str(mag)
        body = coeff + ("*" if coeff and term else "") + term
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    return " ".join(parts) if parts else "0"


def largest_real_root(int_coeffs):
    """Largest real root of an integer polynomial, as an AlgebraicNumber.

    Works factor by factor so the result carries its true minimal
    polynomial.  Raises if the polynomial has no real root.
    """
    best = None
    for factor, _ in polys.factor_integer_poly(int_coeffs):
        if polys.degree(factor) < 1:
            continue
        if polys.degree(factor) == 1:
            cand = AlgebraicNumber.from_rational(Fraction(-factor[0], factor[1]))
        else:
            intervals = polys.isolate_real_roots(factor)
            if not intervals:
                continue
            lo, hi = intervals[-1]
            cand = AlgebraicNumber(factor, lo, hi)
        if best is None or cand > best:
            best = cand
    if best is None:
        raise ValueError("polynomial has no real root")
    return best
