"""Exact univariate polynomial helpers over Z and Q.

Coefficient vectors are tuples ordered low degree first, so (c0, c1, c2)
stands for c0 + c1*x + c2*x^2.  Integer polynomials feed the algebraic
number layer (characteristic polynomials, minimal polynomials); rational
coefficients appear in Sturm chains and field arithmetic.

Factorization over Z is delegated to sympy; root isolation, Sturm
sequences and interval evaluation are done here with Fractions so that no
floating point enters any decision.
"""

from fractions import Fraction
from math import gcd

import sympy


def trim(coeffs):
    """Drop trailing zero coefficients; the zero polynomial becomes ()."""
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def degree(coeffs):
    return len(coeffs) - 1


def poly_eval(coeffs, x):
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def poly_eval_interval(coeffs, lo, hi):
    """Interval extension of evaluation: returns (min, max) bounds of p on [lo, hi]."""
    acc_lo = acc_hi = Fraction(coeffs[-1]) if coeffs else Fraction(0)
    for c in reversed(coeffs[:-1]):
        candidates = (acc_lo * lo, acc_lo * hi, acc_hi * lo, acc_hi * hi)
        acc_lo, acc_hi = min(candidates) + c, max(candidates) + c
    return acc_lo, acc_hi


def poly_add(a, b):
    n = max(len(a), len(b))
    return trim(tuple((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)))


def poly_neg(a):
    return tuple(-c for c in a)


def poly_mul(a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca == 0:
            continue
        for j, cb in enumerate(b):
            out[i + j] += ca * cb
    return trim(out)


def poly_scale(a, s):
    return trim(tuple(c * s for c in a))


def poly_divmod(num, den):
    """Division with remainder over Q. den must be nonzero."""
    num = [Fraction(c) for c in num]
    den = [Fraction(c) for c in den]
    if not trim(den):
        raise ZeroDivisionError("polynomial division by zero")
    dd = len(trim(den)) - 1
    lead = den[dd]
    quot = [Fraction(0)] * max(len(num) - dd, 0)
    while len(trim(num)) - 1 >= dd and trim(num):
        dn = len(trim(num)) - 1
        q = num[dn] / lead
        quot[dn - dd] = q
        for i in range(dd + 1):
            num[dn - dd + i] -= q * den[i]
    return trim(quot), trim(num)


def poly_derivative(a):
    return trim(tuple(i * a[i] for i in range(1, len(a))))


def poly_gcd(a, b):
    """Monic gcd over Q."""
    a, b = trim(a), trim(b)
    while b:
        _, r = poly_divmod(a, b)
        a, b = b, r
    if not a:
        return ()
    lead = Fraction(a[-1])
    return tuple(Fraction(c) / lead for c in a)


def content(coeffs):
    g = 0
    for c in coeffs:
        g = gcd(g, abs(int(c)))
    return g or 1


def primitive(coeffs):
    """Primitive integer polynomial with positive leading coefficient."""
    coeffs = trim(coeffs)
    if not coeffs:
        return ()
    g = content(coeffs)
    if coeffs[-1] < 0:
        g = -g
    return tuple(int(c) // g for c in coeffs)


def clear_denominators(coeffs):
    """Rational coefficients -> primitive integer polynomial (same roots)."""
    denom = 1
    for c in coeffs:
        denom = denom * Fraction(c).denominator // gcd(denom, Fraction(c).denominator)
    return primitive(tuple(int(Fraction(c) * denom) for c in coeffs))


def squarefree_part(coeffs):
    coeffs = trim(coeffs)
    d = poly_derivative(coeffs)
    if not d:
        return coeffs
    g = poly_gcd(coeffs, d)
    if len(g) == 1:
        return coeffs
    q, r = poly_divmod(coeffs, g)
    assert not r
    return clear_denominators(q)


def sturm_chain(coeffs):
    chain = [tuple(Fraction(c) for c in coeffs)]
    d = poly_derivative(coeffs)
    if d:
        chain.append(tuple(Fraction(c) for c in d))
        while True:
            _, r = poly_divmod(chain[-2], chain[-1])
            r = trim(r)
            if not r:
                break
            chain.append(poly_neg(r))
    return chain


def _sign_changes(chain, x):
    signs = []
    for p in chain:
        v = poly_eval(p, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    changes = 0
    for a, b in zip(signs, signs[1:]):
        if a != b:
            changes += 1
    return changes


def count_roots(chain, lo, hi):
    """Number of distinct real roots in (lo, hi], via the Sturm chain of a squarefree poly."""
    return _sign_changes(chain, lo) - _sign_changes(chain, hi)


def root_bound(coeffs):
    """Cauchy bound: all real roots lie in (-M, M)."""
    coeffs = trim(coeffs)
    lead = abs(coeffs[-1])
    m = max((abs(Fraction(c)) for c in coeffs[:-1]), default=Fraction(0))
    return Fraction(1) + m / lead


def isolate_real_roots(coeffs):
    """Isolating intervals (lo, hi], ascending, for the real roots of a squarefree poly."""
    coeffs = trim(coeffs)
    if len(coeffs) <= 1:
        return []
    chain = sturm_chain(coeffs)
    bound = root_bound(coeffs)
    intervals = []

    def split(lo, hi, n):
        if n == 0:
            return
        if n == 1:
            intervals.append((lo, hi))
            return
        mid = (lo + hi) / 2
        # nudge off a root so interval endpoints stay sign-definite
        while poly_eval(coeffs, mid) == 0:
            mid = (lo + mid) / 2
        split(lo, mid, count_roots(chain, lo, mid))
        split(mid, hi, count_roots(chain, mid, hi))

    total = count_roots(chain, -bound, bound)
    split(-bound, bound, total)
    return intervals


def factor_integer_poly(coeffs):
    """Irreducible integer factors (primitive, positive leading), with multiplicities."""
    x = sympy.Symbol("x")
    expr = sum(int(c) * x**i for i, c in enumerate(coeffs))
    _, factors = sympy.Poly(expr, x).factor_list()
    out = []
    for poly, mult in factors:
        cs = [int(c) for c in poly.all_coeffs()][::-1]
        out.append((primitive(cs), int(mult)))
    return out


def char_poly(matrix):
    """Characteristic polynomial det(xI - A) of a square integer matrix.

    Faddeev-LeVerrier recursion with exact rationals; returns monic integer
    coefficients low degree first.
    """
    n = len(matrix)
    a = [[Fraction(matrix[i][j]) for j in range(n)] for i in range(n)]
    coeffs = [Fraction(1)]  # coefficient of x^n
    m = [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        am = [[sum(a[i][t] * m[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        c = -sum(am[i][i] for i in range(n)) / k
        coeffs.append(c)
        for i in range(n):
            am[i][i] += c
        m = am
    ints = [int(v) for v in reversed(coeffs)]
    assert all(Fraction(i) == v for i, v in zip(ints, reversed(coeffs)))
    return tuple(ints)


def factor_int(n):
    """Prime factorization of a positive integer as {prime: exponent}."""
    if n <= 0:
        raise ValueError("factor_int requires a positive integer")
    return {int(p): int(e) for p, e in sympy.factorint(n).items()}
