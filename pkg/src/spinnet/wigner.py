"""Exact Clebsch-Gordan, 6j and 9j coefficients and the defining 6j identities.

Every spin argument is an integer ``two_j`` (twice the quantum number).
The 6j symbol ``{j1 j2 j3; j4 j5 j6}`` has triads (1,2,3), (1,5,6), (4,2,6)
and (4,5,3); columns (1,4), (2,5), (3,6) hold opposite edges of the
associated tetrahedron.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache

from .exact import (
    SignedSqrtRational,
    check_j,
    check_jm,
    factorial,
    minus_one_pow,
    split_product,
    sqrt_sum,
)

__all__ = [
    "triangle_ok",
    "clebsch_gordan",
    "wigner_6j",
    "wigner_6j_oracle",
    "wigner_9j",
    "sixj_symmetries",
    "residual_biedenharn_elliott",
    "residual_racah",
    "residual_orthogonality",
]


def triangle_ok(a: int, b: int, c: int) -> bool:
    """True when (a, b, c), given as two_j, form an admissible triad."""
    return (a + b + c) % 2 == 0 and abs(a - b) <= c <= a + b


def _delta_sq(a: int, b: int, c: int) -> Fraction:
    # triangle coefficient squared, arguments doubled
    return Fraction(
        factorial((a + b - c) // 2) * factorial((a - b + c) // 2) * factorial((-a + b + c) // 2),
        factorial((a + b + c) // 2 + 1),
    )


def _from_sum(total: int, radicand: Fraction) -> SignedSqrtRational:
    if total == 0:
        return SignedSqrtRational.zero()
    return SignedSqrtRational(1 if total > 0 else -1, radicand * total * total)


@lru_cache(maxsize=1 << 16)
def clebsch_gordan(j1: int, m1: int, j2: int, m2: int, J: int, M: int) -> SignedSqrtRational:
    """Clebsch-Gordan coefficient <j1 m1 j2 m2 | J M> (Condon-Shortley)."""
    check_jm(j1, m1)
    check_jm(j2, m2)
    check_jm(J, M)
    if m1 + m2 != M or not triangle_ok(j1, j2, J):
        return SignedSqrtRational.zero()
    # work with integer halves
    a, b, c = (j1 + j2 - J) // 2, (j1 - m1) // 2, (j2 + m2) // 2
    d, e = (J - j2 + m1) // 2, (J - j1 - m2) // 2
    kmin = max(0, -d, -e)
    kmax = min(a, b, c)
    total = 0
    common = 1
    # bring all terms to a common denominator so the sum stays integral
    for k in range(kmin, kmax + 1):
        common = math.lcm(common, factorial(k) * factorial(a - k) * factorial(b - k)
                          * factorial(c - k) * factorial(d + k) * factorial(e + k))
    for k in range(kmin, kmax + 1):
        den = (factorial(k) * factorial(a - k) * factorial(b - k)
               * factorial(c - k) * factorial(d + k) * factorial(e + k))
        total += minus_one_pow(k) * (common // den)
    radicand = (
        (J + 1)
        * _delta_sq(j1, j2, J)
        * factorial((j1 + m1) // 2) * factorial((j1 - m1) // 2)
        * factorial((j2 + m2) // 2) * factorial((j2 - m2) // 2)
        * factorial((J + M) // 2) * factorial((J - M) // 2)
    ) / (common * common)
    return _from_sum(total, radicand)


@lru_cache(maxsize=1 << 18)
def _sixj(j1, j2, j3, j4, j5, j6) -> SignedSqrtRational:
    triads = ((j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3))
    if not all(triangle_ok(*t) for t in triads):
        return SignedSqrtRational.zero()
    alphas = [sum(t) // 2 for t in triads]
    betas = [(j1 + j2 + j4 + j5) // 2, (j2 + j3 + j5 + j6) // 2, (j3 + j1 + j6 + j4) // 2]
    zmin, zmax = max(alphas), min(betas)
    terms = []
    for z in range(zmin, zmax + 1):
        den = 1
        for al in alphas:
            den *= factorial(z - al)
        for be in betas:
            den *= factorial(be - z)
        terms.append((minus_one_pow(z) * factorial(z + 1), den))
    common = 1
    for _, den in terms:
        common = math.lcm(common, den)
    total = sum(num * (common // den) for num, den in terms)
    radicand = Fraction(1, common * common)
    for t in triads:
        radicand *= _delta_sq(*t)
    return _from_sum(total, radicand)


def wigner_6j(j1: int, j2: int, j3: int, j4: int, j5: int, j6: int) -> SignedSqrtRational:
    """Exact 6j symbol {j1 j2 j3; j4 j5 j6} by the Racah single sum.

    Returns exact zero when any triad is inadmissible.

    Examples
    --------
    >>> float(wigner_6j(1, 1, 2, 1, 1, 2))
    0.16666666666666666
    """
    for j in (j1, j2, j3, j4, j5, j6):
        check_j(j)
    return _sixj(j1, j2, j3, j4, j5, j6)


def sixj_symmetries(j1, j2, j3, j4, j5, j6):
    """The 24 argument tuples related to {j1 j2 j3; j4 j5 j6} by the classical symmetries."""
    cols = [(j1, j4), (j2, j5), (j3, j6)]
    out = []
    for perm in itertools.permutations(range(3)):
        c = [cols[p] for p in perm]
        # swapping upper and lower entries in two of the three columns
        for flips in ((0, 0, 0), (1, 1, 0), (1, 0, 1), (0, 1, 1)):
            cc = [(lo, up) if f else (up, lo) for (up, lo), f in zip(c, flips)]
            out.append((cc[0][0], cc[1][0], cc[2][0], cc[0][1], cc[1][1], cc[2][1]))
    return out


@lru_cache(maxsize=1 << 16)
def _cg_split(j1, m1, j2, m2, J, M):
    return clebsch_gordan(j1, m1, j2, m2, J, M).split()


def wigner_6j_oracle(a: int, b: int, d: int, c: int, f: int, e: int) -> SignedSqrtRational:
    """The 6j symbol {a b d; c f e} from an exact magnetic sum of four CG coefficients.

    Uses the overlap of the coupled states ((a b)d c)f and (a (b c)e)f at
    projection M = f, which equals (-1)^(a+b+c+f) sqrt((2d+1)(2e+1)) {a b d; c f e}.
    The sum is carried out exactly by grouping terms r*sqrt(s) by their
    square-free part s. This is slow and meant for cross-validation only.
    """
    for j in (a, b, d, c, f, e):
        check_j(j)
    triads = ((a, b, d), (d, c, f), (b, c, e), (a, e, f))
    if not all(triangle_ok(*t) for t in triads):
        return SignedSqrtRational.zero()
    M = f
    terms = []
    for m1 in range(-a, a + 1, 2):
        for m2 in range(-b, b + 1, 2):
            m3 = M - m1 - m2
            if abs(m3) > c:
                continue
            m12, m23 = m1 + m2, m2 + m3
            if abs(m12) > d or abs(m23) > e:
                continue
            t = _cg_split(a, m1, b, m2, d, m12)
            if not t[0]:
                continue
            for factor in (
                _cg_split(d, m12, c, m3, f, M),
                _cg_split(b, m2, c, m3, e, m23),
                _cg_split(a, m1, e, m23, f, M),
            ):
                t = split_product(t, factor)
                if not t[0]:
                    break
            else:
                terms.append(t)
    overlap = sqrt_sum(terms)
    if overlap.is_zero():
        return overlap
    phase = minus_one_pow((a + b + c + f) // 2)
    return SignedSqrtRational(phase * overlap.sign, overlap.radicand / ((d + 1) * (e + 1)))


def _x_range(*pairs):
    """two_x values admissible with every (p, q) pair, i.e. |p-q| <= x <= p+q and parity."""
    lo = max(abs(p - q) for p, q in pairs)
    hi = min(p + q for p, q in pairs)
    parity = (pairs[0][0] + pairs[0][1]) % 2
    if any((p + q) % 2 != parity for p, q in pairs):
        return range(0)
    if lo % 2 != parity:
        lo += 1
    return range(lo, hi + 1, 2)


def wigner_9j(j1, j2, j3, j4, j5, j6, j7, j8, j9) -> SignedSqrtRational:
    """Exact 9j symbol with rows (j1 j2 j3), (j4 j5 j6), (j7 j8 j9).

    Single sum over x of (-1)^(2x) (2x+1) times three 6j symbols, accumulated
    exactly in square-free form.
    """
    js = (j1, j2, j3, j4, j5, j6, j7, j8, j9)
    for j in js:
        check_j(j)
    rows = ((j1, j2, j3), (j4, j5, j6), (j7, j8, j9))
    cols = ((j1, j4, j7), (j2, j5, j8), (j3, j6, j9))
    if not all(triangle_ok(*t) for t in rows + cols):
        return SignedSqrtRational.zero()
    terms = []
    for x in _x_range((j1, j9), (j8, j4), (j2, j6)):
        t = (Fraction(minus_one_pow(x) * (x + 1)), 1)
        for s in (
            _sixj(j1, j4, j7, j8, j9, x),
            _sixj(j2, j5, j8, j4, x, j6),
            _sixj(j3, j6, j9, x, j1, j2),
        ):
            t = split_product(t, s.split())
            if not t[0]:
                break
        else:
            terms.append(t)
    return sqrt_sum(terms)


def _to_float_fn(precision):
    """Converter from SignedSqrtRational to a real number at the requested precision.

    ``precision=None`` uses binary64; an integer selects that many decimal
    digits through mpmath.
    """
    if precision is None:
        return float, math.fsum, 1.0
    import mpmath

    ctx = mpmath.mp.clone()
    ctx.dps = int(precision)
    return (lambda v: v.to_mpf(ctx)), ctx.fsum, ctx.mpf(1)


def _residual(lhs_terms, rhs, precision):
    conv, fsum, one = _to_float_fn(precision)
    lhs = fsum([w * conv(u) * conv(v) * (conv(z) if z is not None else one) for w, u, v, z in lhs_terms])
    return float(abs(lhs - rhs(conv)))


def residual_biedenharn_elliott(a, b, c, d, e, f, p, q, r, precision=None) -> float:
    """|LHS - RHS| of the Biedenharn-Elliott identity.

    sum_x (-1)^(R+x) (2x+1) {a b x; c d p}{c d x; e f q}{e f x; b a r}
        = {p q r; e a d}{p q r; f b c},  R = a+b+c+d+e+f+p+q+r.
    """
    spins = (a, b, c, d, e, f, p, q, r)
    for j in spins:
        check_j(j)
    R2 = sum(spins)
    terms = []
    for x in _x_range((a, b), (c, d), (e, f)):
        s1 = _sixj(a, b, x, c, d, p)
        s2 = _sixj(c, d, x, e, f, q)
        s3 = _sixj(e, f, x, b, a, r)
        # nonzero terms force R + x to be an integer
        if s1.sign and s2.sign and s3.sign:
            terms.append((minus_one_pow((R2 + x) // 2) * (x + 1), s1, s2, s3))
    rhs1, rhs2 = _sixj(p, q, r, e, a, d), _sixj(p, q, r, f, b, c)
    return _residual(terms, lambda conv: conv(rhs1) * conv(rhs2), precision)


def residual_racah(a, b, c, d, p, q, precision=None) -> float:
    """|LHS - RHS| of the Racah identity.

    sum_x (-1)^(p+q+x) (2x+1) {a b x; c d p}{a b x; d c q} = {a c q; b d p}.
    """
    for j in (a, b, c, d, p, q):
        check_j(j)
    terms = []
    for x in _x_range((a, b), (c, d)):
        s1, s2 = _sixj(a, b, x, c, d, p), _sixj(a, b, x, d, c, q)
        if s1.sign and s2.sign:
            terms.append((minus_one_pow((p + q + x) // 2) * (x + 1), s1, s2, None))
    rhs = _sixj(a, c, q, b, d, p)
    return _residual(terms, lambda conv: conv(rhs), precision)


def residual_orthogonality(a, b, c, d, p, q, precision=None) -> float:
    """|LHS - RHS| of the 6j orthogonality relation.

    sum_x (2x+1) {a b x; c d p}{c d x; a b q} = delta_pq / (2p+1) whenever
    p closes the triads (a, d, p), (c, b, p) and some x is admissible;
    the right side is 0 otherwise.
    """
    for j in (a, b, c, d, p, q):
        check_j(j)
    xs = _x_range((a, b), (c, d))
    terms = []
    for x in xs:
        s1, s2 = _sixj(a, b, x, c, d, p), _sixj(c, d, x, a, b, q)
        if s1.sign and s2.sign:
            terms.append((x + 1, s1, s2, None))
    nonempty = len(xs) > 0 and triangle_ok(a, d, p) and triangle_ok(c, b, p)
    delta = Fraction(1, p + 1) if p == q and nonempty else Fraction(0)
    return _residual(terms, lambda conv: conv(SignedSqrtRational.from_rational(delta)), precision)
