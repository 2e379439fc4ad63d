"""Exact number types: doubled half-integers and signed square roots of rationals.

Angular momenta are carried as ``two_j`` integers throughout the package;
:class:`HalfInt` exists for parsing and display. Coupling coefficients are
:class:`SignedSqrtRational` values, which is exact because squares of
Clebsch-Gordan and 6j coefficients are rational in the Condon-Shortley
convention.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .errors import InputError

__all__ = [
    "HalfInt",
    "SignedSqrtRational",
    "factorial",
    "check_j",
    "check_jm",
    "minus_one_pow",
    "sqrt_sum",
]


@dataclass(frozen=True, order=True)
class HalfInt:
    """A quantum number stored as twice its value."""

    two_j: int

    @classmethod
    def parse(cls, text: str) -> "HalfInt":
        """Parse ``"3/2"``, ``"1"``, ``"-1/2"`` or ``"2.5"``."""
        text = text.strip()
        try:
            if "/" in text:
                num, den = text.split("/")
                if int(den) != 2:
                    raise ValueError
                return cls(int(num))
            value = Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise InputError(f"not a half-integer: {text!r}") from None
        if (2 * value).denominator != 1:
            raise InputError(f"not a half-integer: {text!r}")
        return cls(int(2 * value))

    @property
    def value(self) -> Fraction:
        return Fraction(self.two_j, 2)

    def __float__(self) -> float:
        return self.two_j / 2

    def __str__(self) -> str:
        if self.two_j % 2 == 0:
            return str(self.two_j // 2)
        return f"{self.two_j}/2"


def check_j(two_j: int) -> int:
    if not isinstance(two_j, int) or isinstance(two_j, bool):
        raise InputError(f"two_j must be an int, got {two_j!r}")
    if two_j < 0:
        raise InputError(f"j-type value must be non-negative, got two_j={two_j}")
    return two_j


def check_jm(two_j: int, two_m: int) -> None:
    check_j(two_j)
    if not isinstance(two_m, int):
        raise InputError(f"two_m must be an int, got {two_m!r}")
    if abs(two_m) > two_j or (two_j - two_m) % 2:
        raise InputError(f"invalid (j, m) pair: two_j={two_j}, two_m={two_m}")


def minus_one_pow(k: int) -> int:
    """(-1)**k for an integer exponent."""
    return -1 if k % 2 else 1


class _FactorialTable:
    """Memoized factorials, grown on demand; growth is serialized by a lock."""

    def __init__(self):
        self._values = [1]
        self._lock = threading.Lock()

    def __call__(self, n: int) -> int:
        values = self._values
        if n < len(values):
            return values[n]
        if n < 0:
            raise InputError(f"factorial of negative number {n}")
        with self._lock:
            values = self._values
            if n >= len(values):
                grown = list(values)
                acc = grown[-1]
                for i in range(len(grown), n + 1):
                    acc *= i
                    grown.append(acc)
                # readers see either the old or the new list, never a partial one
                self._values = grown
            return self._values[n]


factorial = _FactorialTable()


@lru_cache(maxsize=65536)
def _squarefree_split(n: int) -> tuple[int, int]:
    """Return (r, s) with n == r*r*s and s square-free (n > 0)."""
    r, s = 1, 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            r *= p ** (e // 2)
            if e % 2:
                s *= p
        p += 1 if p == 2 else 2
    s *= n
    return r, s


@dataclass(frozen=True)
class SignedSqrtRational:
    """The exact value ``sign * sqrt(radicand)``."""

    sign: int
    radicand: Fraction

    def __post_init__(self):
        radicand = Fraction(self.radicand)
        object.__setattr__(self, "radicand", radicand)
        if self.sign not in (-1, 0, 1):
            raise InputError(f"sign must be -1, 0 or 1, got {self.sign}")
        if radicand < 0:
            raise InputError("radicand must be non-negative")
        if (self.sign == 0) != (radicand == 0):
            raise InputError("sign is 0 exactly when the radicand is 0")

    @classmethod
    def zero(cls) -> "SignedSqrtRational":
        return cls(0, Fraction(0))

    @classmethod
    def one(cls) -> "SignedSqrtRational":
        return cls(1, Fraction(1))

    @classmethod
    def from_rational(cls, q) -> "SignedSqrtRational":
        q = Fraction(q)
        if q == 0:
            return cls.zero()
        return cls(1 if q > 0 else -1, q * q)

    def is_zero(self) -> bool:
        return self.sign == 0

    def square(self) -> Fraction:
        return self.radicand if self.sign else Fraction(0)

    def __float__(self) -> float:
        if not self.sign:
            return 0.0
        num, den = self.radicand.numerator, self.radicand.denominator
        try:
            return self.sign * math.sqrt(num / den)
        except OverflowError:
            log = 0.5 * (math.log(num) - math.log(den))
            return self.sign * math.exp(log)

    def to_mpf(self, mp):
        """Value as an mpmath number at the context's working precision."""
        if not self.sign:
            return mp.mpf(0)
        return self.sign * mp.sqrt(mp.mpf(self.radicand.numerator) / self.radicand.denominator)

    def __neg__(self) -> "SignedSqrtRational":
        return SignedSqrtRational(-self.sign, self.radicand)

    def __mul__(self, other):
        if isinstance(other, SignedSqrtRational):
            return SignedSqrtRational(self.sign * other.sign, self.radicand * other.radicand)
        if isinstance(other, (int, Fraction)):
            return self * SignedSqrtRational.from_rational(other)
        return NotImplemented

    __rmul__ = __mul__

    def split(self) -> tuple[Fraction, int]:
        """Return (r, s): the value equals r * sqrt(s) with s a square-free integer."""
        if not self.sign:
            return Fraction(0), 1
        num, den = self.radicand.numerator, self.radicand.denominator
        rn, sn = _squarefree_split(num)
        rd, sd = _squarefree_split(den)
        # sqrt(sn/sd) = sqrt(sn*sd)/sd, and sn, sd are coprime square-free
        return Fraction(self.sign * rn, rd * sd), sn * sd

    def __str__(self) -> str:
        if not self.sign:
            return "0"
        s = "+" if self.sign > 0 else "-"
        return f"{s}sqrt({self.radicand})"


def sqrt_sum(terms: Iterable[tuple[Fraction, int]]) -> SignedSqrtRational:
    """Exactly sum terms ``r * sqrt(s)`` (s square-free) into one signed sqrt-rational.

    Raises ArithmeticError when the sum is not of the form sign*sqrt(rational),
    which never happens for a true coupling coefficient.
    """
    groups: dict[int, Fraction] = {}
    for r, s in terms:
        if r:
            groups[s] = groups.get(s, Fraction(0)) + r
    nonzero = [(s, r) for s, r in groups.items() if r]
    if not nonzero:
        return SignedSqrtRational.zero()
    if len(nonzero) > 1:
        raise ArithmeticError(f"sum is not a single square root: {nonzero}")
    s, r = nonzero[0]
    return SignedSqrtRational(1 if r > 0 else -1, r * r * s)


def split_product(a: tuple[Fraction, int], b: tuple[Fraction, int]) -> tuple[Fraction, int]:
    """Multiply r1*sqrt(s1) by r2*sqrt(s2) keeping the square-free form."""
    (r1, s1), (r2, s2) = a, b
    g = math.gcd(s1, s2)
    return r1 * r2 * g, (s1 // g) * (s2 // g)
