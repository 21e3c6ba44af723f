"""Exact arithmetic helpers: integer roots, rational enclosures, root comparisons.

Everything downstream stores square (or fourth-power) quantities and compares
them through integer power tests, so the primitives here never round.  When a
true enclosure of an irrational value is unavoidable (k-th roots, rational
powers) it is returned as a closed rational ``Interval`` whose width the
caller controls through a precision parameter.

Conventions:

* ``iroot(n, k)`` is floor(n**(1/k)) for integers n >= 0, k >= 1.
* ``floor(x ** (1/k)) == iroot(floor(x), k)`` for rational x >= 0 because the
  k-th powers of integers are integers; ``rational_floor_root`` relies on it.
* ``Interval`` endpoints are Fractions with lo <= hi; arithmetic is the usual
  outward-directed interval arithmetic (no rounding happens, so "outward" is
  exact here).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Rational = Union[int, Fraction]


def iroot(n: int, k: int) -> int:
    """Integer k-th root: the largest r >= 0 with r**k <= n.

    Newton iteration from above; converges monotonically once past the
    root, so the loop terminates when the iterate stops decreasing.
    """
    if n < 0:
        raise ValueError("iroot of negative")
    if k < 1:
        raise ValueError("root index must be >= 1")
    if k == 1 or n < 2:
        return n
    # Start strictly above the root: 2**ceil(bits/k) >= n**(1/k).
    x = 1 << (-(-n.bit_length() // k))
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


def rational_floor_root(x: Rational, k: int) -> int:
    """floor(x ** (1/k)) for rational x >= 0."""
    f = Fraction(x)
    if f < 0:
        raise ValueError("negative radicand")
    return iroot(f.numerator // f.denominator, k)


@dataclass(frozen=True, slots=True)
class Interval:
    """Closed rational interval [lo, hi] certifying an irrational value."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @staticmethod
    def point(x: Rational) -> "Interval":
        f = Fraction(x)
        return Interval(f, f)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def __sub__(self, other: "Interval") -> "Interval":
        return Interval(self.lo - other.hi, self.hi - other.lo)

    def __mul__(self, other: "Interval") -> "Interval":
        products = (
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        )
        return Interval(min(products), max(products))

    def scale(self, c: Rational) -> "Interval":
        c = Fraction(c)
        if c >= 0:
            return Interval(self.lo * c, self.hi * c)
        return Interval(self.hi * c, self.lo * c)

    def reciprocal(self) -> "Interval":
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("interval straddles zero")
        return Interval(1 / self.hi, 1 / self.lo)

    def contains(self, x: Rational) -> bool:
        return self.lo <= Fraction(x) <= self.hi

    def __contains__(self, x: object) -> bool:
        if isinstance(x, (int, Fraction)):
            return self.contains(x)
        return NotImplemented

    def __float__(self) -> float:
        return float(self.mid)

    def __repr__(self) -> str:
        return f"Interval({self.lo}, {self.hi})"


def root_enclosure(x: Rational, k: int, bits: int = 64) -> Interval:
    """Enclose x ** (1/k) for rational x >= 0 in a width <= 2**-bits interval.

    If x is the exact k-th power of a rational the interval is a point.
    """
    f = Fraction(x)
    if f < 0:
        raise ValueError("negative radicand")
    if f == 0:
        return Interval.point(0)
    # Exact-root shortcut: both numerator and denominator perfect k-th powers.
    rn, rd = iroot(f.numerator, k), iroot(f.denominator, k)
    if rn ** k == f.numerator and rd ** k == f.denominator:
        return Interval.point(Fraction(rn, rd))
    scale = 1 << bits
    # floor((x * scale**k) ** (1/k)) brackets x**(1/k) * scale within 1.
    m = rational_floor_root(f * scale ** k, k)
    return Interval(Fraction(m, scale), Fraction(m + 1, scale))


def sqrt_enclosure(x: Rational, bits: int = 64) -> Interval:
    return root_enclosure(x, 2, bits)


def pow_enclosure(x: Rational, e_num: int, e_den: int, bits: int = 64) -> Interval:
    """Enclose x ** (e_num / e_den) for rational x > 0 (x >= 0 if exponent > 0).

    Negative exponents go through the reciprocal of a positive-power
    enclosure, so x must then be strictly positive.
    """
    if e_den < 1:
        raise ValueError("exponent denominator must be >= 1")
    f = Fraction(x)
    if e_num == 0:
        return Interval.point(1)
    if e_num < 0:
        return pow_enclosure(f, -e_num, e_den, bits).reciprocal()
    if f < 0:
        raise ValueError("negative base")
    return root_enclosure(f ** e_num, e_den, bits)


def sqrt_le(a: Rational, b: Rational) -> bool:
    """Exact test sqrt(a) <= sqrt(b) for rationals a, b >= 0."""
    return Fraction(a) <= Fraction(b)


def sqrt_le_sum(a: Rational, b: Rational, c: Rational) -> bool:
    """Exact test sqrt(a) <= sqrt(b) + sqrt(c) for rationals a, b, c >= 0.

    Squaring twice: the inequality holds iff a - b - c <= 0, or else
    (a - b - c)^2 <= 4 b c.
    """
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    if min(a, b, c) < 0:
        raise ValueError("negative square")
    d = a - b - c
    return d <= 0 or d * d <= 4 * b * c


def _square_decompose(n: int) -> tuple[int, int]:
    """Write n = r*r * s with s squarefree over primes below 10^4.

    The cofactor left after small-prime extraction is absorbed into s
    unless it is itself a perfect square; a non-squarefree s only costs
    exactness for ties, never soundness.
    """
    r, s, m = 1, 1, n
    d = 2
    while d * d <= m and d <= 10_000:
        if m % d == 0:
            e = 0
            while m % d == 0:
                m //= d
                e += 1
            r *= d ** (e // 2)
            if e % 2:
                s *= d
        d += 1 if d == 2 else 2
    root = iroot(m, 2)
    if root * root == m:
        r *= root
    else:
        s *= m
    return r, s


def _radical_form(t_sq: Fraction) -> tuple[Fraction, int]:
    """sqrt(t_sq) = coeff * sqrt(radicand) with integer radicand."""
    if t_sq == 0:
        return Fraction(0), 1
    r, s = _square_decompose(t_sq.numerator * t_sq.denominator)
    return Fraction(r, t_sq.denominator), s


def sum_sqrt_le(terms_sq: list, bound_sq: Rational) -> bool:
    """Decide sum_i sqrt(t_i) <= sqrt(bound_sq); arguments are the squares.

    Each root is first reduced to coeff * sqrt(squarefree); like radicands
    combine, so ties such as sqrt(2) + sqrt(8) <= sqrt(18) decide exactly.
    Residual mixed-radicand comparisons fall back to enclosures refined
    until the sides separate.
    """
    bound = Fraction(bound_sq)
    if bound < 0:
        raise ValueError("negative square")
    coeffs: dict[int, Fraction] = {}
    for t in terms_sq:
        f = Fraction(t)
        if f < 0:
            raise ValueError("negative square")
        c, s = _radical_form(f)
        if c:
            coeffs[s] = coeffs.get(s, Fraction(0)) + c
    bc, bs = _radical_form(bound)
    coeffs[bs] = coeffs.get(bs, Fraction(0)) - bc
    coeffs = {s: c for s, c in coeffs.items() if c}
    if not coeffs:
        return True
    if all(c < 0 for c in coeffs.values()):
        return True
    if all(c > 0 for c in coeffs.values()):
        return False
    for bits in (128, 256, 512, 1024):
        total = Interval.point(0)
        for s, c in coeffs.items():
            total = total + root_enclosure(s, 2, bits).scale(c)
        if total.hi <= 0:
            return True
        if total.lo > 0:
            return False
    raise ArithmeticError("cannot separate sum of roots from bound")


def parse_fraction(text: str) -> Fraction:
    """Parse 'a/b' or 'a' (also decimal literals like '0.25') to a Fraction."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(text)


def format_fraction(x: Rational) -> str:
    f = Fraction(x)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"
