"""Triangular-array vectors and the exact Lorentz-type comparisons on them.

The index set is the lower triangle D = {(i, j) : i >= j >= 1}: row i has
cells (i, 1) .. (i, i).  A ``TriVector`` is a finitely supported rational
vector on D.  Two scale measurements drive everything built on top:

* ``row_norm_sq(x)``: the square of the row-average seminorm, the sum over
  rows of (absolute row sum / row index)^2.  Stored squared so it stays
  rational.
* the weak Lorentz comparison ``lorentz_le(a, c_sq, p)``: with a* the
  decreasing rearrangement of |a|, decides sup_n a*_n n^(1/p) <= c.  For
  rational data and rational c^2 this reduces to the integer power test
  (a*_n)^(2 num) * n^(2 den) <= (c^2)^num for every n, where p = num/den.

Variants taking squared or fourth-power data exist because certificates
naturally carry squares (seminorms) and fourth powers (smallness bounds);
converting would introduce roots, the variants avoid that.

The comparison constant ``lorentz_l2_constant`` encloses
C(p) = (sum_n n^(-2/p))^(1/2), the factor relating the row-average
seminorm to the weak Lorentz scale of a disjoint sum.  The tail of the
series is sandwiched between the integrals from terms+1 and from terms,
so the enclosure width falls like terms^(1 - 2/p).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

from .exact import (
    Interval,
    Rational,
    format_fraction,
    iroot,
    parse_fraction,
    pow_enclosure,
    root_enclosure,
    sqrt_enclosure,
)


@dataclass(frozen=True, slots=True)
class LorentzParam:
    """Exponent p = num/den with 1 < p < 2, in lowest terms."""

    num: int
    den: int

    def __post_init__(self) -> None:
        from math import gcd

        if self.den < 1 or not (self.den < self.num < 2 * self.den):
            raise ValueError(f"need 1 < num/den < 2, got {self.num}/{self.den}")
        if gcd(self.num, self.den) != 1:
            raise ValueError("num/den not in lowest terms")

    @classmethod
    def from_fraction(cls, p: Rational) -> "LorentzParam":
        f = Fraction(p)
        return cls(f.numerator, f.denominator)

    @property
    def value(self) -> Fraction:
        return Fraction(self.num, self.den)

    def __str__(self) -> str:
        return f"{self.num}/{self.den}"


DEFAULT_P = LorentzParam(3, 2)


class TriVector:
    """Finitely supported rational vector on the triangle {(i,j): i >= j >= 1}.

    Immutable by convention: all operations return new instances.  Zero
    entries are dropped on construction, so equal vectors have equal
    supports and hash consistently.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[tuple[int, int], Rational] | None = None):
        clean: dict[tuple[int, int], Fraction] = {}
        if entries:
            for (i, j), v in entries.items():
                if not (isinstance(i, int) and isinstance(j, int) and i >= j >= 1):
                    raise ValueError(f"index ({i}, {j}) outside the triangle")
                f = Fraction(v)
                if f:
                    clean[(i, j)] = f
        object.__setattr__(self, "_entries", clean)

    # -- access ---------------------------------------------------------

    def entry(self, i: int, j: int) -> Fraction:
        return self._entries.get((i, j), Fraction(0))

    def items(self) -> Iterator[tuple[tuple[int, int], Fraction]]:
        yield from sorted(self._entries.items())

    def support(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self._entries))

    def active_rows(self) -> tuple[int, ...]:
        return tuple(sorted({i for i, _ in self._entries}))

    def row_entries(self, i: int) -> dict[int, Fraction]:
        return {j: v for (r, j), v in self._entries.items() if r == i}

    @property
    def max_row(self) -> int:
        return max((i for i, _ in self._entries), default=0)

    def is_zero(self) -> bool:
        return not self._entries

    def is_nonnegative(self) -> bool:
        return all(v > 0 for v in self._entries.values())

    def __len__(self) -> int:
        return len(self._entries)

    # -- algebra ---------------------------------------------------------

    def __add__(self, other: "TriVector") -> "TriVector":
        if not isinstance(other, TriVector):
            return NotImplemented
        merged = dict(self._entries)
        for k, v in other._entries.items():
            merged[k] = merged.get(k, Fraction(0)) + v
        return TriVector(merged)

    def __sub__(self, other: "TriVector") -> "TriVector":
        return self + (-other)

    def __neg__(self) -> "TriVector":
        return TriVector({k: -v for k, v in self._entries.items()})

    def __abs__(self) -> "TriVector":
        return TriVector({k: abs(v) for k, v in self._entries.items()})

    def scale(self, c: Rational) -> "TriVector":
        c = Fraction(c)
        if not c:
            return TriVector()
        return TriVector({k: v * c for k, v in self._entries.items()})

    def __mul__(self, c):
        if isinstance(c, (int, Fraction)):
            return self.scale(c)
        return NotImplemented

    __rmul__ = __mul__

    def restrict_rows(self, rows: Iterable[int]) -> "TriVector":
        keep = set(rows)
        return TriVector({k: v for k, v in self._entries.items() if k[0] in keep})

    def dominates(self, other: "TriVector") -> bool:
        """Componentwise self >= other (both sides read as 0 off support)."""
        for k in set(self._entries) | set(other._entries):
            if self._entries.get(k, Fraction(0)) < other._entries.get(k, Fraction(0)):
                return False
        return True

    # -- measurements ------------------------------------------------------

    def sup_norm(self) -> Fraction:
        return max((abs(v) for v in self._entries.values()), default=Fraction(0))

    def row_sum(self, i: int, absolute: bool = False) -> Fraction:
        total = Fraction(0)
        for (r, _), v in self._entries.items():
            if r == i:
                total += abs(v) if absolute else v
        return total

    # -- identity ---------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TriVector):
            return NotImplemented
        return self._entries == other._entries

    def __hash__(self) -> int:
        return hash(frozenset(self._entries.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"({i},{j}): {format_fraction(v)}" for (i, j), v in self.items())
        return f"TriVector({{{inner}}})"

    # -- text format --------------------------------------------------------

    def to_text(self) -> str:
        lines = ["trivector 1"]
        for (i, j), v in self.items():
            lines.append(f"{i} {j} {format_fraction(v)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "TriVector":
        lines = [ln.strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln and not ln.startswith("#")]
        if not lines or lines[0] != "trivector 1":
            raise ValueError("missing 'trivector 1' header")
        entries: dict[tuple[int, int], Fraction] = {}
        for ln in lines[1:]:
            parts = ln.split()
            if len(parts) != 3:
                raise ValueError(f"bad entry line: {ln!r}")
            i, j = int(parts[0]), int(parts[1])
            if (i, j) in entries:
                raise ValueError(f"duplicate index ({i}, {j})")
            entries[(i, j)] = parse_fraction(parts[2])
        return cls(entries)


def dot(x: TriVector, y: TriVector) -> Fraction:
    small, big = (x, y) if len(x) <= len(y) else (y, x)
    return sum((v * big.entry(i, j) for (i, j), v in small.items()), Fraction(0))


def sup_norm(x: TriVector) -> Fraction:
    return x.sup_norm()


def is_row_disjoint(*xs: TriVector) -> bool:
    """Whether the vectors occupy pairwise disjoint sets of rows."""
    seen: set[int] = set()
    for x in xs:
        rows = set(x.active_rows())
        if rows & seen:
            return False
        seen |= rows
    return True


def row_norm_sq(x: TriVector) -> Fraction:
    """Square of the row-average seminorm: sum_i (|row i| sum / i)^2."""
    acc: dict[int, Fraction] = {}
    for (i, _), v in x._entries.items():  # noqa: SLF001 - module-internal fast path
        acc[i] = acc.get(i, Fraction(0)) + abs(v)
    return sum((s / i) ** 2 for i, s in acc.items())


def l2_norm_sq(values: Iterable[Rational]) -> Fraction:
    return sum((Fraction(v) ** 2 for v in values), Fraction(0))


def decreasing_rearrangement(values: Iterable[Rational]) -> tuple[Fraction, ...]:
    return tuple(sorted((abs(Fraction(v)) for v in values), reverse=True))


# -- weak Lorentz comparisons ----------------------------------------------


def lorentz_le(values: Iterable[Rational], c_sq: Rational, p: LorentzParam) -> bool:
    """Decide sup_n a*_n n^(1/p) <= c given c^2; exact integer power test."""
    c = Fraction(c_sq)
    if c < 0:
        raise ValueError("negative squared bound")
    rhs = c**p.num
    for n, v in enumerate(decreasing_rearrangement(values), start=1):
        if v == 0:
            break
        if v ** (2 * p.num) * n ** (2 * p.den) > rhs:
            return False
    return True


def lorentz_le_sq(values_sq: Iterable[Rational], c_sq: Rational, p: LorentzParam) -> bool:
    """Same comparison with the data already squared (a*_n^2 given)."""
    c = Fraction(c_sq)
    if c < 0:
        raise ValueError("negative squared bound")
    rhs = c**p.num
    squares = sorted((Fraction(v) for v in values_sq), reverse=True)
    for n, v2 in enumerate(squares, start=1):
        if v2 < 0:
            raise ValueError("negative square in data")
        if v2 == 0:
            break
        if v2**p.num * n ** (2 * p.den) > rhs:
            return False
    return True


def lorentz_le_4th(values_sq: Iterable[Rational], c_4th: Rational, p: LorentzParam) -> bool:
    """Comparison against c given c^4, data squared; used for c = (16 eps)^(1/4)."""
    c4 = Fraction(c_4th)
    if c4 < 0:
        raise ValueError("negative fourth-power bound")
    rhs = c4**p.num
    squares = sorted((Fraction(v) for v in values_sq), reverse=True)
    for n, v2 in enumerate(squares, start=1):
        if v2 < 0:
            raise ValueError("negative square in data")
        if v2 == 0:
            break
        if v2 ** (2 * p.num) * n ** (4 * p.den) > rhs:
            return False
    return True


def lorentz_value(
    values: Iterable[Rational], p: LorentzParam, rel_tol: Rational = Fraction(1, 10**9)
) -> Interval:
    """Enclose sup_n a*_n n^(1/p) within relative width rel_tol."""
    a = decreasing_rearrangement(values)
    if not a or a[0] == 0:
        return Interval.point(0)
    for bits in (96, 192, 384):
        lo = hi = Fraction(0)
        for n, v in enumerate(a, start=1):
            if v == 0:
                break
            iv = pow_enclosure(n, p.den, p.num, bits)
            lo = max(lo, v * iv.lo)
            hi = max(hi, v * iv.hi)
        if hi - lo <= Fraction(rel_tol) * lo:
            return Interval(lo, hi)
    raise ArithmeticError("rel_tol unreachable")  # not reachable at sane tolerances


def lorentz_value_sq(
    values_sq: Iterable[Rational], p: LorentzParam, rel_tol: Rational = Fraction(1, 10**9)
) -> Interval:
    """Enclose sup_n sqrt(a2*_n) n^(1/p) from squared data."""
    squares = sorted((Fraction(v) for v in values_sq), reverse=True)
    if not squares or squares[0] == 0:
        return Interval.point(0)
    for bits in (96, 192, 384):
        lo = hi = Fraction(0)
        for n, v2 in enumerate(squares, start=1):
            if v2 < 0:
                raise ValueError("negative square in data")
            if v2 == 0:
                break
            # value_n = (v2^num * n^(2 den))^(1 / (2 num))
            iv = root_enclosure(v2**p.num * n ** (2 * p.den), 2 * p.num, bits)
            lo = max(lo, iv.lo)
            hi = max(hi, iv.hi)
        if hi - lo <= Fraction(rel_tol) * lo:
            return Interval(lo, hi)
    raise ArithmeticError("rel_tol unreachable")


# -- the series constant ------------------------------------------------------

_ACC_BITS = 96  # scaled-integer accumulator; rounding stays ~1e-29 per term
_TERM_BITS = 64


@lru_cache(maxsize=16)
def _constant_sq_cached(num: int, den: int, terms: int) -> Interval:
    scale = 1 << _TERM_BITS
    acc_scale = 1 << _ACC_BITS
    q_num, q_den = 2 * den, num  # exponent 2/p = 2 den / num
    lo_acc = hi_acc = 0
    s_pow = scale**q_den
    for n in range(1, terms + 1):
        # n^(2/p) in [m, m+1] / scale, so the term n^(-2/p) lies in
        # [scale/(m+1), scale/m]; accumulate at acc_scale with outward floor/ceil.
        m = iroot(s_pow * n**q_num, q_den)
        lo_acc += (acc_scale * scale) // (m + 1)
        hi_acc += -((-acc_scale * scale) // m)
    partial = Interval(Fraction(lo_acc, acc_scale), Fraction(hi_acc, acc_scale))
    # Tail sum over n > terms sandwiched by integrals of t^(-2/p):
    # integral from M to infinity = num/(2 den - num) * M^(1 - 2/p).
    coeff = Fraction(num, 2 * den - num)
    tail_exp_num, tail_exp_den = -(2 * den - num), num
    tail_lo = pow_enclosure(terms + 1, tail_exp_num, tail_exp_den, _TERM_BITS).lo * coeff
    tail_hi = pow_enclosure(terms, tail_exp_num, tail_exp_den, _TERM_BITS).hi * coeff
    return Interval(partial.lo + tail_lo, partial.hi + tail_hi)


def lorentz_l2_constant(p: LorentzParam, terms: int = 10**4) -> Interval:
    """Enclose C(p) = (sum_{n>=1} n^(-2/p))^(1/2).

    The partial sum is accumulated in scaled integers; the series tail is
    bounded between the integrals starting at terms+1 and at terms.  More
    terms give a nested, tighter enclosure.
    """
    if terms < 1:
        raise ValueError("need at least one term")
    c_sq = _constant_sq_cached(p.num, p.den, terms)
    return Interval(sqrt_enclosure(c_sq.lo).lo, sqrt_enclosure(c_sq.hi).hi)


def lorentz_l2_constant_sq(p: LorentzParam, terms: int = 10**4) -> Interval:
    if terms < 1:
        raise ValueError("need at least one term")
    return _constant_sq_cached(p.num, p.den, terms)


# -- row pairings -------------------------------------------------------------


def pairing_vector(coeffs: Iterable[Rational]) -> TriVector:
    """Constant-on-rows vector: value c_i / i on every cell of row i."""
    entries: dict[tuple[int, int], Fraction] = {}
    for i, c in enumerate(coeffs, start=1):
        f = Fraction(c)
        if f:
            for j in range(1, i + 1):
                entries[(i, j)] = f / i
    return TriVector(entries)


def row_pairing(x: TriVector, coeffs: Iterable[Rational]) -> Fraction:
    """<x, pairing_vector(coeffs)> = sum_i (c_i / i) * (signed row i sum)."""
    total = Fraction(0)
    for i, c in enumerate(coeffs, start=1):
        f = Fraction(c)
        if f:
            total += f * x.row_sum(i) / i
    return total
