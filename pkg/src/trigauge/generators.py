"""Generator sequences and the solid convex hull they span.

A ``GridSeq`` is a sequence of integer cell counts m_1, m_2, ... with
0 <= m_i <= i and sum (m_i / i)^2 <= 1.  Its indicator vector puts a one
in the first m_i cells of row i.  The unit body U studied here is the
solid convex hull of all indicator vectors: x lies in scale * U exactly
when |x| is dominated componentwise by scale times a subconvex
combination of indicators.

Membership and the minimal covering scale are decided by exact covering
LPs over an enumerated generator set.  Enumeration restricted to the rows
where x lives loses nothing: dropping rows from a valid sequence keeps it
valid and keeps the domination on those rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .core import TriVector
from .exact import Rational, format_fraction
from .lp import solve_lp


@dataclass(frozen=True, slots=True)
class GridSeq:
    """Cell counts per row, trailing zeros trimmed; empty tuple is the zero sequence."""

    m: tuple[int, ...]

    def __post_init__(self) -> None:
        m = tuple(self.m)
        while m and m[-1] == 0:
            m = m[:-1]
        object.__setattr__(self, "m", m)
        budget = Fraction(0)
        for i, count in enumerate(m, start=1):
            if not isinstance(count, int) or not 0 <= count <= i:
                raise ValueError(f"count {count} invalid for row {i}")
            budget += Fraction(count, i) ** 2
        if budget > 1:
            raise ValueError(f"squared coefficient sum {budget} exceeds 1")

    @classmethod
    def make(cls, counts: Iterable[int]) -> "GridSeq":
        return cls(tuple(counts))

    def coeff(self, i: int) -> Fraction:
        if 1 <= i <= len(self.m):
            return Fraction(self.m[i - 1], i)
        return Fraction(0)

    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, i) for i, c in enumerate(self.m, start=1))

    @property
    def norm_sq(self) -> Fraction:
        return sum((Fraction(c, i) ** 2 for i, c in enumerate(self.m, start=1)), Fraction(0))

    def active_rows(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.m, start=1) if c)

    def indicator(self) -> TriVector:
        entries = {}
        for i, count in enumerate(self.m, start=1):
            for j in range(1, count + 1):
                entries[(i, j)] = Fraction(1)
        return TriVector(entries)

    def restrict_rows(self, rows: Iterable[int]) -> "GridSeq":
        keep = set(rows)
        return GridSeq(tuple(c if i in keep else 0 for i, c in enumerate(self.m, start=1)))

    def to_line(self) -> str:
        return "b: " + " ".join(str(c) for c in self.m) if self.m else "b:"

    @classmethod
    def from_line(cls, line: str) -> "GridSeq":
        body = line.strip()
        if not body.startswith("b:"):
            raise ValueError(f"sequence line must start with 'b:', got {line!r}")
        parts = body[2:].split()
        return cls(tuple(int(p) for p in parts))

    def __len__(self) -> int:
        return len(self.m)


ZERO_SEQ = GridSeq(())


def _rows_key(rows) -> tuple[int, ...]:
    if isinstance(rows, int):
        return tuple(range(1, rows + 1))
    out = tuple(sorted(set(rows)))
    if out and out[0] < 1:
        raise ValueError("rows must be positive")
    return out


@lru_cache(maxsize=256)
def _enumerate_cached(rows: tuple[int, ...], limit: int | None) -> tuple[GridSeq, ...]:
    found: list[tuple[int, ...]] = []
    max_row = rows[-1] if rows else 0
    counts = [0] * max_row

    def walk(idx: int, budget: Fraction) -> None:
        if idx == len(rows):
            found.append(tuple(counts))
            if limit is not None and len(found) > limit:
                raise RuntimeError(f"generator enumeration exceeds {limit}")
            return
        i = rows[idx]
        for m in range(i + 1):
            cost = Fraction(m, i) ** 2
            if cost > budget:
                break
            counts[i - 1] = m
            walk(idx + 1, budget - cost)
        counts[i - 1] = 0

    walk(0, Fraction(1))
    return tuple(GridSeq(m) for m in found)


def enumerate_grid_seqs(rows, limit: int | None = 200_000) -> tuple[GridSeq, ...]:
    """All valid sequences supported on the given rows (int means rows 1..n).

    Includes the zero sequence.  Ordered lexicographically by padded
    counts, so the output is deterministic.  Raises RuntimeError past
    ``limit`` candidates; callers with large rows catch that and fall
    back to cheaper bounds.
    """
    return _enumerate_cached(_rows_key(rows), limit)


@dataclass(frozen=True, slots=True)
class HullCertificate:
    """Witness that |x| <= scale * sum w_q * indicator(seq_q), sum w <= 1."""

    seqs: tuple[GridSeq, ...]
    weights: tuple[Fraction, ...]
    scale: Fraction

    def combination(self) -> TriVector:
        total = TriVector()
        for seq, w in zip(self.seqs, self.weights):
            total = total + seq.indicator().scale(w * self.scale)
        return total

    def validate(self, x: TriVector) -> None:
        if len(self.seqs) != len(self.weights):
            raise AssertionError("length mismatch")
        if any(w < 0 for w in self.weights):
            raise AssertionError("negative weight")
        if sum(self.weights, Fraction(0)) > 1:
            raise AssertionError("weights exceed 1")
        if self.scale < 0:
            raise AssertionError("negative scale")
        if not self.combination().dominates(abs(x)):
            raise AssertionError("combination does not dominate |x|")


def hull_min_scale(
    x: TriVector, rows=None, limit: int | None = 200_000
) -> tuple[Fraction, HullCertificate]:
    """Exact minimal scale with x in scale * U, plus the covering witness.

    Solves min sum W_q  s.t.  sum W_q indicator_q >= |x| over all
    generators on the rows of x; the optimum is the gauge of U at |x|
    restricted to those rows (the witness weights are W / optimum).
    """
    if x.is_zero():
        return Fraction(0), HullCertificate((), (), Fraction(0))
    target = abs(x)
    row_set = _rows_key(rows) if rows is not None else target.active_rows()
    seqs = [s for s in enumerate_grid_seqs(row_set, limit) if s.m]
    cells = target.support()
    cols = [s.indicator() for s in seqs]
    mat = [[col.entry(i, j) for col in cols] for (i, j) in cells]
    rhs = [target.entry(i, j) for (i, j) in cells]
    res = solve_lp([Fraction(1)] * len(seqs), mat, rhs)
    if res.status != "optimal":
        raise ValueError("target not coverable on its rows (cell outside row range?)")
    lam = res.objective
    picked = [(s, w) for s, w in zip(seqs, res.x) if w]
    cert = HullCertificate(
        tuple(s for s, _ in picked),
        tuple(w / lam for _, w in picked),
        lam,
    )
    cert.validate(x)
    return lam, cert


def hull_member(
    x: TriVector, scale: Rational = 1, rows=None, limit: int | None = 200_000
) -> HullCertificate | None:
    """Certificate that x lies in scale * U, or None when it does not."""
    scale = Fraction(scale)
    if scale < 0:
        raise ValueError("negative scale")
    if x.is_zero():
        return HullCertificate((), (), scale)
    if scale == 0:
        return None
    lam, cert = hull_min_scale(x, rows=rows, limit=limit)
    if lam > scale:
        return None
    out = HullCertificate(cert.seqs, cert.weights, scale)
    out.validate(x)
    return out


def average_indicators(seqs: Sequence[GridSeq]) -> TriVector:
    """Exact average (1/M) sum indicator(seq_q)."""
    if not seqs:
        raise ValueError("empty family")
    total = TriVector()
    for s in seqs:
        total = total + s.indicator()
    return total.scale(Fraction(1, len(seqs)))


def disjointness_degree(seqs: Sequence[GridSeq]) -> int:
    """Largest number of sequences sharing one row; 0 for an empty family.

    Equals len(seqs) * sup_norm(average_indicators(seqs)) because cell
    (i, 1) is hit by every sequence active on row i.
    """
    rows: dict[int, int] = {}
    for s in seqs:
        for i in s.active_rows():
            rows[i] = rows.get(i, 0) + 1
    return max(rows.values(), default=0)


def parse_seq_file(text: str) -> list[GridSeq]:
    """One sequence per 'b:' line; blank lines and '#' comments ignored."""
    out = []
    for ln in text.splitlines():
        ln = ln.strip()
        if ln and not ln.startswith("#"):
            out.append(GridSeq.from_line(ln))
    return out


def seq_file_text(seqs: Sequence[GridSeq]) -> str:
    return "\n".join(s.to_line() for s in seqs) + "\n"


def format_weighted(cert: HullCertificate) -> str:
    pairs = ", ".join(
        f"{format_fraction(w)} * ({s.to_line()})" for s, w in zip(cert.seqs, cert.weights)
    )
    return f"scale {format_fraction(cert.scale)}: {pairs or 'zero'}"
