"""Deterministic instance families for the sweep suites.

Every sampler takes an explicit random.Random, so a (suite, seed, trial)
triple regenerates its instance bit for bit.  Instances satisfy their
family's preconditions by construction; the suites re-check anyway.
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import ceil, isqrt

from .core import LorentzParam, TriVector
from .decompose import DisjointRep, make_disjoint_rep
from .generators import ZERO_SEQ, GridSeq, HullCertificate

Vector = tuple[Fraction, ...]


def subset_values(
    rng: random.Random, max_len: int = 64, length: int | None = None
) -> list[Fraction]:
    """Values in [0, 1] with total above 1, for the subset selector."""
    if length is None:
        length = rng.randint(2, max_len)
    values = [Fraction(rng.randint(0, 32), 32) for _ in range(length)]
    if sum(values) <= 1:
        # force feasibility: one full entry plus one positive companion
        values[rng.randrange(length)] = Fraction(1)
        other = rng.randrange(length - 1)
        values[other if values[other] != 1 else length - 1] += Fraction(1, 32)
    return values


def sorted_unit_matrix(
    rng: random.Random, max_depth: int = 20, max_cols: int = 20
) -> tuple[tuple[Fraction, ...], ...]:
    """Columns of a [0, 1] matrix, each sorted nonincreasing."""
    cols = []
    for _ in range(rng.randint(1, max_cols)):
        depth = rng.randint(1, max_depth)
        col = sorted(
            (Fraction(rng.randint(0, 16), 16) for _ in range(depth)), reverse=True
        )
        cols.append(tuple(col))
    return tuple(cols)


def kdisjoint_family(
    rng: random.Random, max_k: int = 5, max_n: int = 50, max_coord: int = 60
) -> tuple[int, list[Vector]]:
    """At most k members nonzero per coordinate, each in the l2 unit ball."""
    k = rng.randint(1, max_k)
    n = rng.randint(1, max_n)
    coords = rng.randint(1, max_coord)
    owned: list[list[int]] = [[] for _ in range(n)]
    for c in range(coords):
        for i in rng.sample(range(n), min(k, n)):
            if rng.random() < 0.7:
                owned[i].append(c)
    vectors = []
    for mine in owned:
        entries = [Fraction(0)] * coords
        if mine:
            d = isqrt(len(mine) - 1) + 1  # ceil sqrt keeps the ball exact
            for c in mine:
                entries[c] = Fraction(rng.randint(-8, 8), 8 * d)
        vectors.append(tuple(entries))
    return k, vectors


def covered_generators(
    rng: random.Random,
    epsilon: Fraction,
    max_m: int = 200,
    max_row: int = 50,
    max_waves: int = 4,
) -> list[GridSeq]:
    """Family whose averaged indicator has sup at most epsilon.

    Waves of row-disjoint sequences bound the coverage of every
    coordinate by the wave count; zero sequences pad the family until
    that count is at most epsilon * M.
    """
    per = ceil(1 / epsilon)
    if per > max_m:
        raise ValueError(f"max_m={max_m} cannot host epsilon={epsilon} families")
    waves = rng.randint(1, max(1, min(max_waves, max_m // per)))
    seqs: list[GridSeq] = []
    for _ in range(waves):
        width = min(12, max_row, max(1, max_m // waves))
        chosen = rng.sample(range(1, max_row + 1), rng.randint(1, width))
        multi = sorted(i for i in chosen if i > 1)
        if 1 in chosen:
            seqs.append(GridSeq.make([1]))
        pos = 0
        while pos < len(multi):
            take = rng.randint(1, min(3, len(multi) - pos))
            group = multi[pos : pos + take]
            pos += take
            counts = [0] * group[-1]
            for i in group:
                cap = i if take == 1 else max(1, i // 2)
                counts[i - 1] = rng.randint(1, cap)
            seqs.append(GridSeq.make(counts))
    target = max(len(seqs), waves * per)
    seqs += [ZERO_SEQ] * (target - len(seqs))
    return seqs


def blocked_squares(
    rng: random.Random,
    max_len: int = 60,
    max_blocks: int = 5,
) -> tuple[list[Fraction], tuple[int, ...]]:
    """Squared values passing the block conditions at the breakpoints.

    Within block k+1 the j-th entry sits under 1/max(j, n_k)^2, which
    keeps the blockwise weak-Lorentz norm at 1 and the tail entries
    under n_k^(-1/p); the whole sequence need not stay under 1.
    """
    nblocks = rng.randint(1, max_blocks)
    lengths = [rng.randint(1, max(1, max_len // nblocks)) for _ in range(nblocks)]
    breaks = [0]
    for ln in lengths:
        breaks.append(breaks[-1] + ln)
    values: list[Fraction] = []
    for k in range(nblocks):
        n_k = breaks[k]
        for j in range(1, lengths[k] + 1):
            cap = Fraction(1, max(j, n_k) ** 2)
            values.append(Fraction(rng.randint(0, 16), 16) * cap)
    return values, tuple(breaks)


def unit_vector(rng: random.Random, max_len: int = 8) -> Vector:
    """Exact-unit rational vector with support in the first max_len slots.

    Resamples small integer tuples until the squared sum is a perfect
    square; zeroing the first four slots part of the time exercises the
    tail branch of the quotient witness.
    """
    while True:
        length = rng.randint(2, max_len)
        g = [rng.randint(-9, 9) for _ in range(length)]
        if length > 4 and rng.random() < 0.4:
            g[:4] = [0, 0, 0, 0]
        total = sum(v * v for v in g)
        root = isqrt(total)
        if total and root * root == total:
            return tuple(Fraction(v, root) for v in g)


def _single_row_seq(rng: random.Random, i: int) -> GridSeq:
    counts = [0] * i
    counts[i - 1] = rng.randint(1, i)
    return GridSeq.make(counts)


def body_element(
    rng: random.Random, p: LorentzParam, max_row: int = 8
) -> tuple[TriVector, tuple[Fraction, ...], tuple[DisjointRep, ...]]:
    """Signed element of the unit body as a certified convex combination.

    The representatives stay nonnegative so their certificates dominate;
    sign flips on the final vector are covered by solidity.
    """
    reps = []
    for _ in range(rng.randint(1, 3)):
        rows = sorted(rng.sample(range(1, max_row + 1), rng.randint(1, 3)))
        pieces = []
        certs = []
        for rank, i in enumerate(rows, start=1):
            seq = _single_row_seq(rng, i)
            scale = Fraction(rng.randint(1, 8), 8 * rank)  # at most 1/rank
            pieces.append(seq.indicator().scale(scale))
            certs.append(HullCertificate((seq,), (Fraction(1),), scale))
        reps.append(make_disjoint_rep(pieces, p, certs=certs))
    raw = [rng.randint(1, 4) for _ in reps]
    total = sum(raw)
    weights = tuple(Fraction(a, total) for a in raw)
    element = TriVector()
    for w, rep in zip(weights, reps):
        element = element + rep.element().scale(w)
    signed = TriVector(
        {
            cell: -v if rng.random() < 0.3 else v
            for cell, v in element.items()
        }
    )
    return signed, weights, tuple(reps)


# scaled ratios strictly inside the rank-2 and rank-3 budgets, checked
# exactly in the tests: (5/8)^3 * 4 < 1 and (12/25)^3 * 9 < 1
SAFE_RANK2 = (Fraction(1, 2), Fraction(3, 5), Fraction(5, 8))
SAFE_RANK3 = (Fraction(1, 4), Fraction(2, 5), Fraction(12, 25))
# full-row scale ratios strictly inside the two-row refinement band
BAND_RATIOS = (
    Fraction(2, 3),
    Fraction(3, 4),
    Fraction(5, 6),
    Fraction(1),
    Fraction(7, 6),
    Fraction(5, 4),
    Fraction(10, 7),
)


def _full_row(i: int) -> TriVector:
    return GridSeq.make(0 if r != i else i for r in range(1, i + 1)).indicator()


def _flip_cells(rng: random.Random, x: TriVector) -> TriVector:
    return TriVector(
        {cell: -v if rng.random() < 0.3 else v for cell, v in x.items()}
    )


def micro_instance(rng: random.Random) -> tuple[TriVector, bool]:
    """Instance for the two-sided enclosure; flag marks unit-vector cases.

    Families rotate through the shapes the enclosure is known to close:
    single rows, scaled indicators, dominated row-disjoint sums, paired
    full rows inside the refinement band, and unit indicators.
    """
    kind = rng.choices(range(5), weights=(25, 25, 20, 15, 15))[0]
    if kind == 0:
        i = rng.randint(1, 3)
        entries = {}
        for j in rng.sample(range(1, i + 1), rng.randint(1, i)):
            entries[(i, j)] = Fraction(rng.randint(-16, 16), 8)
        return TriVector(entries), False
    if kind == 1:
        i = rng.randint(1, 3)
        scale = Fraction(rng.randint(1, 16), 8)
        return _flip_cells(rng, _single_row_seq(rng, i).indicator().scale(scale)), False
    if kind == 2:
        rows = sorted(rng.sample((1, 2, 3), rng.randint(2, 3)))
        top = Fraction(rng.randint(1, 16), 8)
        ratios = (Fraction(1), rng.choice(SAFE_RANK2), rng.choice(SAFE_RANK3))
        x = TriVector()
        for rank, i in enumerate(rng.sample(rows, len(rows)), start=1):
            x = x + _single_row_seq(rng, i).indicator().scale(top * ratios[rank - 1])
        return _flip_cells(rng, x), False
    if kind == 3:
        lo, hi = sorted(rng.sample((1, 2, 3), 2))
        a = Fraction(rng.randint(1, 12), 8)
        b = a * rng.choice(BAND_RATIOS)
        return _full_row(lo).scale(a) + _full_row(hi).scale(b), False
    return _full_row(rng.randint(1, 3)), True


def split_instance(
    rng: random.Random, p: LorentzParam, epsilon: Fraction, max_row: int = 12
) -> tuple[tuple[Fraction, ...], tuple[DisjointRep, ...]]:
    """Weighted representatives whose sum has sup at most epsilon.

    Piece scales stay at or below epsilon so the sup bound holds for any
    convex weights; denominators stay small so the slice expansions keep
    their generator multisets manageable.
    """
    reps = []
    for _ in range(rng.randint(1, 2)):
        rows = sorted(rng.sample(range(1, max_row + 1), rng.randint(1, 3)))
        pieces = []
        certs = []
        for i in rows:
            seq = _single_row_seq(rng, i)
            scale = Fraction(rng.randint(1, 8), 8) * epsilon
            pieces.append(seq.indicator().scale(scale))
            certs.append(HullCertificate((seq,), (Fraction(1),), scale))
        reps.append(make_disjoint_rep(pieces, p, certs=certs))
    weights = tuple(Fraction(rng.randint(1, 4), 8) for _ in reps)
    return weights, tuple(reps)


def merge_family(
    rng: random.Random, p: LorentzParam, count: int = 50
) -> list[DisjointRep]:
    """Row-disjoint single-piece representatives with decreasing seminorms.

    Representative t has seminorm at most 1/(t+1), under the greedy
    threshold at every step, so the merge keeps the whole family.
    """
    rows = rng.sample(range(1, count + 1), count)
    reps = []
    for t, i in enumerate(rows):
        scale = Fraction(rng.randint(4, 8), 8 * (t + 1))
        seq = GridSeq.make(0 if r != i else i for r in range(1, i + 1))
        piece = seq.indicator().scale(scale)
        cert = HullCertificate((seq,), (Fraction(1),), scale)
        reps.append(make_disjoint_rep([piece], p, certs=[cert]))
    return reps
