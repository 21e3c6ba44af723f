"""Decompositions of flat averages and the splitting of hull elements.

The central algorithm takes a uniform average x = (1/M) sum of M
indicator vectors whose sup norm is at most eps and produces a
certificate that x lies in q * A for an explicitly computed rational
q <= 5 eps^(1/4), where A is the set of row-disjoint sums of unit-body
elements with weak-Lorentz piece seminorms at most 1.  Everything is
exact: the only irrational quantities in the mathematics (the blocking
threshold, fourth roots of eps) are replaced by rational surrogates
whose defining inequalities are checked through integer power tests.

Pipeline:

1. sup(x) <= eps is equivalent to no row being active in more than
   k = floor(eps M) of the generators.
2. Per active coordinate, the squared generator coefficients are sorted
   decreasingly into a [0,1]-valued matrix with k rank rows; its total
   mass is at most M.
3. Coordinates are blocked greedily so each block (except possibly the
   last) carries mass just above theta * M, where theta is a rational
   upper surrogate of the threshold (2 eps^(-p/4) - 1)^(-1).
   The block count L then satisfies L^(4 den) eps^num < 2^(4 den).
4. Each block's submatrix is partitioned into parts holding at most one
   cell per column with cell sums <= 1; reductions remove at least 1/2
   of mass each, so a block yields r_m <= (2 theta + 3 eps) M parts.
5. Parts turn into generator sequences by copying the donor counts, the
   block sums y_m reassemble x exactly, each y_m lies in (r_m / M) U,
   and the vector of seminorms obeys the fourth-power Lorentz test
   against 16 eps.

The same machinery splits an arbitrary element of the gauge body
(``split_element``) into a front part certified small in gauge plus a
tail whose representatives have uniformly small piece seminorms, and
merges row-disjoint representatives with geometrically growing lengths
(``merge_representatives``).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence

from .core import (
    LorentzParam,
    TriVector,
    is_row_disjoint,
    lorentz_le_4th,
    lorentz_le_sq,
    lorentz_value_sq,
    row_norm_sq,
)
from .exact import Rational, iroot, pow_enclosure
from .generators import (
    GridSeq,
    HullCertificate,
    ZERO_SEQ,
    average_indicators,
    disjointness_degree,
    hull_member,
)

Matrix = tuple[tuple[Fraction, ...], ...]  # columns, each sorted nonincreasing


def select_subset(values: Sequence[Rational]) -> tuple[int, ...]:
    """Indices (0-based) of a subset with sum in [1/2, 1].

    Requires values in [0, 1] with total > 1.  Takes the first single
    value >= 1/2 when one exists, otherwise the shortest prefix of the
    positive entries reaching 1/2; either way the selected sum cannot
    exceed 1.
    """
    vals = [Fraction(v) for v in values]
    if any(v < 0 or v > 1 for v in vals):
        raise ValueError("values must lie in [0, 1]")
    if sum(vals) <= 1:
        raise ValueError("total must exceed 1")
    half = Fraction(1, 2)
    for idx, v in enumerate(vals):
        if v >= half:
            return (idx,)
    chosen: list[int] = []
    acc = Fraction(0)
    for idx, v in enumerate(vals):
        if v == 0:
            continue
        chosen.append(idx)
        acc += v
        if acc >= half:
            return tuple(chosen)
    raise AssertionError("unreachable: total exceeds 1")


def _check_entries(cols: Matrix) -> None:
    for col in cols:
        for v in col:
            if v < 0 or v > 1:
                raise ValueError("matrix entries must lie in [0, 1]")


def _check_sorted(cols: Matrix) -> None:
    for col in cols:
        if any(a < b for a, b in zip(col, col[1:])):
            raise ValueError("columns must be sorted nonincreasing")


def reduce_step(cols: Matrix) -> tuple[frozenset[int], Matrix] | None:
    """One reduction: remove the top entries of a column subset with mass >= 1/2.

    The tops are the first nonzero entry of every column (which is the
    column maximum once columns are sorted).  Returns None when their
    total is at most 1 (the matrix is irreducible).  Columns keep their
    positions; removed cells become zeros.
    """
    cols = tuple(tuple(Fraction(v) for v in col) for col in cols)
    _check_entries(cols)
    tops: list[tuple[int, Fraction]] = []
    for j, col in enumerate(cols):
        top = next((v for v in col if v), None)
        if top is not None:
            tops.append((j, top))
    if sum((v for _, v in tops), Fraction(0)) <= 1:
        return None
    picked = select_subset([v for _, v in tops])
    selected = frozenset(tops[i][0] for i in picked)
    new_cols = []
    for j, col in enumerate(cols):
        if j in selected:
            first = next(i for i, v in enumerate(col) if v)
            col = col[:first] + (Fraction(0),) + col[first + 1 :]
        new_cols.append(col)
    return selected, tuple(new_cols)


@dataclass(frozen=True, slots=True)
class PartitionResult:
    """Cells grouped so each part holds <= 1 cell per column, sums <= 1."""

    parts: tuple[frozenset[tuple[int, int]], ...]  # cells (depth, column)
    reductions: int


def partition_matrix(cols, check: bool = True) -> PartitionResult:
    """Partition the cells of a sorted [0,1] matrix.

    Runs reductions until the top entries sum to at most 1, then sweeps
    the leftover cells at each depth into one part apiece (their sums
    are dominated by the final top sums, hence <= 1).  The number of
    reductions is less than twice the total mass.  Cell addresses are
    (depth from the top of the column, column index); every cell lands
    in exactly one part, zero cells always in a leftover part.
    """
    cols = tuple(tuple(Fraction(v) for v in col) for col in cols)
    _check_entries(cols)
    _check_sorted(cols)
    # Pointer form of the reduce_step loop: cells above pointers[j] are
    # removed.  Sortedness puts nonzero cells first, so pointers only
    # ever traverse nonzero prefixes.
    pointers = [0] * len(cols)
    nonzero = [sum(1 for v in col if v) for col in cols]
    parts: list[frozenset[tuple[int, int]]] = []
    total = sum((v for col in cols for v in col), Fraction(0))
    while True:
        tops = [
            (j, cols[j][pointers[j]])
            for j in range(len(cols))
            if pointers[j] < nonzero[j]
        ]
        if sum((v for _, v in tops), Fraction(0)) <= 1:
            break
        picked = select_subset([v for _, v in tops])
        part = []
        for i in picked:
            j = tops[i][0]
            part.append((pointers[j], j))
            pointers[j] += 1
        parts.append(frozenset(part))
    reductions = len(parts)
    if check and total > 0 and reductions >= 2 * total:
        raise AssertionError("reduction count reached 2 * mass")
    max_depth = max((len(col) for col in cols), default=0)
    for depth in range(max_depth):
        part = frozenset(
            (depth, j) for j in range(len(cols)) if pointers[j] <= depth < len(cols[j])
        )
        if part:
            parts.append(part)
    if check:
        _validate_partition(cols, parts)
    return PartitionResult(tuple(parts), reductions)


def _validate_partition(cols, parts) -> None:
    seen: set[tuple[int, int]] = set()
    for part in parts:
        by_col: set[int] = set()
        total = Fraction(0)
        for depth, j in part:
            if j in by_col:
                raise AssertionError("two cells of one column in a part")
            by_col.add(j)
            total += cols[j][depth]
        if total > 1:
            raise AssertionError("part sum exceeds 1")
        if part & seen:
            raise AssertionError("cell in two parts")
        seen |= part
    expect = {(d, j) for j, col in enumerate(cols) for d in range(len(col))}
    if seen != expect:
        raise AssertionError("cells lost or invented by partition")


def column_blocking(masses: Sequence[Rational], threshold: Rational) -> tuple[int, ...]:
    """Greedy breakpoints 0 = c_0 < c_1 < ... <= len(masses).

    Each block [c_m, c_{m+1}) accumulates mass until it first exceeds
    the threshold; a leftover block of mass <= threshold may close the
    list.  Empty input gives (0,).
    """
    threshold = Fraction(threshold)
    if threshold < 0:
        raise ValueError("negative threshold")
    masses = [Fraction(m) for m in masses]
    if any(m < 0 for m in masses):
        raise ValueError("negative mass")
    breaks = [0]
    acc = Fraction(0)
    for idx, m in enumerate(masses, start=1):
        acc += m
        if acc > threshold:
            breaks.append(idx)
            acc = Fraction(0)
    if breaks[-1] != len(masses):
        breaks.append(len(masses))
    return tuple(breaks)


def theta_for(epsilon: Rational, p: LorentzParam) -> Fraction:
    """Rational theta slightly above the threshold (2 eps^(-p/4) - 1)^(-1).

    Refined until both defining inequalities hold exactly: theta at or
    above the threshold, certified by eps^num <= (2 theta / (1 + theta))^(4 den),
    and (2 theta + 3 eps)^4 <= 625 eps, the scale inequality the final
    certificate relies on.  Both hold for the true threshold whenever
    0 < eps < 1, so refinement terminates.
    """
    eps = Fraction(epsilon)
    if not 0 < eps < 1:
        raise ValueError("need 0 < eps < 1")
    for bits in (48, 96, 192, 384, 768):
        zeta_hi = pow_enclosure(eps, p.num, 4 * p.den, bits).hi
        if zeta_hi >= 1:
            continue
        theta = zeta_hi / (2 - zeta_hi)
        ok_eta = eps**p.num <= (2 * theta / (1 + theta)) ** (4 * p.den)
        ok_scale = (2 * theta + 3 * eps) ** 4 <= 625 * eps
        if ok_eta and ok_scale:
            return theta
    raise ArithmeticError("could not certify a blocking threshold")


@dataclass(frozen=True, slots=True)
class DecompositionBlock:
    pieces: tuple[GridSeq, ...]  # nonzero parts turned into sequences
    reductions: int
    part_count: int  # r_m = reductions + k, >= len(pieces)
    block_norm_sq: Fraction  # squared row-average seminorm of the block sum


@dataclass(frozen=True, slots=True)
class DecompositionCertificate:
    """Witness that a flat average lies in scale * A, scale <= 5 eps^(1/4)."""

    epsilon: Fraction
    p: LorentzParam
    m_count: int  # M, number of averaged generators
    k: int  # floor(eps M)
    theta: Fraction
    columns: tuple[int, ...]  # active coordinates, increasing
    breakpoints: tuple[int, ...]  # indices into columns
    blocks: tuple[DecompositionBlock, ...]
    scale: Fraction

    def block_columns(self, m: int) -> tuple[int, ...]:
        return self.columns[self.breakpoints[m] : self.breakpoints[m + 1]]

    def block_vector(self, m: int) -> TriVector:
        total = TriVector()
        for piece in self.blocks[m].pieces:
            total = total + piece.indicator()
        return total.scale(Fraction(1, self.m_count))

    def average(self) -> TriVector:
        total = TriVector()
        for m in range(len(self.blocks)):
            total = total + self.block_vector(m)
        return total

    def hull_witness(self, m: int) -> HullCertificate:
        blk = self.blocks[m]
        r = blk.part_count
        return HullCertificate(
            blk.pieces,
            tuple(Fraction(1, r) for _ in blk.pieces),
            Fraction(r, self.m_count),
        )


def decompose_average(
    seqs: Sequence[GridSeq], epsilon: Rational, p: LorentzParam
) -> DecompositionCertificate:
    """Certificate that (1/M) sum indicator(seq) lies in scale * A.

    Requires sup of the average at most eps, i.e. no coordinate active
    in more than floor(eps M) of the sequences.
    """
    eps = Fraction(epsilon)
    if not 0 < eps < 1:
        raise ValueError("need 0 < eps < 1")
    if not seqs:
        raise ValueError("empty family")
    mm = len(seqs)
    k = int(eps * mm)
    degree = disjointness_degree(seqs)
    if degree > k:
        raise ValueError(f"sup of average is {degree}/{mm}, above eps")
    theta = theta_for(eps, p)
    columns = tuple(sorted({i for s in seqs for i in s.active_rows()}))

    # Sorted squared-coefficient matrix: one column per active coordinate,
    # entries the squared coefficients of the sequences active there, in
    # decreasing order with ties by sequence index.  Donors ride along.
    cols: list[tuple[Fraction, ...]] = []
    donors: list[tuple[int, ...]] = []
    for i in columns:
        pairs = sorted(
            ((s.coeff(i) ** 2, q) for q, s in enumerate(seqs) if s.coeff(i)),
            key=lambda t: (-t[0], t[1]),
        )
        cols.append(tuple(v for v, _ in pairs))
        donors.append(tuple(q for _, q in pairs))
    masses = [sum(col, Fraction(0)) for col in cols]
    breaks = column_blocking(masses, theta * mm)

    blocks: list[DecompositionBlock] = []
    for m in range(len(breaks) - 1):
        lo, hi = breaks[m], breaks[m + 1]
        part_res = partition_matrix(cols[lo:hi])
        pieces: list[GridSeq] = []
        for part in part_res.parts:
            counts: dict[int, int] = {}
            for depth, j in part:
                coord = columns[lo + j]
                donor = seqs[donors[lo + j][depth]]
                counts[coord] = donor.m[coord - 1]
            if counts:
                width = max(counts)
                pieces.append(GridSeq(tuple(counts.get(i, 0) for i in range(1, width + 1))))
        r_m = part_res.reductions + k
        if len(pieces) > r_m:
            raise AssertionError("more parts than the guaranteed bound")
        y_m = TriVector()
        for piece in pieces:
            y_m = y_m + piece.indicator()
        y_m = y_m.scale(Fraction(1, mm))
        blocks.append(
            DecompositionBlock(tuple(pieces), part_res.reductions, r_m, row_norm_sq(y_m))
        )

    lorentz_hi = lorentz_value_sq([b.block_norm_sq for b in blocks], p).hi if blocks else Fraction(0)
    scale = max(
        max((Fraction(b.part_count, mm) for b in blocks), default=Fraction(0)),
        lorentz_hi,
    )
    cert = DecompositionCertificate(
        eps, p, mm, k, theta, columns, breaks, tuple(blocks), scale
    )
    problems = verify_decomposition(cert, seqs)
    if problems:
        raise AssertionError("; ".join(problems))
    return cert


def block_conditions_sq(
    values_sq: Sequence[Rational], breakpoints: Sequence[int], p: LorentzParam
) -> bool:
    """Conditions forcing a blocked sequence's weak-Lorentz norm below 2.

    Data arrives squared.  With breakpoints 0 = n_0 < ... < n_K covering
    the sequence, block k+1 must have weak-Lorentz norm at most 1 and
    every entry past n_k must be at most n_k^(-1/p) (vacuous for the
    first block).  Sequences passing both tests satisfy the exact bound
    lorentz_le_sq(values_sq, 4, p).
    """
    squares = [Fraction(v) for v in values_sq]
    if any(v < 0 for v in squares):
        raise ValueError("negative square in data")
    bp = tuple(breakpoints)
    if (
        not bp
        or bp[0] != 0
        or bp[-1] != len(squares)
        or any(a >= b for a, b in zip(bp, bp[1:]))
    ):
        raise ValueError(f"breakpoints {bp} do not segment {len(squares)} entries")
    for k in range(len(bp) - 1):
        block = squares[bp[k] : bp[k + 1]]
        if not lorentz_le_sq(block, 1, p):
            return False
        n_k = bp[k]
        if n_k and any(v**p.num * n_k ** (2 * p.den) > 1 for v in block):
            return False
    return True


def blocking_problems(
    masses: Sequence[Rational],
    breakpoints: Sequence[int],
    theta: Rational,
    epsilon: Rational,
    p: LorentzParam,
    m_count: int,
) -> list[str]:
    """Mass and count conditions a valid column blocking must satisfy."""
    problems: list[str] = []
    masses = [Fraction(v) for v in masses]
    theta = Fraction(theta)
    eps = Fraction(epsilon)
    bp = tuple(breakpoints)
    if not bp or bp[0] != 0 or bp[-1] != len(masses) or list(bp) != sorted(set(bp)):
        return [f"breakpoints {bp} do not segment {len(masses)} columns"]
    count = len(bp) - 1
    for m in range(count):
        mass = sum(masses[bp[m] : bp[m + 1]], Fraction(0))
        if mass > (theta + eps) * m_count:
            problems.append(f"block {m} mass {mass} exceeds (theta+eps)M")
        if m < count - 1 and mass <= theta * m_count:
            problems.append(f"non-final block {m} mass {mass} not above theta*M")
    # count < 2 eps^(-p/4), exactly: count^(4 den) * eps^num < 2^(4 den)
    if count and count ** (4 * p.den) * eps**p.num >= 2 ** (4 * p.den):
        problems.append(f"block count {count} too large for eps")
    return problems


def verify_decomposition(
    cert: DecompositionCertificate, seqs: Sequence[GridSeq]
) -> list[str]:
    """All certificate conditions, recomputed exactly; empty means valid."""
    problems: list[str] = []
    eps, p, mm = cert.epsilon, cert.p, cert.m_count
    if mm != len(seqs):
        return [f"certificate built for {mm} sequences, got {len(seqs)}"]
    if cert.k != int(eps * mm):
        problems.append("stored k is not floor(eps M)")
    if disjointness_degree(seqs) > cert.k:
        problems.append("sup of the average exceeds eps")

    # theta must dominate the true threshold and satisfy the scale bound
    if eps**p.num > (2 * cert.theta / (1 + cert.theta)) ** (4 * p.den):
        problems.append("theta below the blocking threshold")
    if (2 * cert.theta + 3 * eps) ** 4 > 625 * eps:
        problems.append("(2 theta + 3 eps)^4 above 625 eps")

    columns = tuple(sorted({i for s in seqs for i in s.active_rows()}))
    if cert.columns != columns:
        problems.append("stored columns differ from the active coordinates")
        return problems
    masses = [
        sum((s.coeff(i) ** 2 for s in seqs if s.coeff(i)), Fraction(0)) for i in columns
    ]
    problems += blocking_problems(masses, cert.breakpoints, cert.theta, eps, p, mm)
    if len(cert.blocks) != len(cert.breakpoints) - 1:
        problems.append("one block required per breakpoint segment")
    if problems:
        return problems

    bound = (2 * cert.theta + 3 * eps) * mm
    for m, blk in enumerate(cert.blocks):
        cols_m = set(cert.block_columns(m))
        if blk.part_count != blk.reductions + cert.k:
            problems.append(f"block {m}: part count is not reductions + k")
        if len(blk.pieces) > blk.part_count:
            problems.append(f"block {m}: more pieces than parts")
        if blk.part_count > bound:
            problems.append(f"block {m}: part count above (2 theta + 3 eps) M")
        if Fraction(blk.part_count, mm) ** 4 > 625 * eps:
            problems.append(f"block {m}: hull scale above 5 eps^(1/4)")
        for piece in blk.pieces:
            if not set(piece.active_rows()) <= cols_m:
                problems.append(f"block {m}: piece leaves the block columns")
        if row_norm_sq(cert.block_vector(m)) != blk.block_norm_sq:
            problems.append(f"block {m}: stored seminorm square is wrong")
        try:
            cert.hull_witness(m).validate(cert.block_vector(m))
        except AssertionError as exc:
            problems.append(f"block {m}: hull witness invalid ({exc})")

    # Exact reassembly: per coordinate, the nonzero counts of the pieces
    # must be a permutation of the nonzero counts of the input sequences.
    for i in columns:
        want = Counter(s.m[i - 1] for s in seqs if s.coeff(i))
        got = Counter(
            piece.m[i - 1]
            for blk in cert.blocks
            for piece in blk.pieces
            if piece.coeff(i)
        )
        if want != got:
            problems.append(f"coordinate {i}: counts not preserved")

    # Scale: covers every block's hull scale and the Lorentz bound of the
    # block seminorms; the fourth-power test certifies the 2 eps^(1/4)
    # claim, and the scale itself must meet the 5 eps^(1/4) target.
    norms = [blk.block_norm_sq for blk in cert.blocks]
    if not lorentz_le_4th(norms, 16 * eps, p):
        problems.append("block seminorms fail the 16 eps fourth-power test")
    if cert.blocks:
        needed = max(
            max(Fraction(b.part_count, mm) for b in cert.blocks),
            lorentz_value_sq(norms, p).hi,
        )
        if cert.scale < needed:
            problems.append("stored scale below the certified requirement")
    if cert.scale**4 > 625 * eps:
        problems.append("scale above 5 eps^(1/4)")
    return problems


# -- representatives of row-disjoint sums -------------------------------------


@dataclass(frozen=True, slots=True)
class DisjointRep:
    """Representative of a row-disjoint sum of unit-body elements.

    Each piece comes with a hull certificate placing it in scale_i * U;
    the Lorentz bound is on the piece seminorms.  With all scale_i <= 1
    and lorentz_sq_bound <= 1 the summed element lies in A.
    """

    pieces: tuple[TriVector, ...]
    certs: tuple[HullCertificate, ...]
    norms_sq: tuple[Fraction, ...]
    p: LorentzParam
    lorentz_sq_bound: Fraction

    def element(self) -> TriVector:
        total = TriVector()
        for piece in self.pieces:
            total = total + piece
        return total

    @property
    def length(self) -> int:
        return len(self.pieces)

    def max_norm_sq(self) -> Fraction:
        return max(self.norms_sq, default=Fraction(0))

    def max_hull_scale(self) -> Fraction:
        return max((c.scale for c in self.certs), default=Fraction(0))

    def upper_scale(self) -> Fraction:
        """Rational q with element() in q * A (q = gauge upper bound)."""
        if not self.pieces:
            return Fraction(0)
        return max(self.max_hull_scale(), lorentz_value_sq(self.norms_sq, self.p).hi)

    def is_unit_member(self) -> bool:
        return self.max_hull_scale() <= 1 and lorentz_le_sq(self.norms_sq, 1, self.p)


def make_disjoint_rep(
    pieces: Sequence[TriVector],
    p: LorentzParam,
    certs: Sequence[HullCertificate] | None = None,
    lorentz_sq_bound: Rational = 1,
) -> DisjointRep:
    """Validated representative; hull certificates computed when absent."""
    pieces = tuple(pieces)
    if not is_row_disjoint(*pieces):
        raise ValueError("pieces share a row")
    if certs is None:
        built = []
        for piece in pieces:
            cert = hull_member(piece, 1)
            if cert is None:
                raise ValueError("piece outside the unit body")
            built.append(cert)
        certs = tuple(built)
    else:
        certs = tuple(certs)
        if len(certs) != len(pieces):
            raise ValueError("one certificate per piece required")
        for piece, cert in zip(pieces, certs):
            cert.validate(piece)
    norms = tuple(row_norm_sq(piece) for piece in pieces)
    bound = Fraction(lorentz_sq_bound)
    if not lorentz_le_sq(norms, bound, p):
        raise ValueError("piece seminorms break the Lorentz bound")
    return DisjointRep(pieces, certs, norms, p, bound)


def smallness_upper_sq(rep: DisjointRep) -> Fraction:
    """Square of the representative's largest piece seminorm.

    Upper-bounds the square of the minimal sup over all representatives
    of the same element (the representative exhibited is one candidate).
    """
    return rep.max_norm_sq()


@dataclass(frozen=True, slots=True)
class MergeResult:
    """Selected subsequence, its concatenation, and the block structure.

    The concatenated seminorms pass both routes to the gauge-2 claim:
    the block conditions at the recorded breakpoints (each selected
    representative is one block) and the direct weak-Lorentz test with
    squared bound 4.  Halving gives an honest unit member.
    """

    selected: tuple[int, ...]
    merged: DisjointRep
    breakpoints: tuple[int, ...]

    def half_sum(self) -> DisjointRep:
        pieces = tuple(pc.scale(Fraction(1, 2)) for pc in self.merged.pieces)
        certs = tuple(
            HullCertificate(c.seqs, c.weights, c.scale / 2) for c in self.merged.certs
        )
        return make_disjoint_rep(pieces, self.merged.p, certs=certs)


def merge_representatives(reps: Sequence[DisjointRep], p: LorentzParam) -> MergeResult:
    """Greedy subsequence whose concatenation has Lorentz bound 2.

    A candidate is kept when its largest piece seminorm is at most
    L^(-1/p) for L the total length already selected (the first is kept
    unconditionally).  The summed element of the merged representative
    then has gauge at most 2, and the same holds for every prefix of
    the selection.
    """
    reps = tuple(reps)
    if not reps:
        raise ValueError("no representatives")
    if not is_row_disjoint(*(r.element() for r in reps)):
        raise ValueError("representatives share a row")
    for r in reps:
        if not r.pieces:
            raise ValueError("empty representative")
        if not r.is_unit_member():
            raise ValueError("representative is not a unit member")
    selected = []
    length = 0
    for idx, rep in enumerate(reps):
        # max_norm <= length^(-1/p), exactly (max_norm_sq)^num * L^(2 den) <= 1
        if length == 0 or rep.max_norm_sq() ** p.num * length ** (2 * p.den) <= 1:
            selected.append(idx)
            length += rep.length
    pieces: list[TriVector] = []
    certs: list[HullCertificate] = []
    breaks = [0]
    for idx in selected:
        pieces.extend(reps[idx].pieces)
        certs.extend(reps[idx].certs)
        breaks.append(len(pieces))
    norms = [row_norm_sq(pc) for pc in pieces]
    if not block_conditions_sq(norms, breaks, p):
        raise AssertionError("greedy selection broke the block conditions")
    merged = make_disjoint_rep(pieces, p, certs=certs, lorentz_sq_bound=4)
    return MergeResult(tuple(selected), merged, tuple(breaks))


# -- splitting hull elements ----------------------------------------------------


@dataclass(frozen=True, slots=True)
class SplitResult:
    """x = remainder + sum of slices, slices certified small in gauge.

    The remainder keeps one tail representative per input representative,
    all of whose piece seminorm squares pass the smallness test
    (norm_sq)^(4 num) <= eps^den.  Slice t carries its own flat-average
    decomposition certificate over the expanded generator multiset.
    """

    epsilon: Fraction
    p: LorentzParam
    weights: tuple[Fraction, ...]
    orders: tuple[tuple[int, ...], ...]  # per rep: piece order, big first
    front_count: int  # r = floor(eps^(-1/8))
    slices: tuple[TriVector, ...]
    slice_gens: tuple[tuple[GridSeq, ...], ...]
    slice_certs: tuple[DecompositionCertificate, ...]
    tail_reps: tuple[DisjointRep, ...]
    remainder: TriVector
    gauge_bound: Fraction  # sum of slice scales; to the 8th at most 5^8 eps

    def front(self) -> TriVector:
        total = TriVector()
        for s in self.slices:
            total = total + s
        return total


def _exact_combination(cert: HullCertificate, piece: TriVector) -> list[tuple[GridSeq, Fraction]]:
    """Weighted sequences reproducing the piece exactly, or raise."""
    if cert.combination() != piece:
        raise ValueError("piece is not an exact hull combination")
    return [(s, w * cert.scale) for s, w in zip(cert.seqs, cert.weights) if w]


def split_element(
    weights: Sequence[Rational],
    reps: Sequence[DisjointRep],
    epsilon: Rational,
    p: LorentzParam,
) -> SplitResult:
    """Split sum w_l * rep_l into gauge-small front plus seminorm-small tail.

    Requires 0 < eps < 1, convex weights, nonnegative pieces certified as
    exact hull combinations, and sup of the summed element at most eps.
    """
    eps = Fraction(epsilon)
    if not 0 < eps < 1:
        raise ValueError("need 0 < eps < 1")
    alphas = tuple(Fraction(w) for w in weights)
    reps = tuple(reps)
    if len(alphas) != len(reps):
        raise ValueError("one weight per representative")
    if any(a <= 0 for a in alphas) or sum(alphas, Fraction(0)) > 1:
        raise ValueError("weights must be positive with sum at most 1")
    for rep in reps:
        if not rep.is_unit_member():
            raise ValueError("representative is not a unit member")
        for piece in rep.pieces:
            if not piece.is_nonnegative() and not piece.is_zero():
                raise ValueError("pieces must be nonnegative")
    element = TriVector()
    for a, rep in zip(alphas, reps):
        element = element + rep.element().scale(a)
    if element.sup_norm() > eps:
        raise ValueError("sup of the element exceeds eps")

    r = iroot(int(1 / eps), 8)
    # Stable order, big pieces (norm_sq above eps^(1/(4p))) first.
    orders = []
    for rep in reps:
        idx = sorted(range(rep.length), key=lambda i: (-rep.norms_sq[i], i))
        orders.append(tuple(idx))
        for pos, i in enumerate(idx):
            if pos >= r and rep.norms_sq[i] ** (4 * p.num) > eps**p.den:
                raise AssertionError("big piece beyond the front window")

    slices: list[TriVector] = []
    slice_gens: list[tuple[GridSeq, ...]] = []
    slice_certs: list[DecompositionCertificate] = []
    total_scale = Fraction(0)
    for t in range(r):
        terms: dict[GridSeq, Fraction] = {}
        vec = TriVector()
        for a, rep, order in zip(alphas, reps, orders):
            if t >= rep.length:
                continue
            i = order[t]
            vec = vec + rep.pieces[i].scale(a)
            for seq, w in _exact_combination(rep.certs[i], rep.pieces[i]):
                terms[seq] = terms.get(seq, Fraction(0)) + a * w
        if vec.is_zero():
            continue
        q = lcm(*(f.denominator for f in terms.values()))
        gens: list[GridSeq] = []
        for seq, gamma in sorted(terms.items(), key=lambda kv: kv[0].m):
            gens.extend([seq] * int(gamma * q))
        gens.extend([ZERO_SEQ] * (q - len(gens)))
        cert = decompose_average(gens, eps, p)
        if cert.average() != vec:
            raise AssertionError("slice expansion mismatch")
        slices.append(vec)
        slice_gens.append(tuple(gens))
        slice_certs.append(cert)
        total_scale += cert.scale

    tail_reps = []
    remainder = TriVector()
    for a, rep, order in zip(alphas, reps, orders):
        keep = [order[t] for t in range(r, rep.length)]
        tail = make_disjoint_rep(
            [rep.pieces[i] for i in keep],
            p,
            certs=[rep.certs[i] for i in keep],
        )
        tail_reps.append(tail)
        remainder = remainder + tail.element().scale(a)

    result = SplitResult(
        eps,
        p,
        alphas,
        tuple(orders),
        r,
        tuple(slices),
        tuple(slice_gens),
        tuple(slice_certs),
        tuple(tail_reps),
        remainder,
        total_scale,
    )
    problems = verify_split(result, reps)
    if problems:
        raise AssertionError("; ".join(problems))
    return result


def verify_split(result: SplitResult, reps: Sequence[DisjointRep]) -> list[str]:
    """Recheck every split guarantee exactly; empty means valid."""
    problems: list[str] = []
    eps, p = result.epsilon, result.p
    if result.front_count != iroot(int(1 / eps), 8):
        problems.append("front window is not floor(eps^(-1/8))")
    if any(a <= 0 for a in result.weights) or sum(result.weights, Fraction(0)) > 1:
        problems.append("weights are not positive and subconvex")
    element = TriVector()
    for a, rep in zip(result.weights, reps):
        element = element + rep.element().scale(a)
    if element.sup_norm() > eps:
        problems.append("sup of the element exceeds eps")
    recombined = result.remainder
    for s in result.slices:
        recombined = recombined + s
    if recombined != element:
        problems.append("front plus remainder does not reassemble the element")
    for gens, vec, cert in zip(result.slice_gens, result.slices, result.slice_certs):
        if average_indicators(gens) != vec:
            problems.append("slice is not the average of its generators")
        problems += verify_decomposition(cert, gens)
    if result.gauge_bound != sum((c.scale for c in result.slice_certs), Fraction(0)):
        problems.append("gauge bound is not the sum of slice scales")
    if result.gauge_bound**8 > 5**8 * eps:
        problems.append("gauge bound above 5 eps^(1/8)")
    for tail in result.tail_reps:
        if not tail.is_unit_member():
            problems.append("tail representative is not a unit member")
        for ns in tail.norms_sq:
            if ns ** (4 * p.num) > eps**p.den:
                problems.append("tail piece seminorm above eps^(1/(8p))")
    return problems
