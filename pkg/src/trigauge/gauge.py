"""Certified bounds on the gauge of the convex body of disjoint sums.

The gauge of interest is the Minkowski functional of V, the convex hull
of all row-disjoint sums of unit-body elements whose piece seminorms
satisfy the weak-Lorentz constraint.  Computing it exactly is a hard
optimization, so every public answer here is a bound carrying a witness
that re-validates independently:

* upper bounds come as ``GaugeCertificate`` objects exhibiting x inside
  scale * co(A) through explicit representatives;
* lower bounds come as ``GaugeLowerWitness`` objects naming a linear
  functional (a coordinate, the row-average seminorm, or a pairing with
  a unit vector) together with its certified ceiling on the body.

The seminorm and pairing routes divide by the series constant, whose
enclosure's upper end keeps the direction sound.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .core import (
    LorentzParam,
    TriVector,
    l2_norm_sq,
    lorentz_l2_constant,
    lorentz_value_sq,
    row_norm_sq,
    row_pairing,
)
from .decompose import (
    DecompositionCertificate,
    DisjointRep,
    decompose_average,
    make_disjoint_rep,
)
from .exact import Rational, sqrt_enclosure
from .generators import GridSeq, HullCertificate, hull_min_scale

CONSTANT_TERMS = 10**4  # series length; enclosure width stays below 1e-3


@dataclass(frozen=True, slots=True)
class GaugeCertificate:
    """Witness that |x| <= scale * sum w_l * rep_l.element().

    Each representative is a unit member of the disjoint-sum body, the
    weights are positive with sum at most 1, so the combination lies in
    co(A) and solidity places x inside scale * V.
    """

    weights: tuple[Fraction, ...]
    reps: tuple[DisjointRep, ...]
    scale: Fraction

    def combination(self) -> TriVector:
        total = TriVector()
        for w, rep in zip(self.weights, self.reps):
            total = total + rep.element().scale(w * self.scale)
        return total

    def rescale(self, factor: Rational) -> "GaugeCertificate":
        """Certificate for factor * x from one for x; exact, no search."""
        f = Fraction(factor)
        if f < 0:
            raise ValueError("negative factor")
        return GaugeCertificate(self.weights, self.reps, self.scale * f)

    def validate(self, x: TriVector) -> None:
        if len(self.weights) != len(self.reps):
            raise AssertionError("length mismatch")
        if any(w <= 0 for w in self.weights):
            raise AssertionError("weights must be positive")
        if sum(self.weights, Fraction(0)) > 1:
            raise AssertionError("weights exceed 1")
        if self.scale < 0:
            raise AssertionError("negative scale")
        for rep in self.reps:
            if not rep.is_unit_member():
                raise AssertionError("representative is not a unit member")
        if not self.combination().dominates(abs(x)):
            raise AssertionError("combination does not dominate |x|")


def _rescaled_hull_cert(cert: HullCertificate, factor: Rational) -> HullCertificate:
    return HullCertificate(cert.seqs, cert.weights, cert.scale * Fraction(factor))


def _single_rep_certificate(
    pieces: Sequence[TriVector],
    certs: Sequence[HullCertificate],
    scale: Fraction,
    p: LorentzParam,
) -> GaugeCertificate:
    """Certificate from row-disjoint pieces with piece_l in certs[l].scale * U.

    The bound is scale = max(hull scales, Lorentz value of the piece
    seminorms); dividing everything by it yields one honest unit member.
    """
    if scale <= 0:
        raise ValueError("positive scale required")
    inv = 1 / scale
    rep = make_disjoint_rep(
        [piece.scale(inv) for piece in pieces],
        p,
        certs=[_rescaled_hull_cert(c, inv) for c in certs],
    )
    return GaugeCertificate((Fraction(1),), (rep,), scale)


def _set_partitions(items: Sequence[int]) -> Iterator[tuple[tuple[int, ...], ...]]:
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for sub in _set_partitions(rest):
        yield ((first,),) + sub
        for idx, group in enumerate(sub):
            yield sub[:idx] + ((first,) + group,) + sub[idx + 1 :]


def _row_sup(x: TriVector, i: int) -> Fraction:
    return max((abs(v) for v in x.row_entries(i).values()), default=Fraction(0))


def _full_row_cert(x_abs: TriVector, i: int) -> tuple[HullCertificate, Fraction]:
    """Single-row piece certificate: sup * (full row) dominates the row."""
    sup = _row_sup(x_abs, i)
    seq = GridSeq.make(0 if r != i else i for r in range(1, i + 1))
    return HullCertificate((seq,), (Fraction(1),), sup), sup


def gauge_upper(
    x: TriVector,
    p: LorentzParam,
    *,
    max_partition_rows: int = 5,
    limit: int | None = 200_000,
) -> GaugeCertificate:
    """Best certified upper bound over three search strategies.

    Tries the whole support as one hull piece, every partition of the
    active rows into hull pieces (small supports only), and the per-row
    split whose hull scales are plain row suprema.  All three produce
    valid certificates; the smallest scale wins.  The bound is never
    claimed minimal.
    """
    target = abs(x)
    if target.is_zero():
        return GaugeCertificate((), (), Fraction(0))
    rows = target.active_rows()
    candidates: list[GaugeCertificate] = []

    # per-row split: no enumeration, always available
    row_pieces = [target.restrict_rows([i]) for i in rows]
    row_certs, sups = zip(*(_full_row_cert(target, i) for i in rows))
    norms = [row_norm_sq(piece) for piece in row_pieces]
    scale = max(max(sups), lorentz_value_sq(norms, p).hi)
    candidates.append(_single_rep_certificate(row_pieces, row_certs, scale, p))

    if len(rows) <= max_partition_rows:
        for partition in _set_partitions(rows):
            if len(partition) == len(rows):
                continue  # the singleton partition is the per-row split
            try:
                pieces, certs, lams = [], [], []
                for group in partition:
                    piece = target.restrict_rows(group)
                    lam, cert = hull_min_scale(piece, limit=limit)
                    pieces.append(piece)
                    certs.append(cert)
                    lams.append(lam)
            except RuntimeError:
                continue  # enumeration too large for this grouping
            norms = [row_norm_sq(piece) for piece in pieces]
            scale = max(max(lams), lorentz_value_sq(norms, p).hi)
            candidates.append(_single_rep_certificate(pieces, certs, scale, p))
    else:
        try:
            lam, cert = hull_min_scale(target, limit=limit)
            candidates.append(_single_rep_certificate([target], [cert], lam, p))
        except RuntimeError:
            pass

    best = min(candidates, key=lambda c: c.scale)
    best.validate(x)
    return best


def gauge_upper_from_average(
    seqs: Sequence[GridSeq], epsilon: Rational, p: LorentzParam
) -> tuple[GaugeCertificate, DecompositionCertificate]:
    """Upper bound for a flat average with small sup, via its decomposition.

    The returned scale is at most 5 eps^(1/4); the decomposition
    certificate carries the construction for independent re-checking.
    """
    dec = decompose_average(seqs, epsilon, p)
    if not dec.blocks or dec.scale == 0:
        return GaugeCertificate((), (), Fraction(0)), dec
    inv = 1 / dec.scale
    pieces = [dec.block_vector(m).scale(inv) for m in range(len(dec.blocks))]
    certs = [_rescaled_hull_cert(dec.hull_witness(m), inv) for m in range(len(dec.blocks))]
    rep = make_disjoint_rep(pieces, p, certs=certs)
    cert = GaugeCertificate((Fraction(1),), (rep,), dec.scale)
    cert.validate(dec.average())
    return cert, dec


@dataclass(frozen=True, slots=True)
class GaugeLowerWitness:
    """A functional bounded on the body, evaluated at x.

    kind 'sup': coordinate functional at detail = (i, j); every body
    element stays within [-1, 1] there.  kind 'seminorm': the row-average
    seminorm over its body ceiling (the series constant's upper end).
    kind 'pairing': inner product of the row averages with the unit
    vector in detail, over the same ceiling.  kind 'dual': a nonnegative
    cell functional, detail = (cells, weights), whose ceiling the micro
    enclosure certified over the body.
    """

    value: Fraction
    kind: str
    detail: tuple
    ceiling: Fraction  # certified bound of the functional on the body

    def validate(self, x: TriVector) -> None:
        if self.value < 0 or self.ceiling <= 0:
            raise AssertionError("witness values must be nonnegative")
        if self.kind == "sup":
            i, j = self.detail
            if self.ceiling != 1 or abs(x.entry(i, j)) < self.value * self.ceiling:
                raise AssertionError("coordinate witness does not reach its value")
        elif self.kind == "seminorm":
            if (self.value * self.ceiling) ** 2 > row_norm_sq(x):
                raise AssertionError("seminorm witness does not reach its value")
        elif self.kind == "pairing":
            b = self.detail
            if l2_norm_sq(b) != 1:
                raise AssertionError("pairing direction is not a unit vector")
            if abs(row_pairing(x, b)) < self.value * self.ceiling:
                raise AssertionError("pairing witness does not reach its value")
        elif self.kind == "dual":
            cells, weights = self.detail
            if len(cells) != len(weights) or any(Fraction(w) < 0 for w in weights):
                raise AssertionError("dual weights must be nonnegative")
            paired = sum(
                (Fraction(w) * abs(x.entry(i, j)) for (i, j), w in zip(cells, weights)),
                Fraction(0),
            )
            if paired < self.value * self.ceiling:
                raise AssertionError("dual witness does not reach its value")
        else:
            raise AssertionError(f"unknown witness kind {self.kind!r}")

    def rescale(self, factor: Rational) -> "GaugeLowerWitness":
        """Witness for factor * x from one for x; the functional is reused."""
        f = Fraction(factor)
        if f < 0:
            raise ValueError("negative factor")
        return GaugeLowerWitness(self.value * f, self.kind, self.detail, self.ceiling)


def gauge_lower(
    x: TriVector,
    p: LorentzParam,
    *,
    directions: Iterable[Sequence[Rational]] = (),
    constant_terms: int = CONSTANT_TERMS,
) -> GaugeLowerWitness:
    """Best lower bound among the coordinate, seminorm, and pairing routes.

    Directions must be exact unit vectors in the squared-sum sense; each
    contributes |<row averages, b>| / C_hi.  The seminorm route divides
    the lower end of the seminorm enclosure by the same constant.
    """
    if x.is_zero():
        return GaugeLowerWitness(Fraction(0), "sup", (1, 1), Fraction(1))
    best: GaugeLowerWitness | None = None

    def push(w: GaugeLowerWitness) -> None:
        nonlocal best
        if best is None or w.value > best.value:
            best = w

    cell, value = max(x.items(), key=lambda kv: (abs(kv[1]), kv[0]))
    push(GaugeLowerWitness(abs(value), "sup", cell, Fraction(1)))

    c_hi = lorentz_l2_constant(p, constant_terms).hi
    push(
        GaugeLowerWitness(
            sqrt_enclosure(row_norm_sq(x)).lo / c_hi, "seminorm", (), c_hi
        )
    )
    for b in directions:
        b = tuple(Fraction(v) for v in b)
        if l2_norm_sq(b) != 1:
            raise ValueError("pairing directions must have unit squared sum")
        push(GaugeLowerWitness(abs(row_pairing(x, b)) / c_hi, "pairing", b, c_hi))
    assert best is not None
    best.validate(x)
    return best


@dataclass(frozen=True, slots=True)
class GaugeInterval:
    lower: GaugeLowerWitness
    upper: GaugeCertificate

    @property
    def lo(self) -> Fraction:
        return self.lower.value

    @property
    def hi(self) -> Fraction:
        return self.upper.scale


def gauge_interval(
    x: TriVector,
    p: LorentzParam,
    *,
    directions: Iterable[Sequence[Rational]] = (),
    max_partition_rows: int = 5,
) -> GaugeInterval:
    """Two-sided certified bounds; lo <= hi holds because both are sound."""
    lower = gauge_lower(x, p, directions=directions)
    upper = gauge_upper(x, p, max_partition_rows=max_partition_rows)
    if lower.value > upper.scale:
        raise AssertionError("certified bounds crossed; this is a bug")
    return GaugeInterval(lower, upper)


def element_smallness_sq(reps: Sequence[DisjointRep]) -> Fraction:
    """Squared upper bound for the element's smallness functional.

    All representatives must present the same element; the bound is the
    best (smallest) max piece seminorm square among them.  The true
    functional minimizes over all representatives, so this is an upper
    bound computed from the supplied ones.
    """
    reps = tuple(reps)
    if not reps:
        raise ValueError("no representatives")
    element = reps[0].element()
    for rep in reps[1:]:
        if rep.element() != element:
            raise ValueError("representatives disagree on the element")
    return min(rep.max_norm_sq() for rep in reps)


# -- quotient pairing witnesses --------------------------------------------------


@dataclass(frozen=True, slots=True)
class PairingWitness:
    """Body element y with <row averages of y, b> = pairing.

    branch 1 works off a dominant head coordinate, branch 2 off the
    floor counts of the tail; the certificate places y in 1 * V.
    """

    vector: TriVector
    pairing: Fraction
    branch: int
    certificate: GaugeCertificate

    def validate(self, b: Sequence[Rational]) -> None:
        if row_pairing(self.vector, b) != self.pairing:
            raise AssertionError("stored pairing does not match the vector")
        self.certificate.validate(self.vector)


def pairing_witness(b: Sequence[Rational], p: LorentzParam) -> PairingWitness:
    """Body element pairing well against the unit vector b.

    Requires sum b_i^2 = 1 exactly.  When the first four coordinates
    carry squared mass at least 5/9, the witness is the densest of those
    rows under the sign of its coefficient (branch 1, pairing equal to
    that coefficient's absolute value, at least sqrt(5)/6).  Otherwise
    the tail rows i >= 5 receive floor(i |b_i|) cells each under their
    signs (branch 2).
    """
    b = tuple(Fraction(v) for v in b)
    if l2_norm_sq(b) != 1:
        raise ValueError("need an exactly unit vector")
    head = b[:4]
    if sum((v**2 for v in head), Fraction(0)) >= Fraction(5, 9):
        i0 = max(range(len(head)), key=lambda i: (abs(head[i]), -i)) + 1
        sign = 1 if b[i0 - 1] > 0 else -1
        seq = GridSeq.make(0 if r != i0 else i0 for r in range(1, i0 + 1))
        vector = seq.indicator().scale(sign)
        branch = 1
    else:
        counts = [0] * len(b)
        for i in range(5, len(b) + 1):
            counts[i - 1] = int(i * abs(b[i - 1]))
        seq = GridSeq.make(counts)
        entries = {}
        for i in seq.active_rows():
            sign = 1 if b[i - 1] > 0 else -1
            for j in range(1, seq.m[i - 1] + 1):
                entries[(i, j)] = Fraction(sign)
        vector = TriVector(entries)
        branch = 2
    # the certificate covers |y|; solidity carries the signed vector into V
    rep = make_disjoint_rep(
        [seq.indicator()],
        p,
        certs=[HullCertificate((seq,), (Fraction(1),), Fraction(1))],
    )
    cert = GaugeCertificate((Fraction(1),), (rep,), Fraction(1))
    witness = PairingWitness(vector, row_pairing(vector, b), branch, cert)
    witness.validate(b)
    return witness
