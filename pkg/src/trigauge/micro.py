"""Tight gauge enclosures on supports within the first three rows.

The general bounds in gauge.py can leave a wide gap: the upper
certificate tries a fixed list of splitting strategies and the lower
witnesses are three fixed functionals.  On a support confined to rows
1..3 the relevant part of the body is small enough to squeeze from both
sides until the enclosure passes a tolerance.

Upper side.  Any nonnegative weights nu with sum_r nu_r * a_r >= |x|
over validated unit members a_r certify gauge(x) <= sum(nu); by
solidity the signed x is covered too.  The members are built from
budget-trimmed generator mixtures, one piece per group of a row
partition, and the best cover is an exact linear program.

Lower side.  For a cell functional y >= 0 and a rational ceiling H
with <y, a> <= H for every unit member a, a cover of |x| at scale t
gives <y, |x|> <= t * H, hence gauge(x) >= <y, |x|> / H.  A member
restricted to the support cells is still a member, so H only has to
dominate families living on the support rows: the ceiling is the
maximum over partition/rank patterns of per-group bounds, each the
minimum of a hull maximum (budget ignored) and capped Cauchy-Schwarz
routes through the seminorm ball (hull cap ignored).  The linear
program's duals are natural candidates for y.

Both sides use the safe end of every irrational budget, so the interval
is sound for any input; when the configured refinement rounds cannot
close the gap the best enclosure is raised inside a dedicated error
rather than silently widened.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Mapping, Sequence

from .core import DEFAULT_P, LorentzParam, Rational, TriVector, row_norm_sq
from .decompose import DisjointRep, make_disjoint_rep
from .exact import Interval, pow_enclosure, sqrt_enclosure
from .gauge import (
    GaugeCertificate,
    GaugeInterval,
    GaugeLowerWitness,
    _set_partitions,
    gauge_interval,
)
from .generators import GridSeq, HullCertificate, enumerate_grid_seqs
from .lp import solve_lp

SUPPORT_ROW_CAP = 3
DEFAULT_TOL = Fraction(1, 1000)
DEFAULT_BITS = 96

Cell = tuple[int, int]


class ToleranceUnreachableError(RuntimeError):
    """The refinement rounds ran out before the enclosure met the tolerance.

    Carries a valid (just too wide) interval and the round count, so the
    caller sees the best certified result instead of a widened answer.
    """

    def __init__(self, interval: GaugeInterval, rounds: int, tol: Fraction):
        self.interval = interval
        self.rounds = rounds
        self.tol = tol
        width = interval.hi - interval.lo
        super().__init__(
            f"enclosure width {float(width):.3g} exceeds tolerance "
            f"{float(tol):.3g} after {rounds} refinement rounds"
        )


@lru_cache(maxsize=None)
def _patterns(rows: tuple[int, ...]) -> tuple[tuple[tuple[tuple[int, ...], int], ...], ...]:
    """Every (partition of rows, budget rank per group) combination.

    A unit member restricted to these rows has at most len(rows)
    row-disjoint pieces, and sorting them by seminorm matches each piece
    with a rank; padding with empty pieces shows every member is covered
    by some pattern here.
    """
    out = []
    for groups in _set_partitions(rows):
        for ranks in itertools.permutations(range(1, len(groups) + 1)):
            out.append(tuple(zip(groups, ranks)))
    return tuple(out)


@lru_cache(maxsize=None)
def _gens_on(group: tuple[int, ...]) -> tuple[GridSeq, ...]:
    """Nonzero generator sequences supported within the given rows."""
    keep = set(group)
    return tuple(
        seq
        for seq in enumerate_grid_seqs(max(keep))
        if seq.m and set(seq.active_rows()) <= keep
    )


@lru_cache(maxsize=None)
def _budget(rank: int, num: int, den: int, bits: int) -> Interval:
    """Enclosure of the rank-th piece budget rank^(-1/p)."""
    if rank == 1:
        return Interval.point(Fraction(1))
    return pow_enclosure(Fraction(1, rank), den, num, bits)


@lru_cache(maxsize=None)
def _budget_sq(rank: int, num: int, den: int, bits: int) -> Interval:
    if rank == 1:
        return Interval.point(Fraction(1))
    g = gcd(2 * den, num)
    return pow_enclosure(Fraction(1, rank), 2 * den // g, num // g, bits)


def _restrict_cells(x: TriVector, cells: frozenset[Cell]) -> TriVector:
    return TriVector({c: v for c, v in x.items() if c in cells})


def _floor_frac(x: Fraction, den: int = 10**12) -> Fraction:
    """Round down to a bounded denominator; keeps trims on the safe side
    without dragging 2^-bits tails through the covering program."""
    return Fraction(int(x * den), den)


def _ceiling(
    y: Mapping[Cell, Fraction], rows: tuple[int, ...], p: LorentzParam, bits: int
) -> Fraction:
    """Certified upper bound for <y, a> over unit members on the rows."""
    key_cache: dict[tuple[tuple[int, ...], int], Fraction] = {}

    def key_bound(group: tuple[int, ...], rank: int) -> Fraction:
        cached = key_cache.get((group, rank))
        if cached is not None:
            return cached
        cells = [c for c in y if c[0] in group and y[c] > 0]
        if not cells:
            key_cache[group, rank] = Fraction(0)
            return Fraction(0)
        hull = Fraction(0)
        for seq in _gens_on(group):
            m = seq.m
            val = sum(
                (y[c] for c in cells if c[0] <= len(m) and c[1] <= m[c[0] - 1]),
                Fraction(0),
            )
            hull = max(hull, val)
        # Pieces stay within [0, 1] per cell, so a row contributes at most
        # its y mass; through the seminorm ball it contributes at most
        # beta * i * max(y on the row).  Minimize over which rows take
        # the mass route.
        row_mass: dict[int, Fraction] = {}
        row_peak: dict[int, Fraction] = {}
        for (i, _), w in ((c, y[c]) for c in cells):
            row_mass[i] = row_mass.get(i, Fraction(0)) + w
            row_peak[i] = max(row_peak.get(i, Fraction(0)), w)
        beta_hi = _budget(rank, p.num, p.den, bits).hi
        active = sorted(row_mass)
        capped = None
        for size in range(len(active) + 1):
            for taken in itertools.combinations(active, size):
                rest_sq = sum(
                    ((i * row_peak[i]) ** 2 for i in active if i not in taken),
                    Fraction(0),
                )
                val = sum((row_mass[i] for i in taken), Fraction(0))
                if rest_sq:
                    val += beta_hi * sqrt_enclosure(rest_sq, bits).hi
                if capped is None or val < capped:
                    capped = val
        bound = min(hull, capped)
        key_cache[group, rank] = bound
        return bound

    best = Fraction(0)
    for pattern in _patterns(rows):
        total = sum((key_bound(group, rank) for group, rank in pattern), Fraction(0))
        best = max(best, total)
    return best


def _ceiling_float(y: Mapping[Cell, float], rows: tuple[int, ...], p: LorentzParam) -> float:
    """Float twin of _ceiling, for steering the dual search only."""
    inv_p = p.den / p.num
    best = 0.0
    for pattern in _patterns(rows):
        total = 0.0
        for group, rank in pattern:
            cells = [c for c in y if c[0] in group and y[c] > 0]
            if not cells:
                continue
            hull = 0.0
            for seq in _gens_on(group):
                m = seq.m
                hull = max(
                    hull,
                    sum(y[c] for c in cells if c[0] <= len(m) and c[1] <= m[c[0] - 1]),
                )
            mass: dict[int, float] = {}
            peak: dict[int, float] = {}
            for c in cells:
                i = c[0]
                mass[i] = mass.get(i, 0.0) + y[c]
                peak[i] = max(peak.get(i, 0.0), y[c])
            beta = rank ** -inv_p
            active = sorted(mass)
            capped = min(
                sum(mass[i] for i in taken)
                + beta
                * sum((i * peak[i]) ** 2 for i in active if i not in taken) ** 0.5
                for size in range(len(active) + 1)
                for taken in itertools.combinations(active, size)
            )
            total += min(hull, capped)
        best = max(best, total)
    return best


def _ascend_dual(
    start: Mapping[Cell, Fraction],
    target: Mapping[Cell, Fraction],
    rows: tuple[int, ...],
    p: LorentzParam,
    sweeps: int,
) -> dict[Cell, float]:
    """Coordinate search improving <y, target> / ceiling(y) in floats.

    The result is only a candidate; the caller re-certifies it exactly.
    Zero coordinates get a kick-start value so the search can leave the
    degenerate duals the covering program tends to produce, and the step
    grid shrinks once coarse moves stop helping, since the ceiling is
    piecewise and its maxima sit at kinks.
    """
    cells = tuple(sorted(target))
    floor = max(float(v) for v in target.values()) * 1e-3
    y = {c: max(float(start.get(c, 0)), floor) for c in cells}

    def ratio(cand: Mapping[Cell, float]) -> float:
        ceiling = _ceiling_float(cand, rows, p)
        if ceiling <= 0:
            return 0.0
        return sum(cand[c] * float(target[c]) for c in cells) / ceiling

    best = ratio(y)
    for delta in (1.0, 0.25, 0.05, 0.01, 0.002, 0.0004, 0.00008):
        steps = (1.0 + delta, 1.0 / (1.0 + delta))
        for _ in range(sweeps):
            improved = False
            for c in cells:
                for step in steps:
                    trial = dict(y)
                    trial[c] = y[c] * step
                    val = ratio(trial)
                    if val > best * (1 + 1e-12):
                        y, best, improved = trial, val, True
            if not improved:
                break
    return y


def _snapped(y: Mapping[Cell, float]) -> list[dict[Cell, Fraction]]:
    """Rational candidates for a float dual: exact kinks have small
    denominators, so snap coarsely first and keep a fine fallback."""
    out = []
    for den in (6, 12, 60, 10**6):
        out.append({c: Fraction(v).limit_denominator(den) for c, v in y.items()})
    return out


def _solve_square(mat: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Unique solution of a small rational linear system, or None."""
    n = len(mat)
    aug = [list(row) + [rhs[i]] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


def _row_uniform_candidates(
    atoms: Sequence[DisjointRep],
    weights: Sequence[Fraction],
    rows: tuple[int, ...],
    cells: tuple[Cell, ...],
) -> list[dict[Cell, Fraction]]:
    """Duals constant along each row, equalizing binding cover members.

    At a covering optimum the used members are tight for the optimal
    dual; one value per row turns that into a square rational system
    over combinations of used members.  Only nonnegative solutions are
    candidates.
    """
    active = [rep for rep, w in zip(atoms, weights) if w > 0]
    k = len(rows)
    if len(active) < k:
        return []
    masses = []
    for rep in active:
        elem = rep.element()
        masses.append(
            [sum(elem.row_entries(i).values(), Fraction(0)) for i in rows]
        )
    out = []
    for combo in itertools.islice(itertools.combinations(range(len(active)), k), 20):
        sol = _solve_square([masses[i] for i in combo], [Fraction(1)] * k)
        if sol is not None and all(u >= 0 for u in sol):
            by_row = dict(zip(rows, sol))
            out.append({c: by_row[c[0]] for c in cells if by_row[c[0]] > 0})
    return out


def _trimmed_pieces(
    group: tuple[int, ...],
    rank: int,
    p: LorentzParam,
    bits: int,
    support: frozenset[Cell],
    round_: int,
) -> list[tuple[TriVector, HullCertificate]]:
    """Candidate pieces for one pattern slot, scaled into the rank budget.

    Round 0 scales single generators; later rounds add generator
    mixtures on a weight grid.  Every piece keeps a hull certificate at
    the scale actually used, so the assembled member validates exactly.
    """
    budget_lo = _budget_sq(rank, p.num, p.den, bits).lo
    gens = [
        (seq, _restrict_cells(seq.indicator(), support)) for seq in _gens_on(group)
    ]
    gens = [(seq, piece) for seq, piece in gens if not piece.is_zero()]
    out: list[tuple[TriVector, HullCertificate]] = []

    def push(seqs: tuple[GridSeq, ...], weights: tuple[Fraction, ...], mix: TriVector) -> None:
        nsq = row_norm_sq(mix)
        if nsq <= budget_lo:
            gamma = Fraction(1)
        else:
            gamma = _floor_frac(sqrt_enclosure(budget_lo / nsq, bits).lo)
            if gamma <= 0:
                return
            mix = mix.scale(gamma)
        out.append((mix, HullCertificate(seqs, weights, gamma)))

    for seq, piece in gens:
        push((seq,), (Fraction(1),), piece)
    if round_ >= 1:
        grid = (
            [Fraction(1, 2), Fraction(1, 4), Fraction(3, 4)]
            if round_ == 1
            else [Fraction(k, 8) for k in range(1, 8)]
        )
        for (sa, pa), (sb, pb) in itertools.combinations(gens, 2):
            for w in grid:
                push((sa, sb), (w, 1 - w), pa.scale(w) + pb.scale(1 - w))
    if round_ >= 2:
        thirds = (Fraction(1, 3), Fraction(1, 3), Fraction(1, 3))
        for combo in itertools.combinations(gens, 3):
            mix = TriVector()
            for w, (_, piece) in zip(thirds, combo):
                mix = mix + piece.scale(w)
            push(tuple(seq for seq, _ in combo), thirds, mix)
    return out


def _pattern_atoms(
    rows: tuple[int, ...],
    p: LorentzParam,
    bits: int,
    support: frozenset[Cell],
    round_: int,
    known: set[tuple],
) -> list[DisjointRep]:
    """Unit members assembled from per-slot pieces, deduplicated by element.

    Elements already in `known` (earlier rounds) are skipped before the
    validation work, since later rounds regenerate the earlier grids.
    """
    seen: dict[tuple, DisjointRep] = {}
    slot_cache: dict[tuple, list] = {}
    for pattern in _patterns(rows):
        slots = []
        for group, rank in pattern:
            cached = slot_cache.get((group, rank))
            if cached is None:
                cached = _trimmed_pieces(group, rank, p, bits, support, round_)
                slot_cache[group, rank] = cached
            if cached:
                slots.append(cached)
        if not slots:
            continue
        for combo in itertools.product(*slots):
            total = TriVector()
            for piece, _ in combo:
                total = total + piece
            key = tuple(total.items())
            if key in seen or key in known:
                continue
            seen[key] = make_disjoint_rep(
                [piece for piece, _ in combo], p, certs=[cert for _, cert in combo]
            )
    return list(seen.values())


def _cover_program(
    atoms: Sequence[DisjointRep], cells: tuple[Cell, ...], target: Mapping[Cell, Fraction]
) -> tuple[Fraction, tuple[Fraction, ...], dict[Cell, Fraction]]:
    """Exact minimal-weight cover of the target by the pooled members."""
    columns = [atom.element() for atom in atoms]
    rows = [[col.entry(*cell) for col in columns] for cell in cells]
    rhs = [target[cell] for cell in cells]
    res = solve_lp([Fraction(1)] * len(atoms), rows, rhs)
    if res.status != "optimal":
        raise AssertionError(f"cover program came back {res.status}")
    duals = {
        cell: max(d, Fraction(0)) for cell, d in zip(cells, res.duals or ())
    }
    return res.objective, res.x, duals


def _dual_witness(
    y: Mapping[Cell, Fraction],
    x_abs: TriVector,
    rows: tuple[int, ...],
    p: LorentzParam,
    bits: int,
) -> GaugeLowerWitness | None:
    y = {c: Fraction(v) for c, v in y.items() if Fraction(v) > 0}
    if not y:
        return None
    ceiling = _ceiling(y, rows, p, bits)
    if ceiling <= 0:
        return None
    paired = sum((w * x_abs.entry(*c) for c, w in y.items()), Fraction(0))
    cells = tuple(sorted(y))
    return GaugeLowerWitness(
        paired / ceiling, "dual", (cells, tuple(y[c] for c in cells)), ceiling
    )


def tau_micro_oracle(
    x: TriVector,
    p: LorentzParam = DEFAULT_P,
    tol: Rational = DEFAULT_TOL,
    *,
    bits: int = DEFAULT_BITS,
    max_rounds: int = 3,
) -> GaugeInterval:
    """Enclose the gauge of x to width tol; support must stay in rows 1..3.

    Starts from the general certificates and, while the gap is too wide,
    alternates an exact covering program over a growing pool of unit
    members (upper) with certified dual functionals seeded by the
    program's own duals (lower).  Raises ValueError for wide supports
    and ToleranceUnreachableError when the rounds run out; the error
    carries the best certified interval.
    """
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    active = x.active_rows()
    if active and max(active) > SUPPORT_ROW_CAP:
        raise ValueError(
            f"support reaches row {max(active)}; the enclosure handles rows 1..{SUPPORT_ROW_CAP}"
        )
    best = gauge_interval(x, p)
    if best.hi - best.lo <= tol:
        return best

    x_abs = abs(x)
    support = frozenset(x_abs.support())
    cells = tuple(sorted(support))
    target = {cell: x_abs.entry(*cell) for cell in cells}
    pool: dict[tuple, DisjointRep] = {}

    def add_atom(rep: DisjointRep) -> None:
        key = tuple(rep.element().items())
        pool.setdefault(key, rep)

    for rep in best.upper.reps:
        add_atom(rep)

    lower = best.lower
    upper = best.upper
    rounds = 0
    for round_ in range(max_rounds):
        rounds = round_ + 1
        for rep in _pattern_atoms(active, p, bits, support, round_, set(pool)):
            add_atom(rep)
        atoms = list(pool.values())
        objective, weights, duals = _cover_program(atoms, cells, target)
        if objective < upper.scale:
            kept = [(w, rep) for w, rep in zip(weights, atoms) if w > 0]
            upper = GaugeCertificate(
                tuple(w / objective for w, _ in kept),
                tuple(rep for _, rep in kept),
                objective,
            )
            upper.validate(x)
        sweeps = 20 * (round_ + 1)
        candidates = _row_uniform_candidates(atoms, weights, active, cells)
        candidates += [duals, target]
        for start in (duals, target):
            candidates.extend(_snapped(_ascend_dual(start, target, active, p, sweeps)))
        for y in candidates:
            witness = _dual_witness(y, x_abs, active, p, bits)
            if witness is not None and witness.value > lower.value:
                witness.validate(x)
                lower = witness
        if upper.scale - lower.value <= tol:
            break
    interval = GaugeInterval(lower, upper)
    if interval.lo > interval.hi:
        raise AssertionError("certified bounds crossed; this is a bug")
    if interval.hi - interval.lo > tol:
        raise ToleranceUnreachableError(interval, rounds, tol)
    return interval
