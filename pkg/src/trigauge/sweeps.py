"""Seeded property sweeps, one per acceptance target.

Each suite draws its instances from a per-trial generator seeded by
(suite, seed, trial), so any single trial can be regenerated without
running the others.  A trial that throws becomes a failure transcript
instead of aborting the sweep; the report then fails as a whole.
"""

from __future__ import annotations

import hashlib
import random
from fractions import Fraction
from math import ceil
from typing import Any, Callable

from . import instances as inst
from .core import (
    TriVector,
    l2_norm_sq,
    lorentz_l2_constant,
    lorentz_le_sq,
    row_norm_sq,
    row_pairing,
)
from .decompose import (
    block_conditions_sq,
    make_disjoint_rep,
    decompose_average,
    merge_representatives,
    partition_matrix,
    select_subset,
    split_element,
    verify_decomposition,
    verify_split,
)
from .gauge import gauge_interval, pairing_witness
from .generators import (
    HullCertificate,
    average_indicators,
    disjointness_degree,
    seq_file_text,
)
from .micro import tau_micro_oracle
from .report import Report, SweepConfig, jsonable, make_record

TrialFn = Callable[[random.Random, int, SweepConfig], tuple[bool, dict, str | None]]

EPS_SMALL = (Fraction(1, 4), Fraction(1, 16), Fraction(1, 64))
EPS_MAIN = (Fraction(1, 4), Fraction(1, 16))


def trial_rng(suite: str, seed: int, trial: int | str) -> random.Random:
    digest = hashlib.sha256(f"{suite}:{seed}:{trial}".encode()).digest()
    return random.Random(int.from_bytes(digest, "big"))


def _execute(cfg: SweepConfig, trial_fn: TrialFn) -> tuple[list, list, list]:
    records, failures, details = [], [], []
    for t in range(cfg.trials):
        rng = trial_rng(cfg.suite, cfg.seed, t)
        try:
            ok, detail, text = trial_fn(rng, t, cfg)
        except Exception as exc:
            ok, detail, text = False, {"error": repr(exc)}, None
        records.append(make_record(t, ok, detail))
        details.append(detail)
        if not ok:
            failures.append(
                {
                    "trial": t,
                    "error": detail.get("error", "property violated"),
                    "detail": jsonable(detail),
                    "instance": text,
                }
            )
    return records, failures, details


def _eps_for(cfg: SweepConfig, trial: int, cycle: tuple[Fraction, ...]) -> Fraction:
    return cfg.epsilon if cfg.epsilon is not None else cycle[trial % len(cycle)]


def _require_generator_cap(cfg: SweepConfig, cycle: tuple[Fraction, ...]) -> None:
    for eps in (cfg.epsilon,) if cfg.epsilon is not None else cycle:
        if ceil(1 / eps) > cfg.max_m:
            raise ValueError(f"max_m={cfg.max_m} cannot host epsilon={eps} families")


# -- subset selection ----------------------------------------------------------


def _select_check(values: list[Fraction]) -> tuple[bool, dict]:
    idx = select_subset(values)
    total = sum((values[i] for i in idx), Fraction(0))
    ok = Fraction(1, 2) <= total <= 1 and len(set(idx)) == len(idx)
    return ok, {"length": len(values), "chosen": len(idx), "sum": total}


def _brute_feasible(values: list[Fraction]) -> bool:
    for mask in range(1, 1 << len(values)):
        total = Fraction(0)
        for i in range(len(values)):
            if mask >> i & 1:
                total += values[i]
                if total > 1:
                    break
        if Fraction(1, 2) <= total <= 1:
            return True
    return False


def _select_trial(rng: random.Random, trial: int, cfg: SweepConfig):
    values = inst.subset_values(rng, max_len=64)
    ok, detail = _select_check(values)
    return ok, detail, " ".join(str(v) for v in values)


def run_select(cfg: SweepConfig) -> Report:
    records, failures, details = _execute(cfg, _select_trial)
    # exhaustive cross-check on every short length, against brute force
    t = cfg.trials
    for length in range(2, 13):
        for rep in range(3):
            rng = trial_rng(cfg.suite, cfg.seed, f"exhaustive:{length}:{rep}")
            values = inst.subset_values(rng, max_len=64, length=length)
            ok, detail = _select_check(values)
            feasible = _brute_feasible(values)
            ok = ok and feasible
            detail.update({"phase": "exhaustive", "brute_feasible": feasible})
            records.append(make_record(t, ok, detail))
            details.append(detail)
            if not ok:
                failures.append(
                    {
                        "trial": t,
                        "error": "exhaustive cross-check failed",
                        "detail": jsonable(detail),
                        "instance": " ".join(str(v) for v in values),
                    }
                )
            t += 1
    sums = [Fraction(d["sum"]) for d in details if "sum" in d]
    stats = {
        "min_sum": min(sums, default=None),
        "max_sum": max(sums, default=None),
        "exhaustive_checked": t - cfg.trials,
    }
    return Report(cfg, tuple(records), tuple(failures), jsonable(stats))


# -- matrix partition ----------------------------------------------------------


def _partition_trial(rng: random.Random, trial: int, cfg: SweepConfig):
    cols = inst.sorted_unit_matrix(rng)
    res = partition_matrix(cols)
    problems: list[str] = []
    seen: set[tuple[int, int]] = set()
    for part in res.parts:
        by_col: set[int] = set()
        part_sum = Fraction(0)
        for depth, j in part:
            if j in by_col:
                problems.append("two cells of one column in a part")
            by_col.add(j)
            part_sum += cols[j][depth]
            if (depth, j) in seen:
                problems.append("cell in two parts")
            seen.add((depth, j))
        if part_sum > 1:
            problems.append("part sum above 1")
    expect = {(d, j) for j, col in enumerate(cols) for d in range(len(col))}
    if seen != expect:
        problems.append("parts do not cover the matrix exactly")
    mass = sum((v for col in cols for v in col), Fraction(0))
    deepest = max((len(col) for col in cols), default=0)
    if mass and res.reductions >= 2 * mass:
        problems.append("reductions reached twice the mass")
    if len(res.parts) > 2 * mass + deepest:
        problems.append("part count above 2M + k")
    detail = {
        "cols": len(cols),
        "deepest": deepest,
        "mass": mass,
        "parts": len(res.parts),
        "reductions": res.reductions,
    }
    if problems:
        detail["problems"] = sorted(set(problems))
    text = "\n".join(" ".join(str(v) for v in col) for col in cols)
    return not problems, detail, text


def run_partition(cfg: SweepConfig) -> Report:
    records, failures, details = _execute(cfg, _partition_trial)
    stats = {
        "max_parts": max((d.get("parts", 0) for d in details), default=0),
        "max_reductions": max((d.get("reductions", 0) for d in details), default=0),
    }
    return Report(cfg, tuple(records), tuple(failures), jsonable(stats))


# -- k-disjoint l2 families ------------------------------------------------------


def _kdisjoint_trial(rng: random.Random, trial: int, cfg: SweepConfig):
    k, vecs = inst.kdisjoint_family(rng)
    n = len(vecs)
    coords = len(vecs[0]) if vecs else 0
    ok = True
    for c in range(coords):
        if sum(1 for v in vecs if v[c]) > k:
            ok = False
    for v in vecs:
        if l2_norm_sq(v) > 1:
            ok = False
    sums = [sum((v[c] for v in vecs), Fraction(0)) for c in range(coords)]
    norm = l2_norm_sq(sums)
    ok = ok and norm <= k * n
    detail = {"k": k, "n": n, "coords": coords, "sum_norm_sq": norm, "bound": k * n}
    text = "\n".join(" ".join(str(e) for e in v) for v in vecs)
    return ok, detail, text


def run_kdisjoint(cfg: SweepConfig) -> Report:
    records, failures, details = _execute(cfg, _kdisjoint_trial)
    ratios = [
        Fraction(d["sum_norm_sq"]) / d["bound"]
        for d in details
        if d.get("bound")
    ]
    stats = {"max_norm_ratio": max(ratios, default=None)}
    return Report(cfg, tuple(records), tuple(failures), jsonable(stats))


# -- seminorm of covered averages -------------------------------------------------


def _smallsup_trial(rng: random.Random, trial: int, cfg: SweepConfig):
    eps = _eps_for(cfg, trial, EPS_SMALL)
    seqs = inst.covered_generators(rng, eps, max_m=cfg.max_m, max_row=cfg.max_row)
    avg = average_indicators(seqs)
    degree = disjointness_degree(seqs)
    rho_sq = row_norm_sq(avg)
    ok = (
        degree <= int(eps * len(seqs))
        and avg.sup_norm() <= eps
        and rho_sq <= eps
    )
    detail = {
        "epsilon": eps,
        "m": len(seqs),
        "degree": degree,
        "sup": avg.sup_norm(),
        "rho_sq": rho_sq,
    }
    return ok, detail, seq_file_text(seqs)


def run_smallsup(cfg: SweepConfig) -> Report:
    _require_generator_cap(cfg, EPS_SMALL)
    records, failures, details = _execute(cfg, _smallsup_trial)
    margins = [
        Fraction(d["rho_sq"]) / Fraction(d["epsilon"])
        for d in details
        if "rho_sq" in d
    ]
    stats = {"max_rho_sq_over_eps": max(margins, default=None)}
    return Report(cfg, tuple(records), tuple(failures), jsonable(stats))


# -- blocked sequences -------------------------------------------------------------


def _blocks_trial(rng: random.Random, trial: int, cfg: SweepConfig):
    values_sq, breaks = inst.blocked_squares(rng)
    passed = block_conditions_sq(values_sq, breaks, cfg.p)
    bounded = lorentz_le_sq(values_sq, 4, cfg.p)
    globally_one = lorentz_le_sq(values_sq, 1, cfg.p)
    detail = {
        "length": len(values_sq),
        "blocks": len(breaks) - 1,
        "conditions": passed,
        "within_4": bounded,
        "within_1": globally_one,  # often false; the factor 4 is the content
    }
    text = " ".join(str(v) for v in values_sq) + "\nbreaks " + " ".join(
        str(b) for b in breaks
    )
    return passed and bounded, detail, text


def run_blocks(cfg: SweepConfig) -> Report:
    records, failures, details = _execute(cfg, _blocks_trial)
    stats = {
        "beyond_unit_ball": sum(1 for d in details if d.get("within_1") is False),
    }
    return Report(cfg, tuple(records), tuple(failures), jsonable(stats))


# -- full decomposition pipeline ---------------------------------------------------


def _mainlemma_trial(rng: random.Random, trial: int, cfg: SweepConfig):
    eps = _eps_for(cfg, trial, EPS_MAIN)
    seqs = inst.covered_generators(
        rng, eps, max_m=cfg.max_m, max_row=cfg.max_row, max_waves=10
    )
    cert = decompose_average(seqs, eps, cfg.p)
    problems = verify_decomposition(cert, seqs)
    ok = not problems and cert.scale**4 <= 625 * eps
    detail = {
        "epsilon": eps,
        "m": cert.m_count,
        "k": cert.k,
        "blocks": len(cert.blocks),
        "scale": cert.scale,
    }
    if problems:
        detail["problems"] = problems
    return ok, detail, seq_file_text(seqs)


def run_mainlemma(cfg: SweepConfig) -> Report:
    _require_generator_cap(cfg, EPS_MAIN)
    records, failures, details = _execute(cfg, _mainlemma_trial)
    margins = [
        Fraction(d["scale"]) ** 4 / (625 * Fraction(d["epsilon"]))
        for d in details
        if "scale" in d
    ]
    stats = {"max_scale_4th_over_bound": max(margins, default=None)}
    return Report(cfg, tuple(records), tuple(failures), jsonable(stats))


# -- quotient pairings -------------------------------------------------------------


def _quotient_trial_maker(c_hi: Fraction) -> TrialFn:
    def trial(rng: random.Random, trial_idx: int, cfg: SweepConfig):
        b = inst.unit_vector(rng)
        witness = pairing_witness(b, cfg.p)
        witness.validate(b)
        floor_ok = witness.pairing >= Fraction(2, 9)
        v, _, _ = inst.body_element(rng, cfg.p)
        b2 = inst.unit_vector(rng)
        z = row_pairing(v, b2)
        cap_ok = abs(z) <= c_hi
        detail = {
            "pairing": witness.pairing,
            "branch": witness.branch,
            "z_pair": z,
            "floor_ok": floor_ok,
            "cap_ok": cap_ok,
        }
        text = "b " + " ".join(str(v) for v in b) + "\n" + v.to_text()
        return floor_ok and cap_ok, detail, text

    return trial


def run_quotient(cfg: SweepConfig) -> Report:
    constant = lorentz_l2_constant(cfg.p)
    width_ok = constant.hi - constant.lo <= Fraction(1, 1000)
    records, failures, details = _execute(cfg, _quotient_trial_maker(constant.hi))
    if not width_ok:
        failures.append(
            {
                "trial": "constant",
                "error": "constant enclosure wider than 1/1000",
                "detail": {"width": float(constant.hi - constant.lo)},
                "instance": None,
            }
        )
    pairings = [Fraction(d["pairing"]) for d in details if "pairing" in d]
    zs = [abs(Fraction(d["z_pair"])) for d in details if "z_pair" in d]
    stats = {
        "min_pairing": min(pairings, default=None),
        "max_abs_z_pair": max(zs, default=None),
        "constant_hi": float(constant.hi),
        "constant_width": float(constant.hi - constant.lo),
        "constant_width_ok": width_ok,
    }
    return Report(cfg, tuple(records), tuple(failures), jsonable(stats))


# -- gauge sandwich ----------------------------------------------------------------


def _sandwich_trial_maker(c_hi: Fraction) -> TrialFn:
    def trial(rng: random.Random, trial_idx: int, cfg: SweepConfig):
        x, is_unit = inst.micro_instance(rng)
        cheap = gauge_interval(x, cfg.p)
        refined = tau_micro_oracle(x, cfg.p, tol=cfg.tolerance)
        ok = (
            cheap.lo <= refined.lo <= refined.hi <= cheap.hi
            and refined.hi - refined.lo <= cfg.tolerance
        )
        if is_unit:
            ok = ok and refined.lo >= 1 / c_hi - Fraction(1, 1000) and refined.hi <= 1
        detail = {
            "unit_case": is_unit,
            "lo": float(refined.lo),
            "hi": float(refined.hi),
            "width": float(refined.hi - refined.lo),
            "cheap_lo": float(cheap.lo),
            "cheap_hi": float(cheap.hi),
        }
        return ok, detail, x.to_text()

    return trial


def run_sandwich(cfg: SweepConfig) -> Report:
    constant = lorentz_l2_constant(cfg.p)
    records, failures, details = _execute(cfg, _sandwich_trial_maker(constant.hi))
    stats = {
        "max_width": max((d.get("width", 0.0) for d in details), default=0.0),
        "unit_cases": sum(1 for d in details if d.get("unit_case")),
    }
    return Report(cfg, tuple(records), tuple(failures), jsonable(stats))


# -- element splitting -------------------------------------------------------------


def _split_trial(rng: random.Random, trial: int, cfg: SweepConfig):
    eps = _eps_for(cfg, trial, EPS_MAIN)
    weights, reps = inst.split_instance(rng, cfg.p, eps)
    result = split_element(weights, reps, eps, cfg.p)
    problems = verify_split(result, reps)
    element = TriVector()
    for w, rep in zip(weights, reps):
        element = element + rep.element().scale(w)
    recombined = result.remainder
    for piece in result.slices:
        recombined = recombined + piece
    if recombined != element:
        problems.append("reassembly mismatch")
    ok = not problems and result.gauge_bound**8 <= 5**8 * eps
    detail = {
        "epsilon": eps,
        "reps": len(reps),
        "slices": len(result.slices),
        "front_count": result.front_count,
        "gauge_bound": result.gauge_bound,
    }
    if problems:
        detail["problems"] = problems
    text = element.to_text()
    return ok, detail, text


def run_split(cfg: SweepConfig) -> Report:
    records, failures, details = _execute(cfg, _split_trial)
    margins = [
        Fraction(d["gauge_bound"]) ** 8 / (5**8 * Fraction(d["epsilon"]))
        for d in details
        if "gauge_bound" in d
    ]
    stats = {"max_bound_8th_over_eps": max(margins, default=None)}
    return Report(cfg, tuple(records), tuple(failures), jsonable(stats))


# -- merge of decreasing families --------------------------------------------------


def _merge_trial(rng: random.Random, trial: int, cfg: SweepConfig):
    family = inst.merge_family(rng, cfg.p, count=50)
    result = merge_representatives(family, cfg.p)
    kept_all = result.selected == tuple(range(len(family)))
    prefixes_ok = True
    for n in range(1, len(result.selected) + 1):
        cut = result.breakpoints[n]
        halved = make_disjoint_rep(
            [piece.scale(Fraction(1, 2)) for piece in result.merged.pieces[:cut]],
            cfg.p,
            certs=[
                HullCertificate(c.seqs, c.weights, c.scale / 2)
                for c in result.merged.certs[:cut]
            ],
        )
        if not halved.is_unit_member():
            prefixes_ok = False
    ok = kept_all and prefixes_ok
    detail = {
        "family": len(family),
        "kept": len(result.selected),
        "pieces": result.merged.length,
        "prefixes_ok": prefixes_ok,
    }
    text = "\n".join(rep.element().to_text() for rep in family)
    return ok, detail, text


def run_merge(cfg: SweepConfig) -> Report:
    records, failures, details = _execute(cfg, _merge_trial)
    stats = {"families_kept_whole": sum(1 for d in details if d.get("kept") == 50)}
    return Report(cfg, tuple(records), tuple(failures), jsonable(stats))


SUITES: dict[str, Callable[[SweepConfig], Report]] = {
    "select": run_select,
    "partition": run_partition,
    "kdisjoint": run_kdisjoint,
    "smallsup": run_smallsup,
    "blocks": run_blocks,
    "mainlemma": run_mainlemma,
    "quotient": run_quotient,
    "sandwich": run_sandwich,
    "split": run_split,
    "merge": run_merge,
}

# acceptance-scale trial counts, one entry per suite
DEFAULT_TRIALS: dict[str, int] = {
    "select": 1000,
    "partition": 500,
    "kdisjoint": 1000,
    "smallsup": 500,
    "blocks": 500,
    "mainlemma": 100,
    "quotient": 1000,
    "sandwich": 200,
    "split": 100,
    "merge": 50,
}


def run_suite(cfg: SweepConfig) -> Report:
    if cfg.suite not in SUITES:
        raise ValueError(f"unknown suite {cfg.suite!r}; choose from {sorted(SUITES)}")
    return SUITES[cfg.suite](cfg)
