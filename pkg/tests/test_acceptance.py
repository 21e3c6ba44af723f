"""Acceptance gate: one test per criterion, at full trial counts.

Each test prints a single PASS/FAIL line (visible under pytest -s) and
asserts the criterion.  Reports are cached so the determinism criterion
re-runs every suite exactly once more.
"""

from fractions import Fraction as F

from trigauge.core import DEFAULT_P, lorentz_l2_constant
from trigauge.report import Report, SweepConfig
from trigauge.sweeps import DEFAULT_TRIALS, run_suite

SEED = 20260816
_CACHE: dict[str, Report] = {}


def _report(suite: str) -> Report:
    if suite not in _CACHE:
        cfg = SweepConfig(suite=suite, trials=DEFAULT_TRIALS[suite], seed=SEED)
        _CACHE[suite] = run_suite(cfg)
    return _CACHE[suite]


def _verdict(label: str, ok: bool) -> None:
    print(f"criterion {label}: {'PASS' if ok else 'FAIL'}")
    assert ok


def test_criterion_01_subset_selection():
    rep = _report("select")
    exhaustive = sum(
        1 for r in rep.records if r.detail.get("phase") == "exhaustive"
    )
    ok = rep.passed and len(rep.records) >= 1000 and exhaustive == 33
    _verdict("1 select", ok)


def test_criterion_02_matrix_partition():
    rep = _report("partition")
    ok = rep.passed and len(rep.records) == 500
    _verdict("2 partition", ok)


def test_criterion_03_disjoint_norm_growth():
    rep = _report("kdisjoint")
    ok = rep.passed and len(rep.records) == 1000
    _verdict("3 kdisjoint", ok)


def test_criterion_04_covered_average_seminorm():
    rep = _report("smallsup")
    eps_seen = {r.detail["epsilon"] for r in rep.records}
    ok = rep.passed and len(rep.records) == 500
    ok = ok and eps_seen == {"1/4", "1/16", "1/64"}
    _verdict("4 smallsup", ok)


def test_criterion_05_block_conditions():
    rep = _report("blocks")
    ok = rep.passed and len(rep.records) == 500
    _verdict("5 blocks", ok)


def test_criterion_06_decomposition_certificates():
    rep = _report("mainlemma")
    eps_seen = {r.detail["epsilon"] for r in rep.records}
    ok = rep.passed and len(rep.records) == 100
    ok = ok and eps_seen == {"1/4", "1/16"}
    _verdict("6 mainlemma", ok)


def test_criterion_07_quotient_pairings():
    rep = _report("quotient")
    stats = rep.stats
    ok = rep.passed and len(rep.records) == 1000
    ok = ok and F(stats["min_pairing"]) >= F(2, 9)
    ok = ok and stats["constant_width_ok"] is True
    constant = lorentz_l2_constant(DEFAULT_P)
    ok = ok and constant.hi - constant.lo <= F(1, 1000)
    _verdict("7 quotient", ok)


def test_criterion_08_gauge_sandwich():
    rep = _report("sandwich")
    ok = rep.passed and len(rep.records) == 200
    ok = ok and rep.stats["max_width"] <= 1e-3
    ok = ok and rep.stats["unit_cases"] > 0
    _verdict("8 sandwich", ok)


def test_criterion_09_element_splitting():
    rep = _report("split")
    ok = rep.passed and len(rep.records) == 100
    _verdict("9 split", ok)


def test_criterion_10_family_merge():
    rep = _report("merge")
    kept = all(r.detail.get("kept") == 50 for r in rep.records)
    ok = rep.passed and len(rep.records) == 50 and kept
    _verdict("10 merge", ok)


def test_criterion_11_deterministic_reports():
    ok = True
    for suite in sorted(DEFAULT_TRIALS):
        first = _report(suite)
        again = run_suite(first.config)
        if first.to_json() != again.to_json():
            ok = False
        if first.rendered("csv") != again.rendered("csv"):
            ok = False
    _verdict("11 determinism", ok)
