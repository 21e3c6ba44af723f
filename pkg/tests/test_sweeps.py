"""Sweep runner: determinism, per-suite success on small runs, failure capture."""

from fractions import Fraction as F

import pytest

from trigauge.report import SweepConfig, load_report_payload
from trigauge.sweeps import DEFAULT_TRIALS, SUITES, _execute, run_suite, trial_rng


def test_trial_rng_is_reproducible_and_spread():
    a = trial_rng("select", 3, 7).random()
    b = trial_rng("select", 3, 7).random()
    assert a == b
    streams = {trial_rng("select", 3, t).random() for t in range(50)}
    assert len(streams) == 50
    assert trial_rng("select", 3, 0).random() != trial_rng("merge", 3, 0).random()


def test_registry_matches_trial_counts():
    assert set(SUITES) == set(DEFAULT_TRIALS)


def test_unknown_suite_rejected():
    with pytest.raises(ValueError, match="unknown suite"):
        run_suite(SweepConfig(suite="nope", trials=1))


@pytest.mark.parametrize("suite", sorted(SUITES))
def test_small_run_passes_and_is_deterministic(suite):
    trials = 1 if suite == "merge" else 4
    cfg = SweepConfig(suite=suite, trials=trials, seed=17)
    report = run_suite(cfg)
    assert report.passed, report.failures[:1]
    assert run_suite(cfg).to_json() == report.to_json()
    payload = load_report_payload(report.to_json())
    assert payload["config"]["suite"] == suite
    assert payload["aggregate"]["trials"] >= trials


def test_different_seeds_differ():
    a = run_suite(SweepConfig(suite="blocks", trials=5, seed=1))
    b = run_suite(SweepConfig(suite="blocks", trials=5, seed=2))
    assert a.to_json() != b.to_json()


def test_select_includes_exhaustive_phase():
    report = run_suite(SweepConfig(suite="select", trials=2, seed=0))
    phases = [r.detail.get("phase") for r in report.records]
    assert phases.count("exhaustive") == 33
    assert len(report.records) == 2 + 33


def test_quotient_stats_carry_floor_and_cap():
    report = run_suite(SweepConfig(suite="quotient", trials=6, seed=5))
    stats = report.stats
    assert F(stats["min_pairing"]) >= F(2, 9)
    assert stats["constant_width_ok"] is True


def test_smallsup_rejects_hostile_cap():
    with pytest.raises(ValueError, match="cannot host"):
        run_suite(SweepConfig(suite="smallsup", trials=1, epsilon=F(1, 64), max_m=16))


def test_explicit_epsilon_is_used_everywhere():
    report = run_suite(
        SweepConfig(suite="split", trials=3, seed=2, epsilon=F(1, 16))
    )
    assert report.passed
    assert {r.detail["epsilon"] for r in report.records} == {"1/16"}


def test_execute_turns_exceptions_into_failures():
    cfg = SweepConfig(suite="blocks", trials=3, seed=0)

    def boom(rng, trial, _cfg):
        if trial == 1:
            raise RuntimeError("synthetic")
        return True, {"fine": trial}, None

    records, failures, details = _execute(cfg, boom)
    assert [r.ok for r in records] == [True, False, True]
    assert len(failures) == 1
    assert "synthetic" in failures[0]["error"]
    assert failures[0]["trial"] == 1


def test_failure_reports_render_and_fail_the_report():
    from trigauge.report import Report, make_record

    cfg = SweepConfig(suite="blocks", trials=1, seed=0)
    rec = make_record(0, False, {"bad": True})
    rep = Report(
        cfg,
        (rec,),
        ({"trial": 0, "error": "x", "detail": {"bad": True}, "instance": None},),
        {},
    )
    assert not rep.passed
    assert '"pass": false' in rep.to_json()
