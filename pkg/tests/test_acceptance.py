"""Acceptance criteria 1-10, each printed as one PASS/FAIL line in the summary.

Criteria 1-9 read their records from one default-configuration run (seed 0,
atoms 1..16, horizon 1..8, 1000 trials per property), which is also timed
against the one-minute budget.  Criterion 10 re-runs each targeted suite with
its mutation in place.
"""

from __future__ import annotations

import json
import time

import pytest

from stonecalc.harness import MUTATIONS, SuiteConfig, replay_fixture, run_suites

import conftest

BUDGET_SECONDS = 60.0
MUTATION_TRIALS = 100


def report_line(number, title: str, ok: bool, detail: str) -> None:
    conftest.ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  [{number}] {title}: {detail}")


@pytest.fixture(scope="module")
def default_run():
    cfg = SuiteConfig()
    start = time.perf_counter()
    report = run_suites(cfg)
    return report, time.perf_counter() - start


def check_records(report, names, min_trials: int):
    recs = [report.record(n) for n in names]
    ok = all(r.passed and r.trials >= min_trials for r in recs)
    detail = ", ".join(f"{r.name} {r.failures}/{r.trials} fail, slack {r.max_observed_slack:.3g}" for r in recs)
    return ok, detail


CRITERIA = [
    (1, "functional calculus agrees with composition",
     ["spectral.functional_calculus", "spectral.step_integral"], 1000),
    (2, "functional calculus is a lattice homomorphism", ["spectral.lattice_homomorphism"], 1000),
    (3, "daniell axiom on sequences decreasing to 0", ["spectral.daniell_axiom"], 200),
    (4, "jensen slack for max, l1, quadratic and affine f", ["probability.jensen"], 1000),
    (5, "stopping time representation round trip",
     ["stopping.representation", "stopping.level_set_recovery"], 1000),
    (6, "closure algebra is measurable", ["stopping.closure_algebra"], 1000),
    (7, "stopped element band sum equals pointwise", ["stopping.stopped_element"], 1000),
    (8, "increasing process identities", ["stopping.increasing_process_identities"], 1000),
    (9, "debut round trip", ["stopping.debut"], 1000),
]


@pytest.mark.parametrize("number,title,names,min_trials", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(default_run, number, title, names, min_trials):
    report, _ = default_run
    ok, detail = check_records(report, names, min_trials)
    report_line(number, title, ok, detail)
    assert ok, detail


@pytest.mark.parametrize("name", sorted(MUTATIONS))
def test_criterion_10_mutation_sensitivity(name):
    m = MUTATIONS[name]
    report = run_suites(SuiteConfig(trials=MUTATION_TRIALS, suites=(m.target_suite,)), mutation=name)
    failing = [r for r in report.records if not r.passed and r.name.startswith(m.target_suite + ".")]
    replays = failing and not replay_fixture(json.loads(json.dumps(failing[0].first_failure_fixture))).ok
    ok = bool(failing) and bool(replays)
    detail = f"{name} breaks {[r.name for r in failing]}" if failing else f"{name} went undetected"
    report_line(10, "mutation sensitivity", ok, detail)
    assert ok, detail


def test_default_run_passes_within_budget(default_run):
    report, seconds = default_run
    ok = report.passed and seconds < BUDGET_SECONDS
    failed = [r.name for r in report.records if not r.passed]
    report_line("budget", "full default run", ok,
                f"{len(report.records)} records, failing {failed}, {seconds:.1f} s of {BUDGET_SECONDS:.0f} s")
    assert report.passed, failed
    assert seconds < BUDGET_SECONDS
