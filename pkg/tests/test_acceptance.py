"""All fifteen acceptance criteria at their stated tolerances.

Each test prints one PASS/FAIL line (visible with ``pytest -s`` or in the
captured output of a failure).
"""
import time

import pytest

from tomometrics.acceptance import CRITERIA, DEFAULT_SEED, run_all


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda c: f"{c.number:02d}-{c.name}")
def test_criterion(criterion, capsys):
    result = criterion.run(DEFAULT_SEED)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.line()


def test_whole_suite_runs_under_a_minute():
    t0 = time.perf_counter()
    results = run_all(DEFAULT_SEED)
    assert len(results) == 15
    assert time.perf_counter() - t0 < 60


def test_monte_carlo_verdicts_are_stable_across_seeds():
    picks = ["tomographic-round-trip", "matrix-falsifier", "cptp-monte-carlo"]
    a = run_all(42, picks)
    b = run_all(43, picks)
    assert [r.passed for r in a] == [r.passed for r in b] == [True] * 3
    # verdict words inside the detail strings agree
    assert a[2].detail.split(";")[1].split("(")[0] == b[2].detail.split(";")[1].split("(")[0]


def test_deterministic_criteria_ignore_the_seed():
    picks = ["petz-consistency", "extracted-h", "ode-cross-validation"]
    a = run_all(42, picks)
    b = run_all(43, picks)
    assert [(r.value, r.detail) for r in a] == [(r.value, r.detail) for r in b]
