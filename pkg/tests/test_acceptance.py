"""Acceptance gate: every deliverable behavior, one criterion per test.

Each test runs the corresponding numbered criterion end to end at its
stated tolerance and asserts both the check itself and the wall-clock
budget.  The one-line summary (the same line ``rkstieltjes accept``
prints) is attached to the assertion so a red run says what broke.
"""
import pytest

from rkstieltjes.acceptance import CRITERIA, run_criterion


def _run(number):
    result = run_criterion(number)
    print(result.line())
    assert result.passed, result.line()
    assert result.in_budget, result.line()


def test_criterion_01_rational_exactness():
    _run(1)


def test_criterion_02_zolotarev_ratio():
    _run(2)


def test_criterion_03_cauchy_1d_bound_and_rate():
    _run(3)


def test_criterion_04_laplace_1d_bound():
    _run(4)


def test_criterion_05_iteration_counts_large_problem():
    _run(5)


def test_criterion_06_small_sylvester_solver():
    _run(6)


def test_criterion_07_kron_cauchy_bound_and_rate():
    _run(7)


def test_criterion_08_kron_laplace_bound():
    _run(8)


def test_criterion_09_sylvester_residual_bound():
    _run(9)


def test_criterion_10_singular_value_decay():
    _run(10)


def test_criterion_11_equidistributed_sequence():
    _run(11)


def test_budgets_match_stated_limits():
    stated = {1: 10.0, 2: 5.0, 3: 60.0, 4: 60.0, 5: 600.0, 6: 5.0,
              7: 120.0, 8: 120.0, 9: 30.0, 10: 60.0, 11: 30.0}
    assert {num: budget for num, _, _, budget in CRITERIA} == stated


def test_unknown_criterion_rejected():
    with pytest.raises(ValueError):
        run_criterion(12)
