"""Acceptance criteria, one test per criterion, at the stated tolerances.

Each test prints a single ``[PASS]``/``[FAIL]`` line. Run directly with
``python tests/test_acceptance.py`` for just those lines.
"""

import sys

import pytest

from kirchhoff_lab.suites import run_suite

CRITERIA = [
    (1, "parabolic"),
    (2, "corrector"),
    (3, "kernel"),
    (4, "energy"),
    (5, "decay"),
    (6, "convergence"),
    (7, "optimality"),
    (8, "sharpness"),
    (9, "improved"),
    (10, "supersolution"),
    (11, "monotonicity"),
]


def _line(number, result):
    return f"criterion {number:>2} {result.line()}"


@pytest.mark.parametrize("number,suite", CRITERIA, ids=[name for _, name in CRITERIA])
def test_criterion(number, suite, capsys):
    result = run_suite(suite)
    with capsys.disabled():
        print("\n" + _line(number, result))
    assert result.passed, result.to_dict()["details"]


if __name__ == "__main__":
    failed = 0
    for number, suite in CRITERIA:
        result = run_suite(suite)
        failed += not result.passed
        print(_line(number, result), flush=True)
    sys.exit(1 if failed else 0)
