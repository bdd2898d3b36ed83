"""Acceptance gate: every criterion at its stated tolerance, one line each."""

from __future__ import annotations

import pytest

from conftest import ACCEPTANCE_LINES
from dtmoments import acceptance
from dtmoments.report import CheckReport

SEED = acceptance.DEFAULT_SEED

# stated runtime budgets in seconds, reported next to the measured time
BUDGET = {"1": 10, "2": 5, "3": 5, "4": 5, "5": 30, "6": 5, "7": 60, "8": 60, "9": 300, "10": 20, "11": 1, "12": None}

_done: dict[str, CheckReport] = {}


def _record(key: str, rep: CheckReport) -> None:
    status = "PASS" if rep.passed else "FAIL"
    if rep.exact:
        metric = "exact equality"
    else:
        metric = f"residual {rep.max_residual:.3e} <= {rep.tolerance:.1e}"
    budget = BUDGET[key]
    timing = f"{rep.elapsed_ms / 1e3:.2f}s" + (f" (budget {budget}s)" if budget else "")
    line = f"criterion {key:>2} [{status}] {rep.name}: {metric}, {timing}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def _run(key: str) -> CheckReport:
    if key == "12":
        rep = acceptance.criterion_12(first_run={k: _done[k] for k in acceptance.NUMERIC if k in _done}, seed=SEED)
    else:
        rep = acceptance.CRITERIA[key](seed=SEED)
    _done[key] = rep
    _record(key, rep)
    return rep


@pytest.mark.parametrize("key", list(acceptance.CRITERIA))
def test_criterion(key):
    rep = _run(key)
    assert rep.passed, rep.to_dict(include_timing=False)


def test_battery_covers_every_criterion():
    assert list(acceptance.CRITERIA) == [str(i) for i in range(1, 13)]
    assert set(acceptance.SMOKE) <= set(acceptance.DESK)
