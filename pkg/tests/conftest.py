import re

import pytest

CRITERIA = {
    1: "kernel vectors have zero coordinate sum",
    2: "Stab(2) inside the commutator subgroup",
    3: "gamma_3 and commutator inclusions of placed elements",
    4: "no-congruence witness t_n",
    5: "quotient tower",
    6: "kernel structure",
    7: "word identity for (c^-1 b) * i",
    8: "conjugacy by C",
    9: "path-sum reconstruction",
    10: "determinism",
}

_outcomes: dict[int, list[str]] = {}
_pattern = re.compile(r"test_criterion_(\d+)")


def pytest_runtest_logreport(report):
    m = _pattern.search(report.nodeid)
    if not m:
        return
    k = int(m.group(1))
    if report.when == "call":
        if hasattr(report, "wasxfail"):
            _outcomes.setdefault(k, []).append("xfail")
        else:
            _outcomes.setdefault(k, []).append(report.outcome)
    elif report.when == "setup" and report.outcome != "passed":
        _outcomes.setdefault(k, []).append("xfail" if hasattr(report, "wasxfail") else report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        got = _outcomes.get(k)
        if not got:
            continue
        if all(o == "passed" for o in got):
            status = "PASS"
        elif "failed" in got:
            status = "FAIL"
        elif "xfail" in got:
            status = "FAIL (literal sub-claim unattainable, expected failure recorded)"
        else:
            status = "INCOMPLETE"
        terminalreporter.write_line(f"criterion {k:2d} {status}: {CRITERIA[k]}")


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(20241016)
