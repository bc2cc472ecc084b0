from __future__ import annotations

import pytest

CRITERIA = {
    1: "example term renders in nameless and spine form",
    2: "five strategies agree with the named normalizer",
    3: "sharing: identical ids and zero-traversal equality",
    4: "eta-long form survives beta-normalization",
    5: "index queries equal brute-force scans",
    6: "incremental SZS propagation equals recomputation",
    7: "greedy auction value within OPT/sqrt(m)",
    8: "transformations preserve truth and satisfiability",
    9: "TPTP parse/print round trip in every dialect",
    10: "OR split with mock provers ends in Theorem",
}

_outcomes: dict[int, tuple[str, float]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion checked by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n = marker.args[0]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        # a criterion fails if any of its tests fails; durations add up
        verdict = "PASS" if report.passed else "FAIL"
        previous_verdict, total = _outcomes.get(n, ("PASS", 0.0))
        _outcomes[n] = (verdict if previous_verdict == "PASS" else "FAIL", total + report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        if n not in _outcomes:
            continue
        verdict, duration = _outcomes[n]
        terminalreporter.write_line(f"criterion {n:>2} {verdict}  {CRITERIA[n]} ({duration:.2f}s)")
