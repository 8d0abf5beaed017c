from __future__ import annotations

import re

_results: dict[str, tuple[str, float]] = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    key = f"{int(m.group(1)):2d} {m.group(2)}"
    if report.when == "call" or report.outcome != "passed":
        prev = _results.get(key)
        if prev is None or prev[0] == "PASS":
            _results[key] = ("PASS" if report.passed else "FAIL", report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_results):
        outcome, secs = _results[key]
        terminalreporter.write_line(f"criterion {key}: {outcome} ({secs:.1f}s)")
