"""Shared pytest wiring: a terminal-summary block with one pass/fail line
per acceptance criterion, so a full run always ends with the gate list."""

import re

CRITERION_LABELS = {
    1: "manifold geometry suite",
    2: "geodesic identity",
    3: "gradient certification",
    4: "per-phase closed form vs grid oracle",
    5: "fixed-channel convergence profile",
    6: "method ordering at desk scale",
    7: "rate trend across element counts",
    8: "per-iteration time scaling",
    9: "harness determinism",
}

_CRITERION = re.compile(r"test_acceptance\.py::.*test_criterion_(\d+)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    outcomes = {}
    for category, verdict in (("passed", "PASS"), ("failed", "FAIL"),
                              ("error", "FAIL")):
        for report in terminalreporter.stats.get(category, []):
            match = _CRITERION.search(report.nodeid)
            if match:
                num = int(match.group(1))
                # a FAIL from any phase of the test sticks
                if outcomes.get(num) != "FAIL":
                    outcomes[num] = verdict
    if not outcomes:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for num in sorted(outcomes):
        label = CRITERION_LABELS.get(num, "unknown")
        terminalreporter.write_line(f"criterion {num} ({label}): {outcomes[num]}")
