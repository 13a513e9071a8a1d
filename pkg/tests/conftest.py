"""Collects one PASS/FAIL line per acceptance criterion and prints them at the end of the run."""

import pytest

_RESULTS: dict[str, tuple[str, str]] = {}


@pytest.fixture
def report(request):
    """Attach a one-line result detail to the running acceptance test."""
    details: list[str] = []
    request.node.user_properties.append(("details", details))
    return details.append


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        details = dict(report.user_properties).get("details", [])
        name = report.nodeid.split("::")[-1]
        _RESULTS[name] = ("PASS" if report.passed else "FAIL", "; ".join(details))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_RESULTS):
        status, detail = _RESULTS[name]
        terminalreporter.write_line(f"{status}  {name}  {detail}")
