"""Collects one pass/fail line per acceptance criterion for the terminal summary."""

import pytest

_RESULTS = {}


@pytest.fixture
def criterion(request):
    """Lets an acceptance test attach a short measurement line to its result."""

    class Detail:
        def __init__(self):
            self.lines = []

        def __call__(self, text):
            self.lines.append(text)
            print(text)

    detail = Detail()
    request.node.user_properties.append(("acceptance_detail", detail.lines))
    return detail


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when != "call" and not report.failed:
        return
    number = marker.args[0]
    details = []
    for key, value in item.user_properties:
        if key == "acceptance_detail":
            details.extend(value)
    previous = _RESULTS.get(number)
    passed = report.passed and (previous is None or previous[0])
    _RESULTS[number] = (passed, marker.args[1] if len(marker.args) > 1 else "", details)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        passed, title, details = _RESULTS[number]
        line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}: {title}"
        if details:
            line += " | " + "; ".join(details)
        terminalreporter.write_line(line)
