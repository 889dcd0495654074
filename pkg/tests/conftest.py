import re

import pytest

_CRITERIA_KEY = pytest.StashKey[dict]()
_OUTCOMES_KEY = pytest.StashKey[dict]()
_NAME = re.compile(r"test_criterion_(\d+)")


def pytest_configure(config):
    config.stash[_CRITERIA_KEY] = {}
    config.stash[_OUTCOMES_KEY] = {}


@pytest.fixture
def record_criterion(request):
    """Store a one-line verdict for an acceptance criterion."""
    results = request.config.stash[_CRITERIA_KEY]

    def record(number: int, passed: bool, detail: str) -> None:
        results[number] = (bool(passed), detail)

    return record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    match = _NAME.search(item.nodeid)
    if match and report.failed:
        lines = report.longreprtext.strip().splitlines()
        item.config.stash[_OUTCOMES_KEY][int(match.group(1))] = lines[-1] if lines else "error"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_CRITERIA_KEY, {})
    crashed = config.stash.get(_OUTCOMES_KEY, {})
    if not results and not crashed:
        return
    terminalreporter.section("acceptance criteria")
    for number in range(1, 12):
        if number in results:
            passed, detail = results[number]
            verdict = "PASS" if passed else "FAIL"
        elif number in crashed:
            verdict, detail = "FAIL", f"error before a verdict was recorded: {crashed[number]}"
        else:
            verdict, detail = "NOT RUN", "deselected"
        terminalreporter.write_line(f"criterion {number:2d}: {verdict}  {detail}")
