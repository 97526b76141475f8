import re

import pytest

from timrbs.scenario import ModeCache

_ACCEPTANCE = {}


@pytest.fixture(scope="session")
def mode_cache():
    """Mode solutions shared by every test in the session."""
    return ModeCache()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = re.match(r"test_criterion_(\d+)_(\w+)", item.name)
    if m and rep.when == "call":
        _ACCEPTANCE[int(m.group(1))] = (m.group(2).replace("_", " "), rep.outcome)
    elif m and rep.when == "setup" and rep.outcome != "passed":
        _ACCEPTANCE[int(m.group(1))] = (m.group(2).replace("_", " "), rep.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        title, outcome = _ACCEPTANCE[k]
        verdict = {"passed": "PASS", "failed": "FAIL"}.get(outcome, outcome.upper())
        terminalreporter.write_line(f"criterion {k}: {verdict}  {title}")
