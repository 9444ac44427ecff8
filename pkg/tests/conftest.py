from pathlib import Path

import pytest

from monosplit.ingest import build_corpus, load_call_matrix, load_token_file

FIXTURES = Path(__file__).parent / "fixtures"
MINI = FIXTURES / "mini"


@pytest.fixture
def mini_calls():
    return load_call_matrix(MINI / "calls.csv")


@pytest.fixture
def mini_corpus():
    return build_corpus(load_token_file(MINI / "tokens.csv"))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion")
    config._criteria = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker and (report.when == "call" or (report.when == "setup" and report.failed)):
        item.config._criteria.append((marker.args[0], marker.args[1], report.outcome))


def pytest_terminal_summary(terminalreporter, config):
    if not config._criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number, text, outcome in sorted(config._criteria):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number}: {text}")
