import numpy as np
import pytest

from fuzcon import catalog
from fuzcon.config import DEFAULT


@pytest.fixture(scope="session")
def cfg():
    return DEFAULT


@pytest.fixture(scope="session")
def fixtures():
    return {f.name: f for f in catalog.load_catalog()}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# ------------------------------------------------------------ acceptance summary

_criteria: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and not rep.failed):
        return
    number, title = mark.args
    entry = _criteria.setdefault(number, {"title": title, "passed": True, "tests": 0})
    entry["tests"] += rep.when == "call"
    entry["passed"] &= not rep.failed


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        e = _criteria[number]
        status = "PASS" if e["passed"] else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {e['title']}")
