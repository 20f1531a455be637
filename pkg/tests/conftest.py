import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import bundled_data_problems  # noqa: E402
from obstructor import load  # noqa: E402


def pytest_sessionstart(session):
    problems = bundled_data_problems()
    if problems:
        pytest.exit("bundled data failed its cross-checks:\n" + "\n".join(problems), returncode=3)


@pytest.fixture(scope="session")
def delta1():
    return load("delta1")


@pytest.fixture(scope="session")
def delta2():
    return load("delta2")


@pytest.fixture(scope="session")
def kb8():
    return load("kb9_008")


@pytest.fixture(scope="session")
def tetra():
    return load("tetrahedron")


@pytest.fixture(scope="session")
def csaszar():
    return load("csaszar")


_criteria: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    n, text = marker
    failed = report.failed or (report.when == "call" and report.outcome != "passed")
    if report.when == "call" or failed:
        prev = _criteria.get(n, (text, "PASS"))[1]
        _criteria[n] = (text, "FAIL" if failed or prev == "FAIL" else "PASS")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    m = item.get_closest_marker("criterion")
    if m is not None:
        outcome.get_result().criterion = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        text, status = _criteria[n]
        terminalreporter.write_line(f"criterion {n}: {status}  {text}")
