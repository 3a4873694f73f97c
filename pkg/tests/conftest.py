import pytest

from multisecretary import solve_myopic, solve_optimal, solve_value_direct

_ACCEPTANCE = []


@pytest.fixture(scope="session")
def opt512():
    return solve_optimal(512)


@pytest.fixture(scope="session")
def myo512():
    return solve_myopic(512)


@pytest.fixture(scope="session")
def direct512():
    return solve_value_direct(512)


@pytest.fixture
def criterion():
    """Record one acceptance line, then assert it."""

    def check(number, title, ok, detail):
        _ACCEPTANCE.append((number, title, bool(ok), detail))
        assert ok, f"criterion {number} ({title}) failed: {detail}"

    return check


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail}")
