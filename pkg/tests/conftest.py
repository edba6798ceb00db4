import pytest

# criterion id -> (passed, one-line detail); filled by test_acceptance.py
ACCEPTANCE: dict = {}


def record(criterion: int, title: str, passed: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (title, passed, detail)
    line = format_line(criterion, title, passed, detail)
    print(line)


def format_line(criterion, title, passed, detail):
    return f"[{'PASS' if passed else 'FAIL'}] criterion {criterion:>2} {title}: {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(ACCEPTANCE):
        terminalreporter.write_line(format_line(criterion, *ACCEPTANCE[criterion]))


@pytest.fixture
def acceptance():
    return record
