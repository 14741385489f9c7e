import pytest

# lines recorded by tests/test_acceptance.py, echoed after the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record():
    def _record(criterion: str, ok: bool, detail: str):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
        print(line)
        ACCEPTANCE_LINES.append(line)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
