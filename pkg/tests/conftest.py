import pytest

_LINES = []


@pytest.fixture
def acceptance():
    """Record one pass/fail line for an acceptance criterion and return the flag."""
    def record(name, ok, detail=""):
        line = f"{name} {'PASS' if ok else 'FAIL'}" + (f": {detail}" if detail else "")
        _LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda s: int(s.split()[0][2:])):
            terminalreporter.write_line(line)
