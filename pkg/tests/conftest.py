import pytest

# (criterion, passed, detail) rows filled by the acceptance suite
ACCEPTANCE = []


@pytest.fixture
def criterion():
    def record(name, passed, detail=""):
        ACCEPTANCE.append((name, bool(passed), detail))
        assert passed, f"{name}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
