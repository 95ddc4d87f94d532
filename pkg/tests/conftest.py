import pytest

# criterion number -> (passed, one-line detail); filled by test_acceptance
CRITERIA: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def criterion_log():
    return CRITERIA


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        ok, detail = CRITERIA[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
