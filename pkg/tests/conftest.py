import pytest

# criterion number -> (passed, note); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record():
    def _record(number: int, passed: bool, note: str = "") -> None:
        ACCEPTANCE[number] = (bool(passed), note)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, note = ACCEPTANCE[number]
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}"
        terminalreporter.write_line(f"{line}  {note}" if note else line)
