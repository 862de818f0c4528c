import pytest

_LINES: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for an acceptance criterion."""

    def record(name: str, ok: bool, detail: str = "") -> bool:
        _LINES.append((name, bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _LINES:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name:<40} {detail}")
