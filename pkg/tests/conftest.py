import pytest

_RESULTS: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion():
    """Record ``(label, ok, detail)`` for the acceptance summary; returns ``ok``."""

    def record(label, ok, detail=""):
        _RESULTS.append((label, bool(ok), detail))
        return bool(ok)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
    passed = sum(ok for _, ok, _ in _RESULTS)
    terminalreporter.write_line(f"{passed}/{len(_RESULTS)} criterion checks passed")
