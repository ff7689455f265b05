import pytest

_VERDICTS: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def criterion(request):
    """Record ``criterion(label, ok, detail)`` for the end-of-run summary, then assert."""

    def record(label: str, ok: bool, detail: str = "") -> None:
        _VERDICTS[label] = (bool(ok), detail)
        assert ok, f"{label}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_VERDICTS, key=lambda s: int(s.split()[1])):
        ok, detail = _VERDICTS[label]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
