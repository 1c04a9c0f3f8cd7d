from __future__ import annotations

import pytest

_VERDICTS: dict[int, list[str]] = {}


@pytest.fixture
def verdict():
    """Record one pass/fail line for an acceptance criterion."""

    def record(number: int, ok: bool, detail: str) -> bool:
        _VERDICTS.setdefault(number, []).append(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_VERDICTS):
        for line in _VERDICTS[number]:
            terminalreporter.write_line(line)
