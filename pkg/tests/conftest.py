"""Shared fixtures and the acceptance summary."""
from collections import defaultdict

import pytest

_RESULTS = defaultdict(list)


@pytest.fixture
def criterion():
    """Record ``(number, ok, detail)`` for the acceptance summary and print it."""

    def record(number: int, ok: bool, detail: str):
        _RESULTS[number].append((bool(ok), detail))
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_RESULTS):
        parts = _RESULTS[number]
        status = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {status}  " + "; ".join(d for _, d in parts))
