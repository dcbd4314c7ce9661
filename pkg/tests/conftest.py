import time

import pytest

# criterion number -> list of (part, passed, detail)
ACCEPTANCE = {}
SUITE_BUDGET = 600.0
_START = time.perf_counter()


def record(criterion: int, part: str, ok: bool, detail: str = ""):
    ACCEPTANCE.setdefault(criterion, []).append((part, bool(ok), detail))


@pytest.fixture
def acceptance():
    return record


def pytest_sessionfinish(session, exitstatus):
    elapsed = time.perf_counter() - _START
    if ACCEPTANCE:
        record(9, "suite wall time", elapsed < SUITE_BUDGET,
               f"{elapsed:.1f} s (budget {SUITE_BUDGET:.0f} s)")
        if elapsed >= SUITE_BUDGET and session.exitstatus == 0:
            session.exitstatus = 1


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for c in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[c]
        ok = all(p[1] for p in parts)
        tr.write_line(f"criterion {c}: {'PASS' if ok else 'FAIL'}")
        for part, passed, detail in parts:
            tr.write_line(f"    [{'ok' if passed else 'FAIL'}] {part}: {detail}")
