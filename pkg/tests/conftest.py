import pytest

# criterion number -> list of (part, passed, detail)
_ACCEPTANCE: dict[int, list] = {}
N_CRITERIA = 12


@pytest.fixture
def criterion():
    """Record one checked part of an acceptance criterion."""
    def record(number: int, part: str, passed: bool, detail: str = ""):
        _ACCEPTANCE.setdefault(number, []).append((part, bool(passed), detail))
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in range(1, N_CRITERIA + 1):
        parts = _ACCEPTANCE.get(n)
        if not parts:
            tr.write_line(f"criterion {n:2d}: NOT RUN")
            continue
        status = "PASS" if all(ok for _, ok, _ in parts) else "FAIL"
        detail = "; ".join(f"{p} {'ok' if ok else 'FAILED'} ({d})" for p, ok, d in parts)
        tr.write_line(f"criterion {n:2d}: {status}  {detail}")
