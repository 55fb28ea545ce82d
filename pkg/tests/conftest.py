import pytest

ACCEPTANCE = {}


@pytest.fixture
def record():
    """Store the verdict of one part of an acceptance criterion."""
    def _record(criterion, name, passed, detail):
        ACCEPTANCE.setdefault(criterion, []).append((name, bool(passed), detail))
        print(f"criterion {criterion} [{name}] {'PASS' if passed else 'FAIL'}: {detail}")
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[k]
        ok = all(p for _, p, _ in parts)
        body = "; ".join(f"{n}: {d}" + ("" if p else " (FAIL)") for n, p, d in parts)
        terminalreporter.write_line(f"criterion {k:>2} {'PASS' if ok else 'FAIL'}  {body}")
