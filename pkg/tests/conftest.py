from collections import OrderedDict

import pytest

from huxdelta.model import FIGURE1, POSITIVE_CASE
from huxdelta.operators import Grid

# criterion number -> [(check label, passed, detail)], filled by the acceptance suite
_ACCEPTANCE: "OrderedDict[int, list]" = OrderedDict()


@pytest.fixture(scope="session")
def grid():
    return Grid()


@pytest.fixture(scope="session")
def fig1():
    return FIGURE1


@pytest.fixture(scope="session")
def posb():
    return POSITIVE_CASE


@pytest.fixture
def accept():
    """record(criterion, label, ok, detail) and assert ok."""

    def record(criterion: int, label: str, ok: bool, detail: str = ""):
        _ACCEPTANCE.setdefault(criterion, []).append((label, bool(ok), detail))
        assert ok, f"criterion {criterion} [{label}]: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for c in sorted(_ACCEPTANCE):
        checks = _ACCEPTANCE[c]
        verdict = "PASS" if all(ok for _, ok, _ in checks) else "FAIL"
        parts = "; ".join(f"{lab}: {'ok' if ok else 'FAIL'} ({det})" for lab, ok, det in checks)
        terminalreporter.write_line(f"criterion {c:2d} {verdict}  {parts}")
