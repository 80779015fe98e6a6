import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("default")

ACCEPTANCE = []


@pytest.fixture
def record_criterion():
    """Acceptance tests report ``(label, passed, detail)`` here."""
    def _record(label, passed, detail=""):
        ACCEPTANCE.append((label, bool(passed), detail))
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in sorted(ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}")


def dense_canonical(p):
    m = p.n + 1
    A = np.diag(np.ones(m - 1, complex), 1) + np.diag(np.ones(m - 1, complex), -1)
    A[0, 0] = -p.b0
    A[0, 1] = 1 - p.b1
    A[-1, -2] = 1 - p.cm1
    A[-1, -1] = -p.c0
    return A
