from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def lam():
    from heightlab.arithmetic import Polynomial

    return Polynomial.lam()


def frac(text) -> Fraction:
    return Fraction(text)


ACCEPTANCE_LINES = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line per acceptance criterion and show it in the summary."""
    lines = request.config.stash.setdefault(ACCEPTANCE_LINES, [])
    tr = request.config.pluginmanager.get_plugin("terminalreporter")

    def record(number: int, ok: bool, detail: str, seconds: float) -> None:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({seconds:.1f} s) {detail}"
        lines.append(line)
        if tr is not None:
            tr.write_line(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
