import numpy as np
import pytest

from cekit.cause import SolverConfig


@pytest.fixture
def quick():
    """Solver settings for small-dimension unit tests."""
    return SolverConfig(restarts=8, seed=0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_ACCEPTANCE: dict[int, list[tuple[bool, str]]] = {}


@pytest.fixture
def accept():
    """Record (criterion, ok, detail); a criterion passes only if every part passed."""
    def record(n, ok, detail=""):
        _ACCEPTANCE.setdefault(n, []).append((bool(ok), detail))
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        parts = _ACCEPTANCE[n]
        ok = all(p[0] for p in parts)
        detail = "; ".join(d for _, d in parts if d)
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
