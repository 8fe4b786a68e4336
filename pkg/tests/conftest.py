import numpy as np
import pytest

from rankone.geometry import JacobiParams, RankOneSpace


@pytest.fixture
def h3():
    """Three-dimensional real hyperbolic space, (alpha, beta) = (1/2, -1/2)."""
    return RankOneSpace.from_jacobi(0.5, -0.5)


@pytest.fixture
def flat():
    """The degenerate pair (-1/2, -1/2): cosine kernel, flat density."""
    return RankOneSpace.from_jacobi(-0.5, -0.5)


@pytest.fixture
def ch2():
    """Complex hyperbolic plane, (alpha, beta) = (1, 0)."""
    return RankOneSpace.complex_hyperbolic(2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


SIN_PARAMS = JacobiParams(0.5, -0.5)
COS_PARAMS = JacobiParams(-0.5, -0.5)


ACCEPTANCE_LINES = pytest.StashKey[list]()


@pytest.fixture
def record(request):
    """Log one PASS/FAIL line per acceptance criterion; returns the verdict."""
    lines = request.config.stash.setdefault(ACCEPTANCE_LINES, [])

    def _record(number: int, title: str, passed: bool, detail: str) -> bool:
        line = f"{'PASS' if passed else 'FAIL'} [{number:2d}] {title}: {detail}"
        lines.append((number, line))
        print(line)
        return passed

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
