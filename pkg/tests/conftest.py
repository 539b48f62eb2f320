import numpy as np
import pytest

from gapstress.geometry import GapGeometry

SWEEP_EPS = (4e-3, 1e-3, 2.5e-4)
GAP_R0 = 0.1

ACCEPTANCE_LINES = []


def record(criterion, passed, detail, expected_failure=False):
    """Keep one summary line per acceptance criterion for the terminal report."""
    status = "PASS" if passed else "FAIL"
    if expected_failure and not passed:
        status += " (expected, unattainable as stated)"
    ACCEPTANCE_LINES.append(f"criterion {criterion}: {status} {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def box_sweep():
    """Oracle studies on the two-disk box for the three-point eps sweep."""
    from gapstress.oracle.scenes import BoxScene
    from gapstress.oracle.study import study_box

    return [study_box(BoxScene(eps)) for eps in SWEEP_EPS]


@pytest.fixture(scope="session")
def gap_sweep():
    """Local gap corrections w = u - u_bar for alpha = 1, 2 over the sweep."""
    from gapstress.oracle.scenes import GapScene, solve_gap

    out = {}
    for eps in SWEEP_EPS:
        g = GapGeometry(2, eps, 1.0, GAP_R0)
        scene = GapScene(g)
        out[eps] = (g, {alpha: solve_gap(scene, alpha) for alpha in (1, 2)})
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
