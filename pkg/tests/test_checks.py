import numpy as np

from gapstress import checks
from gapstress.geometry import GapGeometry, in_region


def test_random_points_inside_region():
    g = GapGeometry(3, 1e-3, 1.0, 0.2)
    x = checks.random_gap_points(g, 500, np.random.default_rng(0))
    assert np.all(in_region(g, 2 * g.r0, x))


def test_default_checks_pass():
    results = checks.run_all()
    assert [r.check_name for r in results] == ["coefficients", "divergence", "residuals",
                                               "quadrature", "cramer"]
    assert all(r.passed for r in results)


def test_injected_b3_is_reported():
    r = checks.check_coefficients(override={"b3": -4})
    assert not r.passed
    assert all("b3" in line for line in r.detail)


def test_quadrature_tolerance_is_used():
    r = checks.check_quadrature(tol=1e-16)
    assert r.status == "fail"
    assert r.tolerance == 1e-16
    assert r.worst_error > 1e-16
