import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gapstress.checks import random_gap_points, residual_fd_order
from gapstress.coefficients import coefficients, derive_coefficients, failing_identities
from gapstress.fields import (correction_field, grad_u_bar, momentum_residual, p_bar, sample,
                              stokes_defect, stress_at, u_bar)
from gapstress.geometry import GapGeometry, mode_count, psi

F = Fraction


def test_coefficients_n2_kappa1():
    c = coefficients(2, 1)
    assert (c.a1, c.a2, c.b1, c.b2, c.b3, c.b4, c.b5, c.b6) == (6, -2, -4, F(1, 2), -5, 4, -12, 1)


def test_coefficients_n3_kappa_half():
    c = coefficients(3, F(1, 2))
    assert (c.a1, c.b1, c.b2, c.b4, c.b5, c.b6) == (3, F(-12, 5), F(3, 5), F(16, 5), -6, F(6, 5))


@given(st.integers(2, 12), st.fractions(min_value=F(1, 100), max_value=100))
def test_coefficient_relations(n, kappa):
    c = coefficients(n, kappa)
    assert c.b1 + 4 * c.kappa * c.b6 == 0
    assert 2 * c.b2 - c.b6 == 0
    assert c == derive_coefficients(n, kappa)
    assert failing_identities(c) == []


def test_wrong_b3_is_named():
    assert "b3" in failing_identities(coefficients(2, 1).replace(b3=-4))


def test_correction_field_examples():
    g3 = GapGeometry(3, 0.01, 1.0, 0.5)
    assert np.array_equal(correction_field(g3, 6, [0.1, 0.05, 0.001]), [0.0, 0.0, 0.0])
    g = GapGeometry(2, 0.1, 1.0, 0.5)
    assert np.allclose(correction_field(g, 1, [0.0, 0.02]), [0.0, 0.0])
    assert np.allclose(correction_field(g, 1, [0.1, 0.03]), [0.0, 0.2])


def test_u_bar_examples():
    g = GapGeometry(2, 0.1, 1.0, 0.5)
    assert np.allclose(u_bar(g, 1, 1, [0.0, 0.05]), [1.0, 0.0])
    assert np.allclose(u_bar(g, 1, 1, [0.0, -0.05]), [0.0, 0.0])
    assert np.allclose(u_bar(g, 1, 1, [0.0, 0.0]), [0.5, 0.0])


@settings(max_examples=30)
@given(st.integers(2, 4), st.data())
def test_u_bar_wall_values(n, data):
    """Particle 1 fields equal psi on the upper wall and vanish on the lower one."""
    g = GapGeometry(n, 1e-3, 1.0, 0.2)
    alpha = data.draw(st.integers(1, mode_count(n)))
    xp = np.array(data.draw(st.lists(st.floats(-0.1, 0.1), min_size=n - 1, max_size=n - 1)))
    half = 0.5 * (g.eps + 2 * g.kappa * xp @ xp)
    top, bottom = np.append(xp, half), np.append(xp, -half)
    assert np.allclose(u_bar(g, 1, alpha, top), psi(alpha, top), atol=1e-12)
    assert np.allclose(u_bar(g, 1, alpha, bottom), 0.0, atol=1e-12)
    assert np.allclose(u_bar(g, 2, alpha, bottom), psi(alpha, bottom), atol=1e-12)


def test_p_bar_examples():
    g = GapGeometry(2, 0.1, 1.0, 0.5)
    assert p_bar(g, 1, 1, [0.1, 0.0]) == 0.0
    assert p_bar(g, 1, 1, [0.1, 0.03]) == pytest.approx(0.03 * 0.4 / 0.12**2)
    g3 = GapGeometry(3, 0.01, 1.0, 0.5)
    assert p_bar(g3, 1, 6, [0.1, 0.05, 0.001]) == 0.0


def test_grad_along_axis():
    eps = 0.01
    g = GapGeometry(2, eps, 1.0, 0.5)
    J = grad_u_bar(g, 1, 1, [0.0, 0.002])
    assert J[0, 1] == pytest.approx(1.0 / eps)


def test_grad_matches_complex_step():
    g = GapGeometry(3, 1e-3, 0.7, 0.2)
    x = random_gap_points(g, 20, np.random.default_rng(1))
    h = 1e-30
    for alpha in range(1, 7):
        J = grad_u_bar(g, 1, alpha, x)
        for b in range(3):
            step = np.zeros(3, dtype=complex)
            step[b] = 1j * h
            fd = np.imag(u_bar(g, 1, alpha, x + step, check=False)) / h
            assert np.allclose(J[..., b], fd, rtol=1e-10, atol=1e-10 * np.abs(J).max())


def test_rotation_gradient_scaling():
    """Peak gradient of the tilting rotation over |x'| <= sqrt(eps) grows like eps^-1/2."""
    peaks = []
    for eps in (1e-2, 1e-4):
        g = GapGeometry(2, eps, 1.0, 0.5)
        xs = np.linspace(-math.sqrt(eps), math.sqrt(eps), 201)
        J = grad_u_bar(g, 1, 3, np.column_stack([xs, 0 * xs]))
        peaks.append(np.linalg.norm(J, axis=(1, 2)).max())
    slope = math.log(peaks[1] / peaks[0]) / math.log(1e-4 / 1e-2)
    assert abs(slope + 0.5) <= 0.1


def test_residual_zero_cases():
    g = GapGeometry(3, 1e-2, 1.0, 0.5)
    x = [0.05, -0.03, 0.001]
    for alpha in (1, 2, 3):
        assert momentum_residual(g, 1, alpha, 3, x) == 0.0
    for j in (1, 2, 3):
        assert momentum_residual(g, 1, 6, j, x) == 0.0


def test_residual_example():
    g = GapGeometry(2, 0.1, 1.0, 0.5)
    d = 0.12
    expected = -0.03 * (4 / d**2 - 32 * 0.01 / d**3)
    assert momentum_residual(g, 1, 1, 1, [0.1, 0.03]) == pytest.approx(expected)
    assert expected == pytest.approx(-2.7778, abs=1e-4)


def test_residual_fd_order():
    """Closed residuals against central differences converge at second order."""
    for n in (2, 3):
        g = GapGeometry(n, 1e-3, 1.0, 0.2)
        x = random_gap_points(g, 30, np.random.default_rng(n), radius_factor=1.0)
        for alpha in range(1, mode_count(n) + 1):
            for j in range(1, n + 1):
                order, _ = residual_fd_order(g, alpha, j, x)
                assert order >= 1.9


def test_stokes_defect_is_small_against_pressure_gradient():
    """The pair nearly solves Stokes: the defect is far below the pressure gradient."""
    from gapstress.fields import grad_p_bar

    g = GapGeometry(2, 1e-4, 1.0, 0.2)
    x = random_gap_points(g, 40, np.random.default_rng(3), radius_factor=0.05)
    defect = stokes_defect(g, 1, 2, x)
    gp = grad_p_bar(g, 1, 2, x)
    assert np.abs(defect).max() < 1e-2 * np.abs(gp).max()


def test_printed_residual_differs_for_tilt():
    """The commonly quoted residual omits a term for the tilting rotation."""
    g = GapGeometry(2, 1e-3, 1.0, 0.2)
    x = np.array([[0.01, 0.0002]])
    printed = momentum_residual(g, 1, 3, 1, x, form="printed")
    derived = momentum_residual(g, 1, 3, 1, x, form="derived")
    assert not np.allclose(printed, derived)
    order, _ = residual_fd_order(g, 3, 1, x)
    assert order >= 1.9


def test_stress_trace_and_symmetry():
    g = GapGeometry(3, 1e-3, 1.0, 0.2)
    x = random_gap_points(g, 50, np.random.default_rng(7))
    for alpha in range(1, 7):
        s = sample(g, 1, alpha, x)
        assert np.array_equal(s.stress, np.swapaxes(s.stress, -1, -2))
        tr = np.trace(s.stress, axis1=-2, axis2=-1)
        scale = np.linalg.norm(s.stress, axis=(-2, -1)) + np.abs(s.pressure)
        assert np.all(np.abs(tr + 3 * s.pressure) <= 1e-10 * scale)


def test_center_pressure_vertical_mode():
    eps = 1e-4
    g = GapGeometry(2, eps, 1.0, 0.2)
    s = sample(g, 1, 2, [0.0, 0.0])
    a1 = 6.0
    assert s.pressure == pytest.approx(-a1 / (4 * eps**2), rel=1e-12)
    sigma = stress_at(g, 1, 2, [0.0, 0.0])
    assert sigma[0, 0] == pytest.approx(-s.pressure, rel=1e-3)
    assert np.abs(2 * s.strain).max() < 1e-3 * abs(s.pressure)
