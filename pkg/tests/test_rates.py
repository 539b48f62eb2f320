import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gapstress import rates
from gapstress.geometry import DomainError, GapGeometry


def test_rate_examples():
    assert rates.rho(2, 1e-4) == pytest.approx(100.0)
    assert rates.rho(3, 1e-4) == pytest.approx(math.log(1e4))
    assert rates.rho(5, 1e-4) == 1.0
    assert rates.r_eps(2, 1e-4) == pytest.approx(0.681292, abs=1e-6)
    assert rates.l_alpha(1, 3, 2.0) == 2.0
    assert rates.l_alpha(3, 3, 2.0) == 4.0


def test_rate_domains():
    with pytest.raises(DomainError):
        rates.rho(3, 0.5)
    with pytest.raises(DomainError):
        rates.omega(4, 1e-3)
    with pytest.raises(DomainError):
        rates.varrho(3, 2, 1e-3)
    assert rates.omega(2, 1e-3) == pytest.approx(math.log(1e3))
    assert rates.varrho(1, 2, 1e-4) == pytest.approx(1e-4 ** (1 / 24))


def test_closed_form_values():
    # reference values from mpmath quadrature at 30 digits
    assert rates.gap_integral_closed(2, 1e-4, 1.0, 0.5) == pytest.approx(220.14428022525396, rel=1e-13)
    assert rates.gap_integral_closed(3, 1e-4, 1.0, 0.5) == pytest.approx(math.pi / 2 * math.log(5001), rel=1e-14)
    assert rates.gap_integral_closed(3, 1e-4, 1.0, 0.5) == pytest.approx(13.379, abs=1e-3)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("eps", [1e-2, 1e-4, 1e-6, 1e-8])
def test_quadrature_matches_closed_form(n, eps):
    closed = rates.gap_integral_closed(n, eps, 1.0, 0.5)
    assert rates.gap_integral_quadrature(n, eps, 1.0, 0.5) == pytest.approx(closed, rel=1e-9)


def test_weighted_quadrature_values():
    # int_{-1/2}^{1/2} x^2 / (2 x^2) dx = 1/2
    assert rates.gap_integral_quadrature(2, 0.0, 1.0, 0.5, weight="xk2") == pytest.approx(0.5, rel=1e-12)
    # n = 3, |x'|^2 weight: 2 pi int r^3 / (eps + 2 r^2) dr in closed form
    eps, r0 = 1e-4, 0.5
    exact = 2 * math.pi * (r0**2 / 4 - eps / 8 * math.log1p(2 * r0**2 / eps))
    assert rates.gap_integral_quadrature(3, eps, 1.0, r0, weight="r2") == pytest.approx(exact, rel=1e-10)
    with pytest.raises(DomainError):
        rates.gap_integral_quadrature(2, 0.0, 1.0, 0.5)


def test_asymptotic_defect_decreases():
    for n in (2, 3):
        defects = [abs(rates.asymptotic_defect(n, 10.0**-k, 1.0, 0.5, corrected=True)) for k in range(2, 9)]
        assert all(b < a for a, b in zip(defects, defects[1:]))
        closed = [rates.gap_integral_closed(n, 10.0**-k, 1.0, 0.5) for k in range(2, 9)]
        asym = [rates.gap_integral_asymptotic(n, 10.0**-k, 1.0, 0.5, corrected=True) for k in range(2, 9)]
        assert all(abs(c - a - d) <= 1e-9 * c for c, a, d in zip(closed, asym,
                   [rates.asymptotic_defect(n, 10.0**-k, 1.0, 0.5, corrected=True) for k in range(2, 9)]))


def test_uncorrected_prefactor_for_n2():
    """The (pi / 2 kappa)^(1/2) lead misses the n = 2 integral by the factor sqrt(pi)."""
    eps = 1e-8
    closed = rates.gap_integral_closed(2, eps, 1.0, 0.5)
    plain = rates.gap_integral_asymptotic(2, eps, 1.0, 0.5)
    assert abs(closed - plain) / closed > 0.4
    lead_ratio = (closed - rates.k_const(2, 1.0, 0.5)) / (rates.leading_prefactor(2, 1.0) * rates.rho(2, eps))
    assert lead_ratio == pytest.approx(math.sqrt(math.pi), rel=1e-3)


@settings(max_examples=40)
@given(st.floats(0.1, 5.0), st.floats(0.1, 1.0), st.integers(3, 9))
def test_closed_form_monotone_in_eps(kappa, r0, k):
    eps = 10.0**-k
    if eps >= 2 * kappa * r0 * r0:
        return
    for n in (2, 3):
        assert rates.gap_integral_closed(n, eps / 2, kappa, r0) > rates.gap_integral_closed(n, eps, kappa, r0)


def test_leading_diagonal_example():
    g = GapGeometry(2, 1e-4, math.pi / 2, 0.5)
    assert rates.leading_a11_diag(g, 1, 0.0) == pytest.approx(100.0)
    assert rates.leading_a11_diag(g, 2, 0.0) == pytest.approx(200.0)


def test_tail_bound():
    assert rates.truncated_tail_bound(0.1, 1.0) == pytest.approx(10 * math.exp(-5))
    assert rates.truncated_tail_bound(0.1, 1.0) == pytest.approx(0.0674, abs=1e-4)
    assert rates.truncated_tail_bound(1e-3, 1.0) < 1e-200
