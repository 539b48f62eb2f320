import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gapstress.geometry import (DomainError, GapGeometry, SingularityError, all_modes, decode_mode,
                                delta, encode_mode, frak_g, in_region, mode_count, on_wall, psi,
                                psi_gradient)


def test_delta_examples():
    assert delta(GapGeometry(2, 0.1, 1.0, 0.5), [0.0]) == pytest.approx(0.1)
    assert delta(GapGeometry(2, 0.01, 1.0, 0.5), [0.1]) == pytest.approx(0.03)
    assert delta(GapGeometry(3, 0.0, 2.0, 0.5), [0.1, 0.1]) == pytest.approx(0.08)


def test_frak_g_examples():
    g = GapGeometry(2, 0.1, 1.0, 0.5)
    assert frak_g(g, [0.0, 0.05]) == pytest.approx(0.5)
    assert frak_g(g, [0.3, 0.0]) == 0.0
    assert frak_g(g, [0.1, 0.03]) == pytest.approx(0.25)


def test_frak_g_rejects_touching_point():
    with pytest.raises(SingularityError):
        frak_g(GapGeometry(2, 0.0, 1.0, 0.5), [0.0, 0.0])


def test_psi_examples():
    assert np.array_equal(psi(2, [0.3, -0.2, 0.7]), [0.0, 1.0, 0.0])
    assert np.array_equal(psi(3, [1.0, 2.0]), [2.0, -1.0])
    assert np.array_equal(psi(6, [1.0, 2.0, 3.0]), [2.0, -1.0, 0.0])


def test_in_region_examples():
    g = GapGeometry(2, 0.1, 1.0, 0.5)
    assert in_region(g, 0.5, [0.0, 0.04])
    assert not in_region(g, 0.5, [0.0, 0.05])
    assert not in_region(g, 0.5, [0.6, 0.0])


def test_on_wall_sides():
    g = GapGeometry(2, 0.1, 1.0, 0.5)
    assert on_wall(g, [0.1, 0.06]) == 1
    assert on_wall(g, [0.1, -0.06]) == -1
    assert on_wall(g, [0.1, 0.0]) == 0


def test_mode_ordering():
    assert [m.describe() for m in all_modes(3)] == [
        "e_1", "e_2", "e_3", "x_3 e_1 - x_1 e_3", "x_3 e_2 - x_2 e_3", "x_2 e_1 - x_1 e_2"]
    assert decode_mode(4, 8).pair == (1, 2)
    assert decode_mode(4, 10).pair == (2, 3)


def test_geometry_validation():
    with pytest.raises(DomainError):
        GapGeometry(1, 0.1, 1.0, 0.5)
    with pytest.raises(DomainError):
        GapGeometry(2, -0.1, 1.0, 0.5)
    with pytest.raises(DomainError):
        GapGeometry(2, 1.0, 1.0, 0.5)
    with pytest.raises(DomainError):
        decode_mode(2, 4)


@given(st.integers(2, 8).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n * (n + 1) // 2))))
def test_encode_inverts_decode(case):
    n, alpha = case
    assert encode_mode(decode_mode(n, alpha)) == alpha


@settings(max_examples=50)
@given(st.integers(2, 6), st.data())
def test_psi_is_rigid(n, data):
    """Every mode has an antisymmetric gradient and is linear in x."""
    alpha = data.draw(st.integers(1, mode_count(n)))
    x = np.array(data.draw(st.lists(st.floats(-2, 2), min_size=n, max_size=n)))
    grad = psi_gradient(alpha, n)
    assert np.array_equal(grad, -grad.T)
    base = psi(alpha, np.zeros(n))
    assert np.allclose(psi(alpha, x), base + grad @ x)
