import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gapstress import stiffness as S
from gapstress.checks import random_system
from gapstress.stress import fit_geometry_constant


def random_spd_system(rng, m, scale=1.0):
    """Block system assembled from a random SPD Gram matrix of 2m fields."""
    G = rng.normal(size=(2 * m, 2 * m + 3))
    gram = scale * (G @ G.T) / (2 * m)
    background = rng.normal(size=2 * m)
    system, _ = S.system_from_gram(gram, background)
    return system


def test_block_example_with_regular_d():
    I = np.eye(3)
    system = S.StiffnessSystem(I, I, I, 2 * I, [1, 2, 3], [1, 2, 3])
    X1, X2 = S.solve_block_system(system)
    assert np.allclose(X1, 0.0, atol=1e-15)
    assert np.allclose(X2, [1, 2, 3])


def test_identity_blocks_are_singular():
    I = np.eye(3)
    with pytest.raises(S.SingularSystemError):
        S.solve_block_system(S.StiffnessSystem(I, I, I, I, [1, 2, 3], [2, 4, 6]))


def test_equal_potentials_give_no_difference():
    I = np.eye(4)
    b = np.array([0.3, -1.0, 2.0, 0.5])
    X1, X2 = S.solve_block_system(S.StiffnessSystem(2 * I, I, I, 3 * I, b, b))
    assert np.allclose(X1 + 0 * X2, S.cramer_solve(2 * I, b - X2))


def test_scalar_cramer():
    system = S.StiffnessSystem([[2.0]], [[1.0]], [[1.0]], [[3.0]], [5.0], [5.0])
    X1, X2 = S.solve_block_system(system)
    assert (X1[0], X2[0]) == pytest.approx((1.0, 3.0))
    assert S.cramer_c2(system)[0] == pytest.approx(3.0)
    assert S.cramer_solve([[2.0, 1.0], [1.0, 3.0]], [5.0, 10.0]) == pytest.approx([1.0, 3.0])


def test_cramer_matches_lu_on_random_systems(rng):
    worst = 0.0
    for _ in range(100):
        size = int(rng.integers(1, 16))
        M, y = random_system(rng, size)
        x = np.linalg.solve(M, y)
        worst = max(worst, np.linalg.norm(S.cramer_solve(M, y) - x) / np.linalg.norm(x))
    assert worst <= 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([3, 6, 10]))
def test_exact_paths_match_lu(seed, m):
    rng = np.random.default_rng(seed)
    system = random_spd_system(rng, m)
    X1, X2 = S.solve_block_system(system)
    assert S.block_residual(system, X1, X2) <= 1e-10
    assert np.allclose(S.cramer_c2(system), X2, rtol=1e-9, atol=1e-9 * np.abs(X2).max())
    factors = S.reduced_blowup(system, X2)
    diff = S.cramer_c1_minus_c2(system.A, factors)
    assert np.allclose(diff, X1, rtol=1e-9, atol=1e-9 * np.abs(X1).max())
    assert np.allclose(system.A @ X1, factors)


def test_c_block_is_b_transpose_after_symmetrizing(rng):
    system = random_spd_system(rng, 6)
    assert np.array_equal(system.C, system.B.T)
    assert system.symmetry_defects() == {"A": 0.0, "D": 0.0, "C-B^T": 0.0}


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 100.0))
def test_linear_in_boundary_data(seed, factor):
    system = random_spd_system(np.random.default_rng(seed), 3)
    X1, X2 = S.solve_block_system(system)
    Y1, Y2 = S.solve_block_system(system.scaled(factor))
    assert np.allclose(Y1, factor * X1, rtol=1e-9, atol=1e-12 * factor)
    assert np.allclose(Y2, factor * X2, rtol=1e-9, atol=1e-12 * factor)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.permutations([7, 8, 9]))
def test_rotation_relabelling_invariance(seed, perm):
    """n = 4: permuting the purely horizontal rotations permutes C2 with them."""
    system = random_spd_system(np.random.default_rng(seed), 10)
    order = np.r_[np.arange(7), perm]
    P = lambda M: np.asarray(M)[np.ix_(order, order)]
    permuted = S.StiffnessSystem(P(system.A), P(system.B), P(system.C), P(system.D),
                                 system.b1[order], system.b2[order])
    assert np.allclose(S.cramer_c2(permuted), S.cramer_c2(system)[order], rtol=1e-9, atol=1e-12)


def test_difference_examples():
    A = np.diag([2.0, 3.0, 5.0])
    assert np.array_equal(S.cramer_c1_minus_c2(A, np.zeros(3)), np.zeros(3))
    assert S.cramer_c1_minus_c2(A, 0.7 * np.diag(A)) == pytest.approx([0.7, 0.7, 0.7])
    assert S.cramer_c1_minus_c2(A, 0.7 * np.diag(A), "reduced", n=2) == pytest.approx([0.7, 0.7, 0.7])
    factors = S.BlowupFactors(0.7 * np.diag(A), "truncated")
    assert S.cramer_c1_minus_c2(A, factors) == pytest.approx([0.7, 0.7, 0.7])


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_reduced_path_exact_without_translation_difference(seed):
    """When C1 - C2 has no translation part the reduced C2 path is exact."""
    rng = np.random.default_rng(seed)
    base = random_spd_system(rng, 3)
    X1 = np.array([0.0, 0.0, rng.normal()])
    X2 = rng.normal(size=3)
    b1 = base.A @ X1 + base.B @ X2
    b2 = base.C @ X1 + base.D @ X2 - b1
    system = S.StiffnessSystem(base.A, base.B, base.C, base.D, b1, b2)
    assert np.allclose(S.cramer_c2(system, "reduced"), X2, rtol=1e-8, atol=1e-10)
    assert np.allclose(S.cramer_c2(system, "exact"), X2, rtol=1e-8, atol=1e-10)


def test_singular_denominator_raises():
    with pytest.raises(S.SingularSystemError):
        S.cramer_solve(np.ones((3, 3)), np.ones(3))


def test_ill_conditioned_warns():
    M = np.diag([1.0, 1e-13])
    with pytest.warns(RuntimeWarning):
        S.cramer_solve(M, [1.0, 1.0])


def test_blowup_factor_validation():
    with pytest.raises(ValueError):
        S.BlowupFactors([1.0, np.nan])
    with pytest.raises(ValueError):
        S.BlowupFactors([1.0], "guessed")


def test_limit_of_constant_sequence():
    sweep = [(e, [2.5, -1.0]) for e in (1e-2, 1e-3, 1e-4)]
    value, err = S.limit_constants(sweep)
    assert np.array_equal(value, [2.5, -1.0])
    assert np.array_equal(err, [0.0, 0.0])


def test_limit_of_slow_power():
    eps = [4.0**-k for k in range(3, 6)]
    value, err = S.limit_constants([(e, 3.0 + e ** (1 / 12)) for e in eps])
    assert abs(value[0] - 3.0) <= 2 * min(eps) ** (1 / 12)
    assert value[0] == pytest.approx(3.0, abs=1e-9)


def test_limit_rejects_growing_differences():
    sweep = [(1e-2, 1.0), (1e-3, 1.1), (1e-4, 1.5)]
    with pytest.raises(S.NonConvergentSweepError):
        S.limit_constants(sweep)
    value, err = S.limit_constants(sweep, strict=False)
    assert value[0] == 1.5 and err[0] == pytest.approx(0.4)
    with pytest.raises(ValueError):
        S.limit_constants(sweep[:2])
    with pytest.raises(ValueError):
        S.limit_constants([(1e-2, 1.0), (1e-3, 1.1), (2e-4, 1.15)])


def test_geometry_constant_synthetic():
    eps = [4.0**-k for k in range(4, 7)]
    lead = 5.0
    kappa = np.pi / 2 / lead**2
    fit = fit_geometry_constant([(e, lead * e**-0.5 + 7.0 + e ** (1 / 12)) for e in eps], 2, 1, kappa,
                                k_n=-2.0)
    assert fit["lead"] == pytest.approx(5.0)
    assert abs(fit["value"] - 7.0) <= 2 * min(eps) ** (1 / 12)
    assert fit["M_star"] == pytest.approx(fit["value"] + 2.0)


def test_determinant_ratios_decoupled():
    A = np.diag([2.0, 4.0, 8.0])
    f = np.array([1.0, 2.0, 3.0])
    ratios = S.determinant_ratios(A, f, 2)
    # translation: det [[f_a, 0], [f_3, a_33]] / a_33 = f_a; rotation: f_3 / a_33
    assert ratios == pytest.approx({1: 1.0, 2: 2.0, 3: 3.0 / 8.0})
