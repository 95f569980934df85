import numpy as np
import pytest

from seisop import solve_linear, solve_sym_generalized_eig
from seisop.linalg import LinAlgError


def test_eig_diagonal_pair():
    K = np.diag([4.0, 9.0, 16.0])
    M = np.eye(3)
    lam, Phi = solve_sym_generalized_eig(K, M)
    assert np.allclose(lam, [4.0, 9.0, 16.0])
    assert np.allclose(np.abs(Phi), np.eye(3))


def test_eig_mass_normalization_and_residual():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((6, 6))
    K = A @ A.T + 6 * np.eye(6)
    B = rng.standard_normal((6, 6))
    M = B @ B.T + 6 * np.eye(6)
    lam, Phi = solve_sym_generalized_eig(K, M)
    assert np.all(np.diff(lam) >= 0)
    assert np.allclose(Phi.T @ M @ Phi, np.eye(6), atol=1e-10)
    assert np.allclose(K @ Phi, M @ Phi @ np.diag(lam), atol=1e-8 * np.abs(K).max())


def test_eig_five_story_characteristic_polynomial():
    # frequencies of the 5-story chain must be roots of det(K - w^2 M),
    # checked by a sign-change scan of the characteristic polynomial
    from seisop import paper_building

    b = paper_building()
    K = b.elastic_stiffness_matrix()
    M = b.mass_matrix()
    omega, _ = b.modes()
    for w in omega:
        lo, hi = (w * 0.999) ** 2, (w * 1.001) ** 2
        d_lo = np.linalg.det(K - lo * M)
        d_hi = np.linalg.det(K - hi * M)
        assert d_lo * d_hi < 0, f"no sign change around omega={w}"


def test_eig_rejects_asymmetric_and_indefinite():
    M = np.eye(2)
    with pytest.raises(LinAlgError):
        solve_sym_generalized_eig(np.array([[1.0, 2.0], [0.0, 1.0]]), M)
    with pytest.raises(LinAlgError):
        solve_sym_generalized_eig(np.eye(2), np.diag([1.0, -1.0]))


def test_solve_linear_matches_numpy():
    rng = np.random.default_rng(1)
    A = rng.standard_normal((8, 8)) + 8 * np.eye(8)
    b = rng.standard_normal(8)
    x = solve_linear(A, b)
    assert np.allclose(A @ x, b, atol=1e-10)


def test_solve_linear_singular():
    A = np.array([[1.0, 2.0], [2.0, 4.0]])
    with pytest.raises(LinAlgError), np.errstate(all="ignore"):
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            solve_linear(A, np.ones(2))
