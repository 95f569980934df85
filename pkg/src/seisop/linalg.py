"""Dense linear algebra on small structural matrices.

Thin wrappers around LAPACK (via scipy) that add the contracts this
codebase relies on: symmetry checks, ascending mass-normalized modes,
and informative failures (offending leading minor, pivot index).
Intended for matrices up to a few dozen rows.
"""

import numpy as np
import scipy.linalg

SYM_TOL = 1e-12
MAX_DIM = 64


class LinAlgError(Exception):
    pass


def _check_symmetric(A, name):
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise LinAlgError(f"{name} must be square, got shape {A.shape}")
    scale = np.max(np.abs(A)) or 1.0
    if np.max(np.abs(A - A.T)) > SYM_TOL * scale:
        raise LinAlgError(f"{name} is not symmetric to within {SYM_TOL} relative")
    return A


def _failing_leading_minor(M):
    """Index (1-based) of the first non-positive-definite leading minor."""
    for k in range(1, M.shape[0] + 1):
        try:
            np.linalg.cholesky(M[:k, :k])
        except np.linalg.LinAlgError:
            return k
    return None


def solve_sym_generalized_eig(K, M):
    """Eigenpairs of K phi = lam M phi for symmetric K and SPD M.

    Returns (lam, Phi) with lam ascending and Phi mass-normalized,
    i.e. Phi.T @ M @ Phi = I.
    """
    K = _check_symmetric(K, "K")
    M = _check_symmetric(M, "M")
    n = K.shape[0]
    if M.shape[0] != n:
        raise LinAlgError(f"dimension mismatch: K is {n}x{n}, M is {M.shape[0]}x{M.shape[0]}")
    if n > MAX_DIM:
        raise LinAlgError(f"dimension {n} exceeds supported maximum {MAX_DIM}")
    minor = _failing_leading_minor(M)
    if minor is not None:
        raise LinAlgError(
            f"M is not positive definite: leading minor of order {minor} is not positive"
        )
    lam, Phi = scipy.linalg.eigh(K, M)

    # verify the contract before handing the pencil back
    ortho_err = np.max(np.abs(Phi.T @ M @ Phi - np.eye(n)))
    res = np.max(np.abs(K @ Phi - M @ Phi @ np.diag(lam)))
    res_rel = res / max(np.max(np.abs(K)), 1.0)
    if ortho_err > 1e-10 or res_rel > 1e-8:
        raise LinAlgError(
            f"eigensolver did not converge: orthonormality error {ortho_err:.2e}, "
            f"relative residual {res_rel:.2e}"
        )
    return lam, Phi


def solve_linear(A, b):
    """Solve A x = b for square nonsingular A (LU with partial pivoting)."""
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise LinAlgError(f"A must be square, got shape {A.shape}")
    lu, piv = scipy.linalg.lu_factor(A, check_finite=True)
    diag = np.abs(np.diag(lu))
    scale = np.max(np.abs(A)) or 1.0
    small = np.nonzero(diag <= np.finfo(np.float64).eps * A.shape[0] * scale)[0]
    if small.size:
        raise LinAlgError(f"matrix is singular to working precision at pivot {small[0]}")
    return scipy.linalg.lu_solve((lu, piv), b)
