"""Dense linear-algebra kernel for the small saddle systems of this package.

Everything here is at most a few hundred rows, so the routines wrap
LAPACK through numpy/scipy while enforcing the package's error
contracts (explicit singularity and SPD failures).
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

__all__ = [
    "SingularMatrixError",
    "NotSPDError",
    "solve_dense",
    "smallest_singular_value",
    "spd_inverse_quadratic",
    "cholesky_lower",
]

PIVOT_RTOL = 1e-14


class SingularMatrixError(np.linalg.LinAlgError):
    """A pivot fell below the singularity threshold during LU."""


class NotSPDError(np.linalg.LinAlgError):
    """Cholesky failed: the matrix is not symmetric positive definite."""


def _as_square(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    return A


def solve_dense(A, rhs) -> np.ndarray:
    """Solve A z = rhs by partially pivoted LU.

    Raises SingularMatrixError when a pivot magnitude drops below
    PIVOT_RTOL times the infinity norm of A.
    """
    A = _as_square(A)
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape[0] != A.shape[0]:
        raise ValueError("rhs length must match matrix size")
    norm = np.linalg.norm(A, np.inf)
    lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if norm == 0.0 or np.min(pivots) < PIVOT_RTOL * norm:
        raise SingularMatrixError("matrix is singular to working precision")
    return scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)


def smallest_singular_value(A) -> float:
    """sigma_min(A) >= 0 (full SVD of a small dense matrix)."""
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return float("inf")
    return float(np.linalg.svd(A, compute_uv=False)[-1])


def cholesky_lower(G) -> np.ndarray:
    """Lower Cholesky factor of an SPD matrix; NotSPDError on failure."""
    G = _as_square(G)
    try:
        return scipy.linalg.cholesky(G, lower=True, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise NotSPDError(str(exc)) from exc


def spd_inverse_quadratic(G, r) -> float:
    """sqrt(r^T G^{-1} r) for SPD G, via Cholesky.

    This is the dual norm of the functional with coefficient vector r
    against a basis whose Gram matrix is G.
    """
    L = cholesky_lower(G)
    y = scipy.linalg.solve_triangular(L, np.asarray(r, dtype=float),
                                      lower=True, check_finite=False)
    return float(np.sqrt(max(y @ y, 0.0)))
