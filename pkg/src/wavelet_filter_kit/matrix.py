from __future__ import annotations

import warnings

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.linalg import LinAlgError, LinAlgWarning, cho_factor, lu_factor, lu_solve, qr

from .errors import DimensionError, InvariantError, SingularMatrixError

ComplexMatrix = NDArray[np.complex128]

TOL = 1e-9
GOLDEN_TOL = 1e-12
SINGULAR_CONDITION = 1e14


def as_matrix(value: ArrayLike) -> ComplexMatrix:
    matrix = np.atleast_2d(np.asarray(value, dtype=np.complex128))
    if matrix.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise InvariantError("matrix entries must be finite")
    return matrix


def identity(n: int) -> ComplexMatrix:
    return np.eye(n, dtype=np.complex128)


def mat_mul(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def adjoint(a: ComplexMatrix) -> ComplexMatrix:
    return a.conj().T


def frobenius_distance(a: ComplexMatrix, b: ComplexMatrix) -> float:
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def _condition_from_lu(a: ComplexMatrix, lu_piv) -> float:
    with np.errstate(all="ignore"):
        inverse = lu_solve(lu_piv, identity(a.shape[0]))
        condition = np.linalg.norm(a, 1) * np.linalg.norm(inverse, 1)
    return float(condition) if np.isfinite(condition) else float("inf")


def condition_estimate(a: ComplexMatrix) -> float:
    """1-norm condition number from a partial-pivot LU factorization."""
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"condition needs a square matrix, got {a.shape}")
    if a.shape[0] == 0:
        return 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu_piv = lu_factor(a, check_finite=False)
    if np.any(np.diag(lu_piv[0]) == 0):
        return float("inf")
    return _condition_from_lu(a, lu_piv)


def solve_linear(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"solve needs a square matrix, got {a.shape}")
    if a.shape[0] != b.shape[0]:
        raise DimensionError(f"right-hand side {b.shape} does not match {a.shape}")
    if a.shape[0] == 0:
        return np.zeros(b.shape, dtype=np.complex128)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu_piv = lu_factor(a, check_finite=False)
    if np.any(np.diag(lu_piv[0]) == 0):
        raise SingularMatrixError("matrix is singular")
    condition = _condition_from_lu(a, lu_piv)
    if condition > SINGULAR_CONDITION:
        raise SingularMatrixError("matrix is numerically singular", condition)
    return lu_solve(lu_piv, b)


def right_divide(b: ComplexMatrix, a: ComplexMatrix) -> ComplexMatrix:
    return adjoint(solve_linear(adjoint(a), adjoint(b)))


def orthonormal_columns(m: ComplexMatrix, tol: float) -> ComplexMatrix:
    if m.shape[1] == 0 or m.shape[0] == 0:
        return np.zeros((m.shape[0], 0), dtype=np.complex128)
    q, r, _ = qr(m, mode="economic", pivoting=True)
    rank = int(np.count_nonzero(np.abs(np.diag(r)) > tol))
    return q[:, :rank]


def numerical_rank(m: ComplexMatrix, rel_tol: float = TOL) -> int:
    scale = float(np.linalg.norm(m))
    if scale == 0.0:
        return 0
    return orthonormal_columns(m, rel_tol * scale).shape[1]


def is_positive_definite(h: ComplexMatrix) -> bool:
    if h.shape[0] == 0:
        return True
    try:
        cho_factor(0.5 * (h + adjoint(h)), lower=True, check_finite=True)
    except (LinAlgError, ValueError):
        return False
    return True
