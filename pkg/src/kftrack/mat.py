"""Small dense linear algebra kernel.

Matrices are 2-D ``float64`` numpy arrays; column vectors are ``(n, 1)``.
Every function returns a fresh array and never mutates its inputs.  The
inverse and determinant are computed by Gauss-Jordan / LU elimination with
partial pivoting written out here, so the singularity contract (pivot
threshold, failing column) is explicit rather than inherited from LAPACK.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NonFiniteError, ShapeError, SingularMatrixError

PIVOT_TOL = 1e-12

Matrix = np.ndarray


def matrix(data) -> Matrix:
    """Build a validated matrix from nested sequences or an array.

    1-D input is promoted to a column vector.
    """
    a = np.array(data, dtype=np.float64)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    elif a.ndim == 1:
        a = a.reshape(-1, 1)
    elif a.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got {a.ndim} dimensions")
    if a.size == 0:
        raise ShapeError(f"matrix must have positive dimensions, got {a.shape}")
    _check_finite(a, "matrix literal")
    return a


def column(values) -> Matrix:
    return matrix(np.asarray(values, dtype=np.float64).reshape(-1))


def identity(n: int) -> Matrix:
    return np.eye(n)


def _check_finite(a: Matrix, what: str) -> None:
    if not np.all(np.isfinite(a)):
        raise NonFiniteError(f"{what} contains non-finite entries")


def _as2d(a) -> Matrix:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got shape {a.shape}")
    return a


def _require_square(a: Matrix, op: str) -> None:
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"{op} requires a square matrix, got {a.shape[0]}x{a.shape[1]}")


def mat_mul(a, b) -> Matrix:
    a, b = _as2d(a), _as2d(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(
            f"cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}"
        )
    with np.errstate(over="ignore", invalid="ignore"):
        out = a @ b
    _check_finite(out, "matrix product")
    return out


def mat_add(a, b) -> Matrix:
    a, b = _as2d(a), _as2d(b)
    if a.shape != b.shape:
        raise ShapeError(f"cannot add {a.shape} and {b.shape}")
    out = a + b
    _check_finite(out, "matrix sum")
    return out


def mat_sub(a, b) -> Matrix:
    a, b = _as2d(a), _as2d(b)
    if a.shape != b.shape:
        raise ShapeError(f"cannot subtract {b.shape} from {a.shape}")
    out = a - b
    _check_finite(out, "matrix difference")
    return out


def mat_transpose(a) -> Matrix:
    return _as2d(a).T.copy()


def mat_inverse(a) -> Matrix:
    """Invert a square matrix by Gauss-Jordan elimination with partial pivoting.

    Raises SingularMatrixError when the chosen pivot has magnitude below
    ``PIVOT_TOL``; ``err.column`` is the column being eliminated.
    """
    a = _as2d(a)
    _require_square(a, "inverse")
    n = a.shape[0]
    aug = np.hstack([a, np.eye(n)])
    for k in range(n):
        p = k + int(np.argmax(np.abs(aug[k:, k])))
        pivot = aug[p, k]
        if abs(pivot) < PIVOT_TOL:
            raise SingularMatrixError(k, pivot)
        if p != k:
            aug[[k, p]] = aug[[p, k]]
        aug[k] /= pivot
        for i in range(n):
            if i != k and aug[i, k] != 0.0:
                aug[i] -= aug[i, k] * aug[k]
    out = aug[:, n:].copy()
    _check_finite(out, "matrix inverse")
    return out


def lu_pivots(a) -> tuple[list[float], int]:
    """Diagonal of U from partially pivoted LU, plus the number of row swaps.

    Elimination stops early (remaining pivots reported as 0.0) once a pivot
    falls below ``PIVOT_TOL``.
    """
    a = _as2d(a)
    _require_square(a, "LU factorization")
    u = a.copy()
    n = u.shape[0]
    swaps = 0
    pivots = []
    for k in range(n):
        p = k + int(np.argmax(np.abs(u[k:, k])))
        if abs(u[p, k]) < PIVOT_TOL:
            pivots.extend([0.0] * (n - k))
            break
        if p != k:
            u[[k, p]] = u[[p, k]]
            swaps += 1
        pivots.append(float(u[k, k]))
        factors = u[k + 1:, k] / u[k, k]
        u[k + 1:, k:] -= np.outer(factors, u[k, k:])
    return pivots, swaps


def mat_det(a) -> float:
    pivots, swaps = lu_pivots(a)
    det = -1.0 if swaps % 2 else 1.0
    for p in pivots:
        det *= p
    return det


def symmetrize(a) -> Matrix:
    a = _as2d(a)
    _require_square(a, "symmetrize")
    return 0.5 * (a + a.T)


def is_symmetric(a, tol: float = 1e-9) -> bool:
    a = _as2d(a)
    return a.shape[0] == a.shape[1] and bool(np.max(np.abs(a - a.T)) <= tol)


def cholesky_pivots(a) -> list[float]:
    """Squared diagonal entries of a Cholesky factorization of ``a``.

    Tolerates semidefinite input: a non-positive pivot whose remaining
    column is numerically zero is recorded and its column skipped.  A
    non-positive pivot with a nonzero column below it cannot come from a
    PSD matrix and is reported as ``-inf``.
    """
    a = _as2d(a)
    _require_square(a, "Cholesky factorization")
    n = a.shape[0]
    w = symmetrize(a)
    pivots = []
    for k in range(n):
        d = w[k, k]
        pivots.append(float(d))
        if d <= 0.0:
            scale = max(1.0, float(np.max(np.abs(np.diag(w)))))
            if np.any(np.abs(w[k + 1:, k]) > 1e-12 * scale):
                pivots[-1] = -math.inf
                pivots.extend([-math.inf] * (n - k - 1))
                break
            continue
        col = w[k + 1:, k] / d
        w[k + 1:, k + 1:] -= np.outer(col, w[k + 1:, k])
    return pivots


def cholesky(a) -> Matrix:
    """Lower-triangular factor L with L Lᵀ = a; requires strictly positive pivots."""
    a = _as2d(a)
    _require_square(a, "Cholesky factorization")
    n = a.shape[0]
    low = np.zeros_like(a)
    for j in range(n):
        d = a[j, j] - np.dot(low[j, :j], low[j, :j])
        if not d > 0.0:
            raise SingularMatrixError(j, d, "matrix is not positive definite")
        low[j, j] = math.sqrt(d)
        for i in range(j + 1, n):
            low[i, j] = (a[i, j] - np.dot(low[i, :j], low[j, :j])) / low[j, j]
    return low


def is_spd(a, tol: float = PIVOT_TOL) -> bool:
    """True iff every Cholesky pivot of ``a`` exceeds ``tol``.

    A negative ``tol`` turns this into a positive-semidefinite check with
    that much slack.
    """
    a = _as2d(a)
    if a.shape[0] != a.shape[1] or not is_symmetric(a, max(abs(tol), 1e-9)):
        return False
    return min(cholesky_pivots(a)) > tol
