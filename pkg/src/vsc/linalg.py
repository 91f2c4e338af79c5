"""Dense linear algebra for the readout: Gram products and ridge solves.

Matrices and vectors are plain float64 numpy arrays, validated (shape and
finiteness) at each public entry point.
"""
import numpy as np

from vsc import kernels
from vsc.errors import DimensionError, NumericalError, ShapeError, SingularMatrixError

SYMMETRY_RTOL = 1e-10
RESIDUAL_RTOL = 1e-8


def as_matrix(a, name="matrix"):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {a.shape}")
    if a.size == 0:
        raise DimensionError(f"{name} is empty")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def as_vector(v, name="vector"):
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise ShapeError(f"{name} must be 1-D, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite entries")
    return v


def gram(X):
    """Return ``X.T @ X``, bitwise symmetric."""
    return kernels.gram(as_matrix(X, "X"))


def spd_solve(A, b):
    """Solve ``A x = b`` for symmetric positive definite ``A`` via Cholesky.

    Raises ShapeError when ``A`` is not square or not symmetric to a relative
    1e-10, SingularMatrixError on a non-positive pivot.
    """
    A = as_matrix(A, "A")
    b = as_vector(b, "b")
    m = A.shape[0]
    if A.shape[1] != m:
        raise ShapeError(f"A must be square, got {A.shape}")
    if b.shape[0] != m:
        raise ShapeError(f"b has length {b.shape[0]}, expected {m}")
    scale = np.max(np.abs(A))
    if np.max(np.abs(A - A.T)) > SYMMETRY_RTOL * scale:
        raise ShapeError("A is not symmetric")
    L, bad = kernels.cholesky(np.ascontiguousarray(A))
    if bad >= 0:
        raise SingularMatrixError(f"non-positive pivot at index {bad}")
    return kernels.cho_solve(L, b)


def ridge_solve(X, y, lam):
    """Ridge readout: solve ``(X.T X + lam I) w = X.T y``.

    The identity is ``cols x cols``.  Every solution is checked against the
    residual bound ``|A w - X.T y|_inf <= 1e-8 (1 + |X.T y|_inf)``; a violation
    raises NumericalError instead of returning a bad ``w``.
    """
    X = as_matrix(X, "X")
    y = as_vector(y, "y")
    if X.shape[0] != y.shape[0]:
        raise ShapeError(f"X has {X.shape[0]} rows but y has length {y.shape[0]}")
    if not lam >= 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    A = kernels.gram(X)
    A[np.diag_indices_from(A)] += lam
    rhs = X.T @ y
    try:
        w = spd_solve(A, rhs)
    except SingularMatrixError as exc:
        raise SingularMatrixError(f"ridge system singular at lambda={lam}: {exc}") from None
    residual = np.max(np.abs(A @ w - rhs))
    bound = RESIDUAL_RTOL * (1.0 + np.max(np.abs(rhs)))
    if not residual <= bound:
        raise NumericalError(f"ridge residual {residual:.3e} exceeds bound {bound:.3e}")
    return w
