"""Dense kernels: Cholesky factorization and quadratic forms.

Everything here works on small dense numpy arrays; no sparsity is assumed.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NotSPD

# Pivots must exceed this fraction of the largest diagonal entry.
SPD_TOLERANCE = 1e-12


def cholesky(sigma, tol: float = SPD_TOLERANCE) -> np.ndarray:
    """Return lower-triangular ``L`` with ``L @ L.T == sigma``.

    Plain left-looking Cholesky. Raises :class:`NotSPD` as soon as a pivot
    drops to ``tol * max(diag(sigma))`` or below, which also rejects
    semidefinite matrices.
    """
    a = np.array(sigma, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if not np.all(np.isfinite(a)):
        raise NotSPD("matrix has non-finite entries")
    if not np.array_equal(a, a.T):
        raise NotSPD("matrix is not symmetric")
    if n == 0:
        return a
    scale = float(np.max(np.diag(a)))
    if scale <= 0.0:
        raise NotSPD("matrix has no positive diagonal entry")
    threshold = tol * scale

    L = np.zeros_like(a)
    for j in range(n):
        row = L[j, :j]
        pivot = a[j, j] - row @ row
        if not pivot > threshold:
            raise NotSPD(f"pivot {j} is {pivot:.3e} (threshold {threshold:.3e})")
        d = np.sqrt(pivot)
        L[j, j] = d
        if j + 1 < n:
            L[j + 1:, j] = (a[j + 1:, j] - L[j + 1:, :j] @ row) / d
    return L


def chol_times_transpose(L: np.ndarray, x) -> np.ndarray:
    """``L.T @ x`` with a dimension check."""
    x = np.asarray(x, dtype=float)
    if x.shape != (L.shape[0],):
        raise DimensionMismatch(f"vector of length {x.shape} vs factor of order {L.shape[0]}")
    return L.T @ x


def quad_form(L: np.ndarray, x) -> float:
    """x'Σx for Σ = L L', evaluated as the squared norm of L'x."""
    w = chol_times_transpose(L, x)
    return float(w @ w)


def sqrt_quad_form(L: np.ndarray, x) -> float:
    """sqrt(x'Σx) as ``||L'x||``; nonnegative under rounding."""
    return float(np.linalg.norm(chol_times_transpose(L, x)))


def solve_lower(L: np.ndarray, rhs) -> np.ndarray:
    """Forward substitution for ``L y = rhs``."""
    rhs = np.asarray(rhs, dtype=float)
    n = L.shape[0]
    if rhs.shape != (n,):
        raise DimensionMismatch(f"rhs of shape {rhs.shape} vs factor of order {n}")
    y = np.zeros(n)
    for i in range(n):
        y[i] = (rhs[i] - L[i, :i] @ y[:i]) / L[i, i]
    return y


def inverse_quad_form(L: np.ndarray, v) -> float:
    """v'Σ⁻¹v via one triangular solve: with L y = v, v'Σ⁻¹v = ||y||²."""
    y = solve_lower(L, v)
    return float(y @ y)
