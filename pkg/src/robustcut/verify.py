"""Independent oracles for checking the cutting-plane solver.

None of these functions call into :mod:`robustcut.cutting_plane`; each one
recomputes its quantity by a different route (sampling, the gradient of g,
grid scans, lattice enumeration) so agreement is meaningful evidence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePoint, LatticeTooLarge, NoFeasibleGridPoint, NoFeasiblePoint, ValidationError
from .model import EllipsoidalConstraint, RobustProblem

SAMPLE_CHUNK = 100_000
GRID_CHUNK = 1_000_000
MAX_LATTICE = 1_000_000


@dataclass(frozen=True)
class OracleResult:
    value: float
    argmax: np.ndarray
    samples: int


def support_value(con: EllipsoidalConstraint, x) -> float:
    """Analytic max of ã'x over the ellipsoid, from the raw covariance matrix."""
    x = np.asarray(x, dtype=float)
    return float(con.a @ x + con.beta * np.sqrt(max(float(x @ con.sigma @ x), 0.0)))


def sample_ellipsoid_max(con: EllipsoidalConstraint, x, num_samples: int,
                         seed: int | None = 0) -> OracleResult:
    """Monte-Carlo lower bound on ``max ã'x`` over the ellipsoid.

    Draws ``u`` uniformly on the unit sphere (normalized Gaussians), maps it to
    the boundary point ``a + beta * L u`` and keeps the best ``ã'x``.
    """
    if num_samples < 1:
        raise ValueError("num_samples must be at least 1")
    x = np.asarray(x, dtype=float)
    rng = np.random.default_rng(seed)
    n = con.n
    w = con.chol.T @ x
    base = float(con.a @ x)
    best_value = -np.inf
    best_u = None
    remaining = num_samples
    while remaining:
        size = min(remaining, SAMPLE_CHUNK)
        remaining -= size
        u = rng.standard_normal((size, n))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        values = base + con.beta * (u @ w)
        i = int(np.argmax(values))
        if values[i] > best_value:
            best_value = float(values[i])
            best_u = u[i]
    return OracleResult(best_value, con.a + con.beta * (con.chol @ best_u), num_samples)


def kelley_cut(con: EllipsoidalConstraint, x_nu) -> np.ndarray:
    """Gradient of g at ``x_nu``, i.e. the slope of its tangent plane.

    Computed directly from the raw matrix:
    ``grad g = a + beta * (Σ + Σ')x / (2 sqrt(x'Σx))``.
    """
    x_nu = np.asarray(x_nu, dtype=float)
    sigma = con.sigma
    q = float(x_nu @ sigma @ x_nu)
    if q <= 1e-14 * np.linalg.norm(sigma) * float(x_nu @ x_nu):
        raise DegeneratePoint("x'Σx vanishes at this point")
    grad_quad = (sigma + sigma.T) @ x_nu  # gradient of x'Σx
    return con.a + con.beta * grad_quad / (2.0 * np.sqrt(q))


def kelley_intercept(con: EllipsoidalConstraint, x_nu) -> float:
    """Constant term of the tangent plane ``g(x_nu) + grad'(x - x_nu)`` (b excluded).

    Vanishes because g + b is positively homogeneous; returned so callers can
    check that.
    """
    x_nu = np.asarray(x_nu, dtype=float)
    grad = kelley_cut(con, x_nu)
    return support_value(con, x_nu) - float(grad @ x_nu)


def _feasible_mask(problem: RobustProblem, X: np.ndarray) -> np.ndarray:
    """Rows of X (points) satisfying every certain and uncertain constraint."""
    ok = np.ones(X.shape[0], dtype=bool)
    for row in problem.certain:
        ok &= X @ row.coeffs <= row.rhs
    for con in problem.uncertain:
        quad = np.einsum("ij,jk,ik->i", X, con.sigma, X)
        g = X @ con.a + con.beta * np.sqrt(np.maximum(quad, 0.0)) - con.b
        ok &= g <= 0.0
    return ok


def _best_over(problem: RobustProblem, points_iter) -> tuple[float, np.ndarray | None]:
    best, arg = np.inf, None
    for X in points_iter:
        ok = _feasible_mask(problem, X)
        if not ok.any():
            continue
        obj = X[ok] @ problem.c
        i = int(np.argmin(obj))
        if obj[i] < best:
            best, arg = float(obj[i]), X[ok][i]
    return best, arg


def _cartesian_chunks(axes: list[np.ndarray], chunk: int):
    """Yield the product of ``axes`` as point blocks, first axis slowest."""
    n = len(axes)
    if n == 1:
        yield axes[0][:, None]
        return
    tail = np.stack(np.meshgrid(*axes[1:], indexing="ij"), axis=-1).reshape(-1, n - 1)
    per_block = max(1, chunk // tail.shape[0])
    for start in range(0, axes[0].size, per_block):
        head = axes[0][start:start + per_block]
        block = np.empty((head.size * tail.shape[0], n))
        block[:, 0] = np.repeat(head, tail.shape[0])
        block[:, 1:] = np.tile(tail, (head.size, 1))
        yield block


def reference_solve_grid(problem: RobustProblem, resolution: int) -> float:
    """Best objective over a uniform grid of the box (continuous problems, n <= 3).

    The grid point is a feasible point, so the value upper-bounds the true
    optimum; the gap is at most ``|c|_1`` times the grid spacing when the
    optimum is approached by feasible grid points.
    """
    if problem.k != 0:
        raise ValidationError("grid oracle needs a continuous problem (k = 0)")
    if problem.n > 3:
        raise ValidationError("grid oracle supports n <= 3")
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    axes = [np.linspace(lo, hi, resolution) for lo, hi in zip(problem.lower, problem.upper)]
    best, _ = _best_over(problem, _cartesian_chunks(axes, GRID_CHUNK))
    if not np.isfinite(best):
        raise NoFeasibleGridPoint("no grid point satisfies every constraint")
    return best


def reference_solve_enumerate(problem: RobustProblem) -> float:
    """Exact optimum of a pure-integer problem by visiting every lattice point."""
    if problem.k != problem.n:
        raise ValidationError("enumeration oracle needs every variable integral (k = n)")
    lo = np.ceil(problem.lower)
    hi = np.floor(problem.upper)
    if np.any(lo > hi):
        raise NoFeasiblePoint("box contains no lattice point")
    counts = (hi - lo + 1).astype(int)
    total = 1
    for c in counts:
        total *= int(c)
    if total > MAX_LATTICE:
        raise LatticeTooLarge(f"{total} lattice points exceed the limit of {MAX_LATTICE}")
    axes = [np.arange(a, b + 1) for a, b in zip(lo, hi)]
    best, _ = _best_over(problem, _cartesian_chunks(axes, GRID_CHUNK))
    if not np.isfinite(best):
        raise NoFeasiblePoint("no lattice point satisfies every constraint")
    return best

