"""Bounded-variable primal simplex for small dense LPs.

Solves

    minimize c'x  subject to  A x <= b,  lower <= x <= upper

with finite bounds on every structural variable.  Each row gets a slack
``s >= 0`` so the working system is ``A x + s = b``.  Rows that the starting
point violates also get an artificial column; phase 1 minimizes the sum of
artificials, after which they are fixed at zero and phase 2 minimizes c'x.

The tableau ``B^-1 [A I -I_art]`` is kept explicitly.  At desk scale (a few
hundred rows) this is cheaper than maintaining a factorization.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NumericalBreakdown, ValidationError


@dataclass(frozen=True)
class SimplexTolerances:
    optimality: float = 1e-9  # reduced-cost threshold
    pivot: float = 1e-10  # smallest |tableau entry| accepted in the ratio test
    feasibility: float = 1e-8  # row residual / phase-1 objective
    bound: float = 1e-9  # slack allowed on variable bounds
    bland_after: int = 100  # consecutive degenerate pivots before Bland's rule
    max_pivots: int | None = None  # default: 50 * (rows + columns) + 1000


DEFAULT_TOLERANCES = SimplexTolerances()
REFACTOR_EVERY = 200
REFACTOR_PIVOT_RATIO = 1e-6


class LpStatus(enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"


@dataclass
class LinearProgram:
    """``min c'x`` over ``A x <= b`` and a finite box."""

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        n = self.c.size
        self.A = np.asarray(self.A, dtype=float).reshape(-1, n)
        self.b = np.asarray(self.b, dtype=float).reshape(-1)
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        if self.A.shape[0] != self.b.size:
            raise DimensionMismatch(f"{self.A.shape[0]} rows but {self.b.size} right-hand sides")
        if self.lower.shape != (n,) or self.upper.shape != (n,):
            raise DimensionMismatch("bounds must have the same length as c")
        if not (np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper))):
            raise ValidationError("bounds must be finite")
        if np.any(self.lower > self.upper):
            raise ValidationError("lower bound exceeds upper bound")

    @classmethod
    def from_rows(cls, c, rows: Sequence[tuple[Sequence[float], float]], lower, upper):
        """Build from a list of ``(coeffs, rhs)`` pairs."""
        n = len(c)
        A = np.array([r[0] for r in rows], dtype=float).reshape(-1, n)
        b = np.array([r[1] for r in rows], dtype=float)
        return cls(c, A, b, lower, upper)

    @property
    def n(self) -> int:
        return self.c.size


@dataclass
class LpSolution:
    status: LpStatus
    x: np.ndarray | None = None
    objective: float | None = None
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


class _Tableau:
    """Working state shared by both phases."""

    def __init__(self, A_full, b, lo, hi, basis, x, tol: SimplexTolerances):
        self.A_full = A_full
        self.b = b
        self.lo = lo
        self.hi = hi
        self.basis = basis
        self.x = x
        self.tol = tol
        # The starting basis is slack/artificial columns, i.e. diag(+-1).
        signs = A_full[np.arange(basis.size), basis] if basis.size else np.zeros(0)
        self.T = A_full * signs[:, None]
        self.pivots = 0
        rows, cols = A_full.shape
        self.max_pivots = tol.max_pivots or 50 * (rows + cols) + 1000

    def refresh(self, tableau: bool = False):
        """Recompute basic values (and optionally the tableau) from the original data."""
        if not self.basis.size:
            return
        B = self.A_full[:, self.basis]
        is_basic = np.zeros(self.x.size, dtype=bool)
        is_basic[self.basis] = True
        nonbasic = ~is_basic
        rhs = self.b - self.A_full[:, nonbasic] @ self.x[nonbasic]
        try:
            if tableau:
                self.T = np.linalg.solve(B, self.A_full)
            self.x[self.basis] = np.linalg.solve(B, rhs)
        except np.linalg.LinAlgError:
            raise NumericalBreakdown("basis matrix became singular") from None

    def drop_nonbasic(self, candidates: np.ndarray):
        """Remove the nonbasic columns among ``candidates``."""
        keep = np.ones(self.x.size, dtype=bool)
        keep[candidates] = False
        keep[self.basis] = True
        new_index = np.cumsum(keep) - 1
        self.A_full = self.A_full[:, keep]
        self.T = self.T[:, keep]
        self.lo = self.lo[keep]
        self.hi = self.hi[keep]
        self.x = self.x[keep]
        self.basis = new_index[self.basis]

    def run(self, cost: np.ndarray):
        tol = self.tol
        T = self.T
        m, N = T.shape
        x, lo, hi, basis = self.x, self.lo, self.hi, self.basis
        fixed = ~(hi > lo)
        blocked = fixed.copy()
        blocked[basis] = True
        at_upper = x >= hi
        xb, lob, hib = x[basis], lo[basis], hi[basis]
        d = cost - cost[basis] @ T
        fresh = True
        degenerate_streak = 0
        while True:
            # Positive score: the objective improves as the variable leaves its bound.
            score = np.where(at_upper, d, -d)
            score[blocked] = 0.0
            bland = degenerate_streak >= tol.bland_after
            j = int(np.argmax(score > tol.optimality)) if bland else int(np.argmax(score))
            if not score[j] > tol.optimality:
                if fresh:
                    break
                d = cost - cost[basis] @ T  # confirm with drift-free reduced costs
                fresh = True
                continue
            if self.pivots >= self.max_pivots:
                raise NumericalBreakdown(
                    f"simplex exceeded {self.max_pivots} pivots; instance needs rescaling")
            direction = -1.0 if at_upper[j] else 1.0

            # Basic values move by -step * alpha while x_j moves by direction * step.
            alpha = T[:, j] * direction
            with np.errstate(divide="ignore", invalid="ignore"):
                limits = np.where(alpha > tol.pivot, (xb - lob) / alpha,
                                  np.where(alpha < -tol.pivot, (hib - xb) / -alpha, np.inf))
            np.maximum(limits, 0.0, out=limits)

            step = hi[j] - lo[j]  # bound flip
            r = -1
            if m:
                r = int(np.argmin(limits))
                best = limits[r]
                if best <= step:
                    # Near-ties are measured by the bound violation they would
                    # cause, not by step length, which large entries magnify.
                    with np.errstate(invalid="ignore"):  # inf * 0 rows are never ties
                        ties = np.flatnonzero((limits - best) * np.abs(alpha) <= 1e-12)
                    if ties.size > 1:
                        if bland:
                            r = int(ties[np.argmin(basis[ties])])
                        else:
                            r = int(ties[np.argmax(np.abs(alpha[ties]))])
                    step = float(limits[r])
                else:
                    r = -1
            if not np.isfinite(step):
                raise NumericalBreakdown("unbounded ray in a bounded LP; data is ill-scaled")

            degenerate_streak = degenerate_streak + 1 if step <= 1e-12 else 0
            self.pivots += 1
            fresh = False
            if step > 0.0:
                xb -= step * alpha
            if r < 0:
                x[j] = hi[j] if direction > 0 else lo[j]
                at_upper[j] = direction > 0
                continue

            leaving = int(basis[r])
            to_upper = alpha[r] < 0
            x[leaving] = hi[leaving] if to_upper else lo[leaving]
            at_upper[leaving] = to_upper
            blocked[leaving] = fixed[leaving]
            blocked[j] = True
            xb[r] = x[j] + direction * step
            lob[r], hib[r] = lo[j], hi[j]
            basis[r] = j

            # A pivot that is small relative to its column amplifies rounding
            # error in every later update, so refactor right after it.
            unstable = abs(T[r, j]) < REFACTOR_PIVOT_RATIO * float(np.abs(T[:, j]).max())
            pivot_row = T[r] / T[r, j]
            T -= np.outer(T[:, j], pivot_row)
            T[r] = pivot_row
            d -= d[j] * pivot_row
            if unstable or self.pivots % REFACTOR_EVERY == 0:
                x[basis] = xb
                self.refresh(tableau=True)
                T = self.T
                xb = x[basis]
                d = cost - cost[basis] @ T
                fresh = True
        x[basis] = xb


def _starting_corner(lp: LinearProgram, sweeps: int = 3) -> np.ndarray:
    """Box corner with small total row violation, to shorten phase 1.

    Starts from the corner the costs prefer and flips single coordinates
    while that lowers the summed violation.
    """
    x = np.where(lp.c < 0, lp.upper, lp.lower)
    if not lp.b.size:
        return x
    residual = lp.A @ x - lp.b
    total = np.maximum(residual, 0.0).sum()
    for _ in range(sweeps):
        improved = False
        for j in range(lp.n):
            other = lp.lower[j] if x[j] == lp.upper[j] else lp.upper[j]
            trial = residual + lp.A[:, j] * (other - x[j])
            trial_total = np.maximum(trial, 0.0).sum()
            if trial_total < total:
                x[j], residual, total = other, trial, trial_total
                improved = True
        if not improved or total == 0.0:
            break
    return x


def solve_lp(lp: LinearProgram, tol: SimplexTolerances = DEFAULT_TOLERANCES) -> LpSolution:
    """Solve ``lp`` from a cold start.

    Returns an optimal basic (vertex) solution or reports infeasibility.
    Unboundedness cannot occur because every structural variable is boxed.
    """
    n = lp.n
    m = lp.b.size
    x0 = _starting_corner(lp)
    residual = lp.b - lp.A @ x0 if m else np.zeros(0)
    bad = np.flatnonzero(residual < 0)
    n_art = bad.size

    A_full = np.zeros((m, n + m + n_art))
    A_full[:, :n] = lp.A
    A_full[:, n:n + m] = np.eye(m)
    A_full[bad, n + m + np.arange(n_art)] = -1.0

    lo = np.concatenate([lp.lower, np.zeros(m + n_art)])
    hi = np.concatenate([lp.upper, np.full(m, np.inf), np.full(n_art, np.inf)])
    x = np.concatenate([x0, np.maximum(residual, 0.0), -residual[bad]])
    basis = np.arange(n, n + m)
    basis[bad] = n + m + np.arange(n_art)

    tab = _Tableau(A_full, lp.b.copy(), lo, hi, basis, x, tol)
    if n_art:
        phase1 = np.zeros(A_full.shape[1])
        phase1[n + m:] = 1.0
        tab.run(phase1)
        tab.refresh()
        if float(np.sum(tab.x[n + m:])) > tol.feasibility:
            return LpSolution(LpStatus.INFEASIBLE, pivots=tab.pivots)
        # Pin artificials at zero; basic ones stay as degenerate placeholders,
        # nonbasic ones can never re-enter and are dropped.
        tab.hi[n + m:] = 0.0
        tab.x[n + m:] = 0.0
        tab.drop_nonbasic(np.arange(n + m, n + m + n_art))
        tab.refresh()

    cost = np.zeros(tab.x.size)
    cost[:n] = lp.c
    tab.run(cost)
    tab.refresh()

    xs = np.clip(tab.x[:n], lp.lower, lp.upper)
    if np.max(np.abs(xs - tab.x[:n]), initial=0.0) > tol.bound:
        raise NumericalBreakdown("final basis violates variable bounds")
    if m and float(np.max(lp.A @ xs - lp.b)) > tol.feasibility:
        raise NumericalBreakdown("final basis violates a row beyond tolerance")
    return LpSolution(LpStatus.OPTIMAL, x=xs, objective=float(lp.c @ xs), pivots=tab.pivots)
