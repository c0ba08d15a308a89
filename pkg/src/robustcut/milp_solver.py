"""Branch-and-bound for the master problem.

The first ``k`` variables must be integral.  Nodes are explored best-first
on their parent's LP bound, ties going to the older node, and branching
picks the most fractional variable (lowest index on ties).  Both choices
keep traces reproducible.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass

import numpy as np

from .errors import NodeLimitExceeded
from .lp_solver import DEFAULT_TOLERANCES, LinearProgram, LpStatus, SimplexTolerances, solve_lp

INTEGRALITY_TOL = 1e-6
ABS_GAP = 1e-6
NODE_LIMIT = 100_000

MasterStatus = LpStatus


@dataclass
class MasterSolution:
    status: MasterStatus
    x: np.ndarray | None = None
    objective: float | None = None
    nodes_explored: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is MasterStatus.OPTIMAL


def _most_fractional(x: np.ndarray, k: int, tol: float) -> int:
    frac = np.abs(x[:k] - np.round(x[:k]))
    if not k or frac.max() <= tol:
        return -1
    return int(np.argmax(frac))  # argmax returns the lowest index among ties


def solve_master(c, A, b, lower, upper, k: int, *,
                 node_limit: int = NODE_LIMIT,
                 abs_gap: float = ABS_GAP,
                 int_tol: float = INTEGRALITY_TOL,
                 lp_tol: SimplexTolerances = DEFAULT_TOLERANCES) -> MasterSolution:
    """Minimize ``c'x`` over ``A x <= b``, the box, and integrality of ``x[:k]``.

    With ``k == 0`` this is a single LP solve.  Raises
    :class:`NodeLimitExceeded` once more than ``node_limit`` LPs have been
    solved without closing the tree.
    """
    root = LinearProgram(c, A, b, lower, upper)
    if k == 0:
        sol = solve_lp(root, lp_tol)
        return MasterSolution(sol.status, sol.x, sol.objective, nodes_explored=1)

    lower0 = np.ceil(root.lower[:k] - int_tol)
    upper0 = np.floor(root.upper[:k] + int_tol)
    if np.any(lower0 > upper0):
        return MasterSolution(MasterStatus.INFEASIBLE, nodes_explored=0)

    best_x: np.ndarray | None = None
    best_obj = np.inf
    counter = itertools.count()
    heap = [(-np.inf, next(counter), root.lower.copy(), root.upper.copy())]
    explored = 0

    while heap:
        bound, _, lo, hi = heapq.heappop(heap)
        if bound >= best_obj - abs_gap:
            break  # best-first: every remaining node is at least as bad
        if explored >= node_limit:
            raise NodeLimitExceeded(f"branch-and-bound exceeded {node_limit} nodes")
        explored += 1
        sol = solve_lp(LinearProgram(root.c, root.A, root.b, lo, hi), lp_tol)
        if sol.status is LpStatus.INFEASIBLE or sol.objective >= best_obj - abs_gap:
            continue

        j = _most_fractional(sol.x, k, int_tol)
        if j < 0:
            x, obj = _snap_to_lattice(root, sol, lo, hi, k, lp_tol)
            if obj < best_obj:
                best_x, best_obj = x, obj
            continue

        value = sol.x[j]
        down_hi = hi.copy()
        down_hi[j] = np.floor(value)
        up_lo = lo.copy()
        up_lo[j] = np.ceil(value)
        heapq.heappush(heap, (sol.objective, next(counter), lo, down_hi))
        heapq.heappush(heap, (sol.objective, next(counter), up_lo, hi))

    if best_x is None:
        return MasterSolution(MasterStatus.INFEASIBLE, nodes_explored=explored)
    return MasterSolution(MasterStatus.OPTIMAL, best_x, best_obj, nodes_explored=explored)


def _snap_to_lattice(root: LinearProgram, sol, lo, hi, k, lp_tol):
    """Fix the integer part at its rounded value and re-optimize the rest.

    Keeps the reported point exactly integral without giving up row
    feasibility; falls back to plain rounding if the fixed LP fails.
    """
    z = np.round(sol.x[:k])
    if np.array_equal(z, sol.x[:k]) or k == root.n:
        x = sol.x.copy()
        x[:k] = z
        return x, float(root.c @ x)
    fixed_lo = lo.copy()
    fixed_hi = hi.copy()
    fixed_lo[:k] = z
    fixed_hi[:k] = z
    fixed = solve_lp(LinearProgram(root.c, root.A, root.b, fixed_lo, fixed_hi), lp_tol)
    if fixed.status is LpStatus.OPTIMAL:
        return fixed.x, fixed.objective
    x = sol.x.copy()
    x[:k] = z
    return x, float(root.c @ x)
