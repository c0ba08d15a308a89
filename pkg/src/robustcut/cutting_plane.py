"""Cutting-plane solver for robust MILPs with ellipsoidal uncertainty.

The loop keeps a pool of linear cuts ``â'x <= b`` per uncertain constraint:

0. seed the pool with the nominal rows ``a_i'x <= b_i``;
1. solve the master MILP over the pool, certain rows and the box;
2. stop when ``max_i g_i(x) < eps`` at the master optimum;
3. otherwise add the worst-case row ``â = a + beta Σx / sqrt(x'Σx)`` for
   the offending constraints and go back to 1.

The worst-case row is the maximizer of ``ã'x`` over the ellipsoid, so the
new cut is violated by exactly ``g_i(x)`` at the current point and is
satisfied by every robust-feasible point.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import DegeneratePoint, NoCutGenerated
from .milp_solver import NODE_LIMIT, solve_master
from .model import EllipsoidalConstraint, RobustProblem, evaluate_robust_constraint

log = logging.getLogger(__name__)

DEGENERACY_TOL = 1e-14
DEDUP_TOL = 1e-12
STALL_WINDOW = 50
STALL_DECREASE = 1e-12


class CutMode(enum.Enum):
    ALL = "all"
    VIOLATED_ONLY = "violated"


class SolveStatus(enum.Enum):
    OPTIMAL_EXACT = "OptimalExact"
    EPS_FEASIBLE = "EpsFeasible"
    ROBUST_INFEASIBLE = "RobustInfeasible"
    ITERATION_LIMIT = "IterationLimit"


class StopKind(enum.Enum):
    FEASIBLE_EXACT = "FeasibleExact"
    EPS_FEASIBLE = "EpsFeasible"
    CONTINUE = "Continue"


@dataclass(frozen=True)
class StopDecision:
    kind: StopKind
    max_violation: float


@dataclass(frozen=True)
class Cut:
    """Row ``coeffs'x <= rhs`` generated for uncertain constraint ``constraint_index``.

    ``constraint_index`` is 1-based; iteration 0 marks the nominal row.
    """

    constraint_index: int
    iteration: int
    coeffs: np.ndarray
    rhs: float


@dataclass(frozen=True)
class SolverConfig:
    eps: float = 1e-6
    max_iterations: int = 1000
    cut_mode: CutMode = CutMode.VIOLATED_ONLY
    node_limit: int = NODE_LIMIT

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.node_limit < 1:
            raise ValueError("node_limit must be at least 1")
        object.__setattr__(self, "cut_mode", CutMode(self.cut_mode))


@dataclass(frozen=True)
class IterationTrace:
    iteration: int
    master_objective: float
    max_violation: float
    cuts_added: int
    x: np.ndarray


@dataclass
class SolveReport:
    status: SolveStatus
    x: np.ndarray | None
    objective: float | None
    iterations: int
    trace: list[IterationTrace] = field(default_factory=list)
    cuts: list[Cut] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.status in (SolveStatus.OPTIMAL_EXACT, SolveStatus.EPS_FEASIBLE)


def worst_case_coefficients(con: EllipsoidalConstraint, x) -> np.ndarray:
    """Maximizer of ã'x over the ellipsoid: ``a + beta * Σx / sqrt(x'Σx)``.

    Σx and sqrt(x'Σx) both go through the Cholesky factor (``Σx = L(L'x)``),
    which keeps ``â'x - b`` equal to ``g(x)`` up to rounding.
    """
    x = np.asarray(x, dtype=float)
    w = linalg.chol_times_transpose(con.chol, x)
    q = float(w @ w)
    if q <= DEGENERACY_TOL * np.linalg.norm(con.sigma) * float(x @ x):
        raise DegeneratePoint("x'Σx vanishes at this point")
    if con.beta == 0.0:
        return con.a.copy()
    return con.a + con.beta * (con.chol @ w) / np.sqrt(q)


def check_stopping(problem: RobustProblem, x, eps: float) -> StopDecision:
    worst = max(evaluate_robust_constraint(con, x) for con in problem.uncertain)
    if worst <= 0.0:
        return StopDecision(StopKind.FEASIBLE_EXACT, worst)
    if worst < eps:
        return StopDecision(StopKind.EPS_FEASIBLE, worst)
    return StopDecision(StopKind.CONTINUE, worst)


def generate_cuts(problem: RobustProblem, x, iteration: int,
                  cut_mode: CutMode = CutMode.VIOLATED_ONLY) -> list[Cut]:
    """Worst-case cuts at ``x``, in constraint order.

    Constraints whose quadratic form vanishes at ``x`` are skipped.
    """
    cut_mode = CutMode(cut_mode)
    cuts = []
    violated_seen = violated_cut = False
    for i, con in enumerate(problem.uncertain, start=1):
        violated = evaluate_robust_constraint(con, x) > 0.0
        violated_seen |= violated
        if cut_mode is CutMode.VIOLATED_ONLY and not violated:
            continue
        try:
            coeffs = worst_case_coefficients(con, x)
        except DegeneratePoint:
            continue
        violated_cut |= violated
        cuts.append(Cut(i, iteration, coeffs, con.b))
    if violated_seen and not violated_cut:
        raise NoCutGenerated("every violated constraint is degenerate at x")
    return cuts


class CutPool:
    """Accumulated master rows, deduplicated per constraint."""

    def __init__(self, problem: RobustProblem):
        self.n = problem.n
        A, b = problem.certain_rows()
        self._rows = [row for row in A]
        self._rhs = list(b)
        self.cuts: list[Cut] = []
        self._by_constraint: dict[int, list[np.ndarray]] = {}

    def add(self, cut: Cut) -> bool:
        seen = self._by_constraint.setdefault(cut.constraint_index, [])
        for old in seen:
            if np.max(np.abs(old - cut.coeffs)) <= DEDUP_TOL:
                return False
        seen.append(cut.coeffs)
        self.cuts.append(cut)
        self._rows.append(cut.coeffs)
        self._rhs.append(cut.rhs)
        return True

    def matrix(self) -> tuple[np.ndarray, np.ndarray]:
        if not self._rows:
            return np.zeros((0, self.n)), np.zeros(0)
        return np.vstack(self._rows), np.asarray(self._rhs, dtype=float)


def solve_robust(problem: RobustProblem, config: SolverConfig | None = None) -> SolveReport:
    """Run the cutting-plane loop until the master point is eps-feasible.

    ``RobustInfeasible`` means some master problem had no feasible point; the
    master is a relaxation of the robust problem, so the latter has none
    either.  ``IterationLimit`` covers both the iteration budget and stall
    detection (no decrease of the best violation by 1e-12 over 50 rounds).
    """
    config = config or SolverConfig()
    pool = CutPool(problem)
    for i, con in enumerate(problem.uncertain, start=1):
        pool.add(Cut(i, 0, con.a.copy(), con.b))

    trace: list[IterationTrace] = []
    best_violation = np.inf
    last_improvement = 0
    x = None
    objective = None

    for it in range(1, config.max_iterations + 1):
        A, b = pool.matrix()
        master = solve_master(problem.c, A, b, problem.lower, problem.upper, problem.k,
                              node_limit=config.node_limit)
        if not master.optimal:
            log.info("iteration %d: master infeasible", it)
            return SolveReport(SolveStatus.ROBUST_INFEASIBLE, None, None, it - 1, trace, pool.cuts)

        x, objective = master.x, master.objective
        decision = check_stopping(problem, x, config.eps)
        if decision.kind is not StopKind.CONTINUE:
            trace.append(IterationTrace(it, objective, decision.max_violation, 0, x))
            status = (SolveStatus.OPTIMAL_EXACT if decision.kind is StopKind.FEASIBLE_EXACT
                      else SolveStatus.EPS_FEASIBLE)
            return SolveReport(status, x, objective, it, trace, pool.cuts)

        added = sum(pool.add(cut) for cut in generate_cuts(problem, x, it, config.cut_mode))
        trace.append(IterationTrace(it, objective, decision.max_violation, added, x))
        log.debug("iteration %d: objective %.10g, violation %.3e, %d cuts",
                  it, objective, decision.max_violation, added)

        if decision.max_violation < best_violation - STALL_DECREASE:
            best_violation = decision.max_violation
            last_improvement = it
        elif it - last_improvement >= STALL_WINDOW:
            log.warning("stalled after %d iterations", it)
            break

    return SolveReport(SolveStatus.ITERATION_LIMIT, x, objective, len(trace), trace, pool.cuts)
