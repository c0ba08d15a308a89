"""Cutting-plane solver for mixed-integer robust LPs with ellipsoidal uncertainty."""

from .cutting_plane import (
    Cut,
    CutMode,
    IterationTrace,
    SolveReport,
    SolverConfig,
    SolveStatus,
    check_stopping,
    generate_cuts,
    solve_robust,
    worst_case_coefficients,
)
from .errors import RobustCutError
from .milp_solver import MasterSolution, solve_master
from .lp_solver import LinearProgram, LpSolution, LpStatus, solve_lp
from .model import (
    CertainConstraint,
    EllipsoidalConstraint,
    RobustProblem,
    evaluate_robust_constraint,
    validate_problem,
)

__all__ = [
    "CertainConstraint", "Cut", "CutMode", "EllipsoidalConstraint", "IterationTrace",
    "LinearProgram", "LpSolution", "LpStatus", "MasterSolution", "RobustCutError",
    "RobustProblem", "SolveReport", "SolveStatus", "SolverConfig", "check_stopping",
    "evaluate_robust_constraint", "generate_cuts", "solve_lp", "solve_master",
    "solve_robust", "validate_problem", "worst_case_coefficients",
]
__version__ = "0.1.0"
