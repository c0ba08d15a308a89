"""Instance generators used by the test suites and handy for experiments."""

from __future__ import annotations

import numpy as np

from .model import RobustProblem, evaluate_robust_constraint, EllipsoidalConstraint, validate_problem


def two_dim_instance(k: int = 0, b: float = 10.0) -> RobustProblem:
    """minimize -x1 - x2 s.t. x1 + x2 + ||x|| <= b on [0, 10]^2.

    For k = 0 the optimum is x1 = x2 = b / (2 + sqrt 2), objective
    10*sqrt(2) - 20 at b = 10; with both variables integral it is -5.
    """
    return validate_problem({
        "n": 2, "k": k, "c": [-1.0, -1.0], "lower": [0.0, 0.0], "upper": [10.0, 10.0],
        "certain": [],
        "uncertain": [{"a": [1.0, 1.0], "beta": 1.0, "sigma": [[1.0, 0.0], [0.0, 1.0]], "b": b}],
    })


def random_spd(rng: np.random.Generator, n: int, ridge: float = 0.1) -> np.ndarray:
    """G G' + ridge * I with Gaussian G, symmetrized exactly."""
    G = rng.standard_normal((n, n))
    S = G @ G.T + ridge * np.eye(n)
    return (S + S.T) / 2.0


def random_feasible_problem(rng: np.random.Generator, n: int, m: int, k: int,
                            box: float = 5.0, beta_range=(0.1, 2.0),
                            slack_range=(0.5, 2.0)) -> RobustProblem:
    """Random robust problem that is feasible by construction.

    Draws an interior point x0 of ``[-box, box]^n`` (integral in its first k
    coordinates) and sets each ``b_i = g_i(x0) + slack`` so x0 is strictly
    robust-feasible.
    """
    x0 = rng.uniform(-0.6 * box, 0.6 * box, n)
    x0[:k] = np.round(x0[:k])
    uncertain = []
    for _ in range(m):
        sigma = random_spd(rng, n)
        a = rng.standard_normal(n)
        beta = float(rng.uniform(*beta_range))
        g0 = evaluate_robust_constraint(EllipsoidalConstraint(a, beta, sigma, 0.0), x0)
        uncertain.append({"a": a, "beta": beta, "sigma": sigma,
                          "b": g0 + float(rng.uniform(*slack_range))})
    return validate_problem({
        "n": n, "k": k, "c": rng.standard_normal(n),
        "lower": np.full(n, -box), "upper": np.full(n, box),
        "certain": [], "uncertain": uncertain,
    })


def acceptance_suite(seed: int = 2024, count: int = 50) -> list[RobustProblem]:
    """The randomized finite-termination suite: n in [2, 10], m in [1, 5], k in {0, n // 2}."""
    rng = np.random.default_rng(seed)
    problems = []
    for i in range(count):
        n = int(rng.integers(2, 11))
        m = int(rng.integers(1, 6))
        k = 0 if i % 2 == 0 else n // 2
        problems.append(random_feasible_problem(rng, n, m, k))
    return problems
