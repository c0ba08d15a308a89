"""End-to-end acceptance criteria.

Each test records its outcome before asserting, so the terminal summary lists
one PASS/FAIL line per criterion.  Run with ``pytest tests/test_acceptance.py``.
"""

import math
import time

import numpy as np
import pytest

from robustcut import cli
from robustcut.cutting_plane import SolverConfig, SolveStatus, solve_robust, worst_case_coefficients
from robustcut.instances import acceptance_suite, random_feasible_problem, random_spd, two_dim_instance
from robustcut.milp_solver import solve_master
from robustcut.model import EllipsoidalConstraint, evaluate_robust_constraint
from robustcut.verify import (
    kelley_cut,
    reference_solve_enumerate,
    reference_solve_grid,
    sample_ellipsoid_max,
    support_value,
)

SEED = 2024


def random_pair(rng):
    """A random constraint (n in [1, 10]) and a point away from the origin."""
    n = int(rng.integers(1, 11))
    con = EllipsoidalConstraint(rng.standard_normal(n), float(rng.uniform(0.1, 2.0)),
                                random_spd(rng, n), float(rng.standard_normal()))
    x = rng.uniform(-5.0, 5.0, n)
    while np.linalg.norm(x) < 1e-3:
        x = rng.uniform(-5.0, 5.0, n)
    return con, x


@pytest.fixture(scope="module")
def suite_runs():
    problems = acceptance_suite(seed=SEED, count=50)
    config = SolverConfig(eps=1e-6, max_iterations=500)
    start = time.perf_counter()
    reports = [solve_robust(p, config) for p in problems]
    return problems, reports, time.perf_counter() - start


def test_1_finite_termination(suite_runs, acceptance_record):
    problems, reports, elapsed = suite_runs
    converged = [r.status in (SolveStatus.OPTIMAL_EXACT, SolveStatus.EPS_FEASIBLE) for r in reports]
    worst = max(r.iterations for r in reports)
    ok = all(converged) and worst <= 500 and elapsed < 60.0
    acceptance_record("1. finite termination", ok,
                      f"{sum(converged)}/50 converged, max {worst} iterations, {elapsed:.1f} s")
    assert all(converged)
    assert worst <= 500
    assert elapsed < 60.0


def test_2_continuous_oracle(acceptance_record):
    problem = two_dim_instance()
    report = solve_robust(problem, SolverConfig(eps=1e-6))
    exact = 10 * math.sqrt(2) - 20
    grid = reference_solve_grid(problem, 2001)
    err, grid_err = abs(report.objective - exact), abs(grid - report.objective)
    ok = report.converged and err <= 1e-6 and grid_err <= 1.5e-2
    acceptance_record("2. continuous oracle", ok, f"|obj - exact| = {err:.2e}, |grid - obj| = {grid_err:.2e}")
    assert report.converged
    assert err <= 1e-6
    assert grid_err <= 1.5e-2


def test_3_integer_oracle(acceptance_record):
    problem = two_dim_instance(k=2)
    report = solve_robust(problem)
    reference = reference_solve_enumerate(problem)
    ok = report.converged and report.objective == reference == -5.0
    acceptance_record("3. integer oracle", ok, f"solver {report.objective}, enumeration {reference}")
    assert report.objective == reference == -5.0


def test_4_tight_cut_identity(acceptance_record):
    rng = np.random.default_rng(SEED + 4)
    worst = 0.0
    for _ in range(1000):
        con, x = random_pair(rng)
        row = worst_case_coefficients(con, x)
        worst = max(worst, abs(row @ x - con.b - evaluate_robust_constraint(con, x)))
    acceptance_record("4. tight-cut identity", worst <= 1e-10, f"max error {worst:.2e} over 1000 pairs")
    assert worst <= 1e-10


def test_5_cut_validity(acceptance_record):
    rng = np.random.default_rng(SEED + 5)
    violations, worst = 0, -np.inf
    for _ in range(10_000):
        con, x_nu = random_pair(rng)
        x = rng.uniform(-5.0, 5.0, con.n)
        gap = worst_case_coefficients(con, x_nu) @ x - support_value(con, x)
        worst = max(worst, gap)
        violations += gap > 1e-10
    acceptance_record("5. cut validity", violations == 0,
                      f"{violations} violations in 10^4 pairs, max excess {worst:.2e}")
    assert violations == 0


def test_6_kelley_equivalence(acceptance_record):
    rng = np.random.default_rng(SEED + 6)
    worst_eq = worst_fd = 0.0
    h = 1e-6
    for _ in range(1000):
        con, x = random_pair(rng)
        grad = kelley_cut(con, x)
        worst_eq = max(worst_eq, float(np.max(np.abs(grad - worst_case_coefficients(con, x)))))
        fd = np.empty(con.n)
        for j in range(con.n):
            e = np.zeros(con.n)
            e[j] = h
            fd[j] = (evaluate_robust_constraint(con, x + e) - evaluate_robust_constraint(con, x - e)) / (2 * h)
        worst_fd = max(worst_fd, float(np.max(np.abs(grad - fd))))
    ok = worst_eq <= 1e-12 and worst_fd <= 1e-5
    acceptance_record("6. gradient-cut equivalence", ok,
                      f"max |kelley - worst case| {worst_eq:.2e}, max |kelley - FD| {worst_fd:.2e}")
    assert worst_eq <= 1e-12
    assert worst_fd <= 1e-5


def test_7_monotone_bounds(suite_runs, acceptance_record):
    _, reports, _ = suite_runs
    worst_drop = 0.0
    for report in reports:
        objs = np.array([t.master_objective for t in report.trace])
        if objs.size > 1:
            worst_drop = max(worst_drop, float(np.max(objs[:-1] - objs[1:])))
    acceptance_record("7. monotone lower bounds", worst_drop <= 1e-9,
                      f"largest decrease {worst_drop:.2e} over 50 solves")
    assert worst_drop <= 1e-9


def test_8_sampling_oracle(acceptance_record):
    rng = np.random.default_rng(SEED + 8)
    worst = -np.inf
    for trial in range(200):
        con, x = random_pair(rng)
        sampled = sample_ellipsoid_max(con, x, 2000, seed=trial)
        worst = max(worst, sampled.value - support_value(con, x))
    pythagorean = EllipsoidalConstraint([1.0, 1.0], 1.0, np.eye(2), 0.0)
    big = sample_ellipsoid_max(pythagorean, [3.0, 4.0], 1_000_000, seed=SEED).value
    rel = abs(big - 12.0) / 12.0
    ok = worst <= 1e-12 and big <= 12.0 + 1e-12 and rel < 0.01
    acceptance_record("8. sampling oracle", ok,
                      f"max excess {worst:.2e} over 200 pairs, 10^6 samples give {big:.10f}")
    assert worst <= 1e-12
    assert big <= 12.0 + 1e-12
    assert rel < 0.01


def test_9_deterministic_reduction(acceptance_record):
    rng = np.random.default_rng(SEED + 9)
    iterations, worst = [], 0.0
    for i in range(20):
        n = int(rng.integers(2, 8))
        k = 0 if i % 2 == 0 else n // 2
        problem = random_feasible_problem(rng, n, int(rng.integers(1, 6)), k, beta_range=(0.0, 0.0))
        report = solve_robust(problem)
        A = np.array([u.a for u in problem.uncertain])
        b = np.array([u.b for u in problem.uncertain])
        direct = solve_master(problem.c, A, b, problem.lower, problem.upper, problem.k)
        iterations.append(report.iterations)
        worst = max(worst, abs(report.objective - direct.objective))
    ok = all(it == 1 for it in iterations) and worst <= 1e-9
    acceptance_record("9. deterministic reduction", ok,
                      f"iterations {sorted(set(iterations))}, max objective gap {worst:.2e}")
    assert all(it == 1 for it in iterations)
    assert worst <= 1e-9


def test_10_trace_determinism(tmp_path, acceptance_record, capsys):
    rng = np.random.default_rng(SEED + 10)
    problems = [two_dim_instance(), two_dim_instance(k=2),
                random_feasible_problem(rng, 6, 4, 0), random_feasible_problem(rng, 6, 4, 3)]
    identical = []
    for i, problem in enumerate(problems):
        path = tmp_path / f"p{i}.json"
        cli.write_problem(problem, path)
        blobs = []
        for run in range(2):
            trace = tmp_path / f"p{i}_{run}.csv"
            cli.main(["solve", str(path), "--trace", str(trace), "--seed", "3"])
            blobs.append(trace.read_bytes())
        identical.append(blobs[0] == blobs[1] and len(blobs[0]) > 0)
    capsys.readouterr()
    acceptance_record("10. trace determinism", all(identical),
                      f"{sum(identical)}/{len(identical)} instances byte-identical")
    assert all(identical)
