"""Robust problem data and the conic constraint function.

A problem is

    minimize    c'x
    subject to  a_i'x + beta_i * sqrt(x' Sigma_i x) <= b_i    i = 1..m
                coeffs_r'x <= rhs_r                            (certain rows)
                lower <= x <= upper
                x_j integer for j < k

Each uncertain row is the robust counterpart of ``ã'x <= b`` for every ã in
the ellipsoid ``{a + beta * L u : ||u|| <= 1}`` with ``Sigma = L L'``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Any, Mapping, Sequence

import numpy as np

from . import linalg
from .errors import DimensionMismatch, NegativeBeta, NotSPD, UnboundedBox, ValidationError


def _frozen(values, ndim: int, name: str) -> np.ndarray:
    try:
        arr = np.array(values, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name}: not numeric ({exc})") from None
    if arr.ndim != ndim:
        raise DimensionMismatch(f"{name}: expected {ndim}-d data, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)) and name not in ("lower", "upper"):
        raise ValidationError(f"{name}: contains non-finite values")
    arr.setflags(write=False)
    return arr


class _FieldwiseEq:
    """Equality over dataclass fields, with numpy arrays compared exactly."""

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        for f in fields(self):
            if not f.compare:
                continue
            mine, theirs = getattr(self, f.name), getattr(other, f.name)
            if isinstance(mine, np.ndarray):
                if not np.array_equal(mine, theirs):
                    return False
            elif mine != theirs:
                return False
        return True

    __hash__ = None


@dataclass(frozen=True, eq=False)
class CertainConstraint(_FieldwiseEq):
    """Deterministic row ``coeffs'x <= rhs``."""

    coeffs: np.ndarray
    rhs: float

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _frozen(self.coeffs, 1, "coeffs"))
        object.__setattr__(self, "rhs", float(self.rhs))
        if not np.isfinite(self.rhs):
            raise ValidationError("rhs must be finite")


@dataclass(frozen=True, eq=False)
class EllipsoidalConstraint(_FieldwiseEq):
    """Uncertain row with ellipsoidal uncertainty, stored with its Cholesky factor."""

    a: np.ndarray
    beta: float
    sigma: np.ndarray
    b: float
    chol: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        a = _frozen(self.a, 1, "a")
        sigma = _frozen(self.sigma, 2, "sigma")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "b", float(self.b))
        if not np.isfinite(self.b):
            raise ValidationError("b must be finite")
        if not self.beta >= 0.0:
            raise NegativeBeta(f"beta must be nonnegative, got {self.beta}")
        if sigma.shape != (a.size, a.size):
            raise DimensionMismatch(f"sigma has shape {sigma.shape}, expected {(a.size, a.size)}")
        L = linalg.cholesky(sigma)
        L.setflags(write=False)
        object.__setattr__(self, "chol", L)

    @property
    def n(self) -> int:
        return self.a.size


@dataclass(frozen=True, eq=False)
class RobustProblem(_FieldwiseEq):
    n: int
    k: int
    c: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    certain: tuple[CertainConstraint, ...] = ()
    uncertain: tuple[EllipsoidalConstraint, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "certain", tuple(self.certain))
        object.__setattr__(self, "uncertain", tuple(self.uncertain))
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ValidationError(f"n must be a positive integer, got {self.n!r}")
        if isinstance(self.k, bool) or int(self.k) != self.k or not 0 <= self.k <= self.n:
            raise ValidationError(f"k must be an integer in [0, n], got {self.k!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "k", int(self.k))
        for name in ("c", "lower", "upper"):
            arr = _frozen(getattr(self, name), 1, name)
            if arr.size != self.n:
                raise DimensionMismatch(f"{name} has length {arr.size}, expected {self.n}")
            object.__setattr__(self, name, arr)
        if not (np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper))):
            raise UnboundedBox("all variable bounds must be finite")
        bad = np.flatnonzero(self.lower > self.upper)
        if bad.size:
            raise ValidationError(f"lower > upper for variable {int(bad[0])}")
        for i, row in enumerate(self.certain):
            if row.coeffs.size != self.n:
                raise DimensionMismatch(
                    f"certain[{i}] has {row.coeffs.size} coefficients, expected {self.n}")
        if not self.uncertain:
            raise ValidationError("at least one uncertain constraint is required")
        for i, con in enumerate(self.uncertain):
            if con.n != self.n:
                raise DimensionMismatch(
                    f"uncertain[{i}] has {con.n} coefficients, expected {self.n}")

    @property
    def m(self) -> int:
        return len(self.uncertain)

    def certain_rows(self) -> tuple[np.ndarray, np.ndarray]:
        """Certain constraints stacked as ``(A, b)``."""
        if not self.certain:
            return np.zeros((0, self.n)), np.zeros(0)
        A = np.vstack([row.coeffs for row in self.certain])
        b = np.array([row.rhs for row in self.certain])
        return A, b


def _make_uncertain(i: int, a, beta, sigma, b) -> EllipsoidalConstraint:
    try:
        return EllipsoidalConstraint(a=a, beta=beta, sigma=sigma, b=b)
    except NotSPD as exc:
        raise NotSPD(f"uncertain constraint {i}: {exc}", index=i) from None
    except ValidationError as exc:
        raise type(exc)(f"uncertain constraint {i}: {exc}") from None


def validate_problem(raw: RobustProblem | Mapping[str, Any]) -> RobustProblem:
    """Build a validated :class:`RobustProblem` from candidate data.

    ``raw`` may be an existing problem (re-validated from its fields) or a
    mapping with keys ``n, k, c, lower, upper, certain, uncertain`` where
    ``certain`` holds ``{coeffs, rhs}`` entries and ``uncertain`` holds
    ``{a, beta, sigma, b}`` entries.  NotSPD errors carry the 0-based index
    of the offending uncertain constraint.
    """
    if isinstance(raw, RobustProblem):
        data = {
            "n": raw.n, "k": raw.k, "c": raw.c, "lower": raw.lower, "upper": raw.upper,
            "certain": [{"coeffs": r.coeffs, "rhs": r.rhs} for r in raw.certain],
            "uncertain": [{"a": u.a, "beta": u.beta, "sigma": u.sigma, "b": u.b}
                          for u in raw.uncertain],
        }
    else:
        data = raw
    try:
        certain = [CertainConstraint(coeffs=r["coeffs"], rhs=r["rhs"])
                   for r in data.get("certain", ())]
        uncertain = [_make_uncertain(i, u["a"], u["beta"], u["sigma"], u["b"])
                     for i, u in enumerate(data.get("uncertain", ()))]
        return RobustProblem(
            n=data["n"], k=data["k"], c=data["c"],
            lower=data["lower"], upper=data["upper"],
            certain=certain, uncertain=uncertain,
        )
    except KeyError as exc:
        raise ValidationError(f"missing field {exc.args[0]!r}") from None
    except (TypeError, AttributeError) as exc:
        raise ValidationError(f"malformed problem data: {exc}") from None


def evaluate_robust_constraint(con: EllipsoidalConstraint, x: Sequence[float]) -> float:
    """g(x) = a'x + beta * sqrt(x'Σx) - b."""
    x = np.asarray(x, dtype=float)
    if x.shape != con.a.shape:
        raise DimensionMismatch(f"x has shape {x.shape}, expected {con.a.shape}")
    value = float(con.a @ x) - con.b
    if con.beta == 0.0:
        return value
    return value + con.beta * linalg.sqrt_quad_form(con.chol, x)


def max_violation(problem: RobustProblem, x) -> float:
    """Largest g_i(x) over the uncertain constraints."""
    return max(evaluate_robust_constraint(con, x) for con in problem.uncertain)
