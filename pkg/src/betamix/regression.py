"""Truncated least-squares regression over finite hypothesis classes.

Covers the simulation-side regression machinery: the truncation operator, the
empirical and average means, exhaustive / normal-equation least squares, the
loss-difference family used by the deviation experiments, and the Monte Carlo
estimate of the weak (average-mean squared) error of the truncated fit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .entropy import FunctionFamily
from .errors import CapabilityError, DomainError, MalformedInputError

RIDGE = 1e-10


@dataclass(frozen=True)
class Dataset:
    """An observed (x, y) sample, optionally with exact per-index input laws.

    ``marginal_laws`` has one row per index giving the law of X_k over
    ``states``; it is what makes average means exactly computable.
    """

    xs: tuple
    ys: np.ndarray
    states: tuple | None = None
    marginal_laws: np.ndarray | None = None
    response_bound: float | None = None

    def __post_init__(self):
        ys = np.asarray(self.ys, dtype=float)
        object.__setattr__(self, "ys", ys)
        if len(self.xs) != ys.shape[0] or ys.shape[0] < 1:
            raise MalformedInputError("xs and ys must share a positive length")
        if self.response_bound is not None and np.abs(ys).max() > self.response_bound + 1e-12:
            raise MalformedInputError(
                f"responses exceed the declared bound {self.response_bound}"
            )
        if self.marginal_laws is not None:
            laws = np.asarray(self.marginal_laws, dtype=float)
            object.__setattr__(self, "marginal_laws", laws)
            if self.states is None or laws.shape != (ys.shape[0], len(self.states)):
                raise MalformedInputError("marginal_laws must be (n, n_states) with states named")

    @property
    def n(self) -> int:
        return self.ys.shape[0]


def truncate(value, B: float):
    """Clamp to [-B, B]; the identity on values already inside."""
    if B <= 0:
        raise DomainError("B must be positive")
    clipped = np.clip(value, -B, B)
    return float(clipped) if np.ndim(value) == 0 else clipped


def empirical_mean(values) -> float:
    """Sample average of per-index function values over a nonempty index set."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise DomainError("empty index set")
    return float(values.mean())


def average_mean(f: Callable, laws: np.ndarray | None, states: Sequence | None) -> float:
    """Average of per-index expectations of f under the exact marginal laws."""
    if laws is None or states is None:
        raise CapabilityError("average mean requires exact marginal laws")
    laws = np.asarray(laws, dtype=float)
    if laws.size == 0:
        raise DomainError("empty index set")
    fs = np.array([float(f(s)) for s in states])
    if laws.ndim == 1:
        return float(laws @ fs)
    return float((laws @ fs).mean())


@dataclass(frozen=True)
class RegressionResult:
    """A fitted member, its truncation, and the achieved objective value."""

    fitted: Callable
    truncated: Callable
    empirical_risk: float
    member_index: int | None = None
    coefficients: np.ndarray | None = None
    ridge_used: bool = False


def fit_least_squares(data: Dataset, family: FunctionFamily, B: float) -> RegressionResult:
    """Least-squares fit over the family, reported with its truncation T_B.

    Finite families are searched exhaustively with lexicographic tie-break;
    linear spans are solved by normal equations, falling back to a small ridge
    when the design is singular.
    """
    if B <= 0:
        raise DomainError("B must be positive")
    ys = data.ys
    if family.kind == "linear-span-truncated":
        if not family.basis:
            raise DomainError("empty basis")
        design = np.array([[float(g(x)) for g in family.basis] for x in data.xs])
        gram = design.T @ design
        rhs = design.T @ ys
        ridge_used = False
        try:
            coef = np.linalg.solve(gram, rhs)
        except np.linalg.LinAlgError:
            coef = np.linalg.solve(gram + RIDGE * np.eye(gram.shape[0]), rhs)
            ridge_used = True
        basis = family.basis
        fitted = lambda x, c=coef: float(sum(ci * g(x) for ci, g in zip(c, basis)))
        risk = float(np.mean((design @ coef - ys) ** 2))
        truncated = lambda x, f=fitted: truncate(f(x), B)
        return RegressionResult(fitted, truncated, risk, coefficients=coef, ridge_used=ridge_used)

    if not family.members:
        raise DomainError("empty family")
    values = family.values(data.xs)
    risks = ((values - ys[None, :]) ** 2).mean(axis=1)
    i = int(np.argmin(risks))
    fitted = family.members[i]
    truncated = lambda x, f=fitted: truncate(f(x), B)
    return RegressionResult(fitted, truncated, float(risks[i]), member_index=i)


def loss_difference_family(
    family: FunctionFamily, B: float, truth: Callable | None
) -> FunctionFamily:
    """The family of excess-loss functions g_f(x, y) = (y - f(x))^2 - (y - truth(x))^2.

    With responses and members bounded by B = 1/4 every member is [-1, 1]
    valued, the normalization the deviation bounds assume.
    """
    if truth is None:
        raise CapabilityError("loss-difference family requires the true regression function")
    if not family.members:
        raise CapabilityError("loss-difference family requires an enumerable family")
    members = tuple(
        (lambda xy, f=f: (xy[1] - float(f(xy[0]))) ** 2 - (xy[1] - float(truth(xy[0]))) ** 2)
        for f in family.members
    )
    return FunctionFamily("explicit-table", members, family.declared_vc, range_bound=1.0)


def _average_sq_distance(f: Callable, truth: Callable, laws: np.ndarray, states) -> float:
    diffs = np.array([(float(f(s)) - float(truth(s))) ** 2 for s in states])
    return float((laws @ diffs).mean())


def family_bias(family: FunctionFamily, truth: Callable, laws: np.ndarray, states, B: float) -> float:
    """inf over the family of the average-mean squared distance to the truth.

    Finite families: exhaustive.  Truncated linear spans: the weighted
    projection of the truth, truncated; exact whenever the truncation is
    inactive at the projection (in particular whenever the truth lies in the
    span with values in [-B, B], where the bias is 0).
    """
    if family.kind == "linear-span-truncated":
        weights = np.asarray(laws, dtype=float).mean(axis=0)
        design = np.array([[float(g(s)) for g in family.basis] for s in states])
        target = np.array([float(truth(s)) for s in states])
        gram = design.T @ (weights[:, None] * design)
        try:
            coef = np.linalg.solve(gram, design.T @ (weights * target))
        except np.linalg.LinAlgError:
            coef = np.linalg.solve(gram + RIDGE * np.eye(gram.shape[0]), design.T @ (weights * target))
        proj = np.clip(design @ coef, -B, B)
        return float(weights @ (proj - target) ** 2)
    if not family.members:
        raise DomainError("empty family")
    return min(
        _average_sq_distance(lambda s, f=f: truncate(float(f(s)), B), truth, laws, states)
        for f in family.members
    )


@dataclass(frozen=True)
class WeakErrorEstimate:
    """Monte Carlo estimate of the weak error of the truncated fit."""

    mean: float
    stderr: float
    bias: float
    replications: int
    per_replication: np.ndarray = field(repr=False, default=None)


def weak_error(
    generate_fn: Callable[[int], Dataset],
    family: FunctionFamily,
    B: float,
    truth: Callable,
    replications: int,
) -> WeakErrorEstimate:
    """Estimate E[average-mean |T_B fit - truth|^2] over fresh replications.

    ``generate_fn(rep)`` must return datasets carrying exact marginal laws; the
    bias inf over the family is computed once from the first replication's
    laws (deterministic given the generator).
    """
    if replications < 1:
        raise DomainError("replications must be >= 1")
    errors = np.empty(replications)
    bias = None
    for rep in range(replications):
        data = generate_fn(rep)
        if data.marginal_laws is None:
            raise CapabilityError("weak error requires exact marginal laws")
        result = fit_least_squares(data, family, B)
        errors[rep] = _average_sq_distance(
            result.truncated, truth, data.marginal_laws, data.states
        )
        if bias is None:
            bias = family_bias(family, truth, data.marginal_laws, data.states, B)
    stderr = float(errors.std(ddof=1) / math.sqrt(replications)) if replications > 1 else 0.0
    return WeakErrorEstimate(float(errors.mean()), stderr, float(bias), replications, errors)
