"""Exact beta-dependence coefficients for finite-alphabet processes and Markov chains.

For finite alphabets the supremum over finite partitions in the coefficient's
characterization is attained at the atomic partition, so every quantity here
is an exact (double-precision) atom sum over an explicit joint law.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateFitError, MalformedInputError
from .pmf import JointPmf, MarkovChainSpec


def beta_coefficient(joint: JointPmf) -> float:
    """Dependence coefficient between the two coordinates of a two-axis joint.

    Returns (1/2) * sum over atom pairs |P(E x F) - P(E)P(F)|.  Zero exactly
    on product joints; symmetric under axis swap; always in [0, 1].
    """
    if joint.n_axes != 2:
        raise MalformedInputError(f"expected a two-axis joint, got {joint.n_axes} axes")
    p = joint.probs
    left = p.sum(axis=1)
    right = p.sum(axis=0)
    return 0.5 * float(np.abs(p - np.outer(left, right)).sum())


def _resolve_indices(process: JointPmf, indices) -> tuple:
    if indices is None:
        return tuple(range(1, process.n_axes + 1))
    indices = tuple(int(i) for i in indices)
    if len(indices) != process.n_axes:
        raise MalformedInputError("one index label per axis is required")
    if len(set(indices)) != len(indices):
        raise MalformedInputError("index labels must be distinct")
    return indices


def beta_m_dependence(process: JointPmf, m: int, l: int, indices: Sequence[int] | None = None) -> float:
    """l-th coefficient of m-dependence of a finite process.

    The coefficient between the coordinate at index ``l`` and the coordinates at
    indices <= l - m, computed by marginalizing onto the two groups.  Empty
    groups (e.g. l not in the index set) give 0 by convention.
    """
    if m < 1 or l < 1:
        raise MalformedInputError("m and l must be positive")
    idx = _resolve_indices(process, indices)
    left = tuple(pos for pos, j in enumerate(idx) if j <= l - m)
    right = tuple(pos for pos, j in enumerate(idx) if j == l)
    if not left or not right:
        return 0.0
    return beta_coefficient(process.grouped(left, right))


def beta_max(process: JointPmf, m: int, indices: Sequence[int] | None = None) -> float:
    """Maximal coefficient of m-dependence: sup over l of beta_m_dependence."""
    idx = _resolve_indices(process, indices)
    return max(beta_m_dependence(process, m, l, indices=idx) for l in range(1, max(idx) + 1))


def pairwise_beta(process: JointPmf, left: Sequence[int], right: Sequence[int]) -> float:
    """Coefficient between two disjoint groups of axis positions."""
    if not left or not right:
        return 0.0
    return beta_coefficient(process.grouped(left, right))


def markov_beta(chain: MarkovChainSpec, m: int, horizon: int = 64) -> float:
    """Lag-m dependence coefficient of a finite-state Markov chain.

    By the Markov property this is sup_n beta(sigma(Z_n), sigma(Z_{n+m})); the
    sup is scanned for n = 1..horizon.  The joint of (Z_n, Z_{n+m}) is
    diag(mu_n) P^m with mu_n the n-step marginal.
    """
    if m < 1:
        raise MalformedInputError("m must be >= 1")
    if horizon < 1:
        raise MalformedInputError("horizon must be >= 1")
    step_m = np.linalg.matrix_power(chain.transition, m)
    mu = chain.initial.probs.copy()
    best = 0.0
    for _ in range(horizon):
        joint = JointPmf((chain.states, chain.states), mu[:, None] * step_m)
        best = max(best, beta_coefficient(joint))
        mu = mu @ chain.transition
    return best


@dataclass(frozen=True)
class MixingFit:
    """A dominating mixing-rate envelope fitted to (m, beta) points.

    subexponential: beta(m) <= a * exp(-b * m**gamma)
    subpolynomial:  beta(m) <= a * m**(-gamma)
    """

    model: str
    a: float
    b: float | None
    gamma: float

    def envelope(self, m) -> float:
        m = np.asarray(m, dtype=float)
        if self.model == "subexponential":
            val = self.a * np.exp(-self.b * m**self.gamma)
        else:
            val = self.a * m ** (-self.gamma)
        return float(val) if val.ndim == 0 else val


def fit_mixing_rate(
    points: Sequence[tuple],
    model: str,
    gamma: float | None = None,
    b: float | None = None,
) -> MixingFit:
    """Fit a dominating envelope of the requested shape to (m, beta) points.

    The rate parameter (b for the subexponential model with gamma fixed, gamma
    for the subpolynomial model) is taken from the caller when supplied and
    otherwise obtained by log-linear least squares on the strictly positive
    points.  The amplitude a is then set to the smallest value giving pointwise
    dominance, which is re-verified before returning.
    """
    if model not in ("subexponential", "subpolynomial"):
        raise MalformedInputError(f"unknown model {model!r}")
    pts = [(float(m), float(v)) for m, v in points]
    if any(m < 1 for m, _ in pts):
        raise MalformedInputError("lag values must be >= 1")
    pos = [(m, v) for m, v in pts if v > 0.0]
    if not pos:
        raise DegenerateFitError("no strictly positive beta values to fit")
    ms = np.array([m for m, _ in pos])
    logv = np.log([v for _, v in pos])

    if model == "subexponential":
        g = 1.0 if gamma is None else float(gamma)
        if g <= 0:
            raise MalformedInputError("gamma must be positive")
        if b is None:
            if len(pos) == 1:
                b = 0.0
            else:
                # log beta = log a - b * m**gamma
                slope, _ = np.polyfit(ms**g, logv, 1)
                b = max(-float(slope), 0.0)
        a = float(np.max([v * math.exp(b * m**g) for m, v in pos]))
        fit = MixingFit("subexponential", a, float(b), g)
    else:
        if gamma is None:
            if len(pos) == 1:
                gamma = 1.0
            else:
                slope, _ = np.polyfit(np.log(ms), logv, 1)
                gamma = max(-float(slope), 0.0)
        a = float(np.max([v * m ** float(gamma) for m, v in pos]))
        fit = MixingFit("subpolynomial", a, None, float(gamma))

    for m, v in pts:
        env = fit.envelope(m)
        if v > env * (1 + 1e-12) + 1e-300:
            raise DegenerateFitError(f"fitted envelope fails dominance at m={m}: {v} > {env}")
    return fit
