"""Exact probability mass functions on finite alphabets and finite product grids.

These are the substrate for everything else in the package: dependence
coefficients and couplings are computed by explicit atom sums over dense
joint grids, so all types here validate total mass and nonnegativity at
construction time and keep the full grid in memory (with a hard cell cap).
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import MalformedInputError, SizeError

MASS_TOL = 1e-12
DEFAULT_CELL_CAP = 10**6


@dataclass(frozen=True)
class FinitePmf:
    """A probability mass function over a finite ordered alphabet."""

    support: tuple
    probs: np.ndarray

    def __post_init__(self):
        support = tuple(self.support)
        probs = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probs", probs)
        if probs.ndim != 1 or len(support) != probs.shape[0]:
            raise MalformedInputError("support and probs must have matching length")
        if len(set(support)) != len(support):
            raise MalformedInputError("support labels must be unique")
        if probs.size == 0:
            raise MalformedInputError("empty support")
        if probs.min() < -MASS_TOL:
            raise MalformedInputError(f"negative probability {probs.min()}")
        if abs(probs.sum() - 1.0) > MASS_TOL:
            raise MalformedInputError(f"total mass {probs.sum()} != 1")
        object.__setattr__(self, "probs", np.maximum(probs, 0.0))

    def __len__(self) -> int:
        return len(self.support)

    @staticmethod
    def uniform(support: Sequence) -> "FinitePmf":
        k = len(tuple(support))
        return FinitePmf(tuple(support), np.full(k, 1.0 / k))

    @staticmethod
    def point_mass(support: Sequence, atom) -> "FinitePmf":
        support = tuple(support)
        probs = np.zeros(len(support))
        probs[support.index(atom)] = 1.0
        return FinitePmf(support, probs)


@dataclass(frozen=True)
class JointPmf:
    """A pmf over the product grid of finitely many finite alphabets.

    ``probs`` is a dense array with one axis per coordinate.  The total cell
    count is capped (``cell_cap``) because the coupling construction needs
    explicit joints; exceeding the cap is a hard error.
    """

    axes: tuple
    probs: np.ndarray
    cell_cap: int = field(default=DEFAULT_CELL_CAP, compare=False)

    def __post_init__(self):
        axes = tuple(tuple(ax) for ax in self.axes)
        probs = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "axes", axes)
        if probs.shape != tuple(len(ax) for ax in axes):
            raise MalformedInputError(
                f"probs shape {probs.shape} does not match axes {tuple(len(a) for a in axes)}"
            )
        if probs.size > self.cell_cap:
            raise SizeError(f"joint with {probs.size} cells exceeds cap {self.cell_cap}")
        if probs.min() < -MASS_TOL:
            raise MalformedInputError(f"negative cell probability {probs.min()}")
        if abs(probs.sum() - 1.0) > MASS_TOL:
            raise MalformedInputError(f"total mass {probs.sum()} != 1")
        object.__setattr__(self, "probs", np.maximum(probs, 0.0))

    @property
    def n_axes(self) -> int:
        return len(self.axes)

    def marginal(self, keep: Sequence[int]) -> "JointPmf":
        """Marginalize onto the axis positions in ``keep`` (preserving their order)."""
        keep = tuple(int(k) for k in keep)
        if len(set(keep)) != len(keep) or any(k < 0 or k >= self.n_axes for k in keep):
            raise MalformedInputError(f"invalid axis subset {keep}")
        drop = tuple(i for i in range(self.n_axes) if i not in keep)
        probs = np.transpose(self.probs, keep + drop)
        if drop:
            probs = probs.sum(axis=tuple(range(len(keep), self.n_axes)))
        return JointPmf(tuple(self.axes[k] for k in keep), probs, cell_cap=self.cell_cap)

    def marginal_pmf(self, axis: int) -> FinitePmf:
        """One-dimensional marginal as a FinitePmf."""
        drop = tuple(i for i in range(self.n_axes) if i != axis)
        probs = self.probs.sum(axis=drop) if drop else self.probs
        return FinitePmf(self.axes[axis], probs)

    def grouped(self, left: Sequence[int], right: Sequence[int]) -> "JointPmf":
        """Two-axis joint of the grouped coordinates (left block, right block).

        Each block is flattened into a single product alphabet whose labels are
        tuples of the member labels.
        """
        left, right = tuple(left), tuple(right)
        if set(left) & set(right):
            raise MalformedInputError("left and right groups must be disjoint")
        marg = self.marginal(left + right)
        lsize = int(np.prod([len(self.axes[k]) for k in left], dtype=np.int64)) if left else 1
        rsize = int(np.prod([len(self.axes[k]) for k in right], dtype=np.int64)) if right else 1
        probs = marg.probs.reshape(lsize, rsize)
        llabels = tuple(itertools.product(*(self.axes[k] for k in left)))
        rlabels = tuple(itertools.product(*(self.axes[k] for k in right)))
        return JointPmf((llabels, rlabels), probs, cell_cap=self.cell_cap)

    @staticmethod
    def from_product(factors: Sequence[FinitePmf], cell_cap: int = DEFAULT_CELL_CAP) -> "JointPmf":
        probs = np.array(1.0)
        for f in factors:
            probs = np.multiply.outer(probs, f.probs)
        probs = probs.reshape(tuple(len(f) for f in factors))
        return JointPmf(tuple(f.support for f in factors), probs, cell_cap=cell_cap)


@dataclass(frozen=True)
class MarkovChainSpec:
    """A finite-state Markov chain: states, row-stochastic transition, initial law."""

    states: tuple
    transition: np.ndarray
    initial: FinitePmf

    def __post_init__(self):
        states = tuple(self.states)
        transition = np.asarray(self.transition, dtype=float)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "transition", transition)
        k = len(states)
        if transition.shape != (k, k):
            raise MalformedInputError(f"transition shape {transition.shape} != ({k},{k})")
        if transition.min() < -MASS_TOL:
            raise MalformedInputError("negative transition probability")
        rowsums = transition.sum(axis=1)
        if np.abs(rowsums - 1.0).max() > MASS_TOL:
            raise MalformedInputError(f"transition rows must sum to 1, got {rowsums}")
        if self.initial.support != states:
            raise MalformedInputError("initial law support must equal the state set")

    @property
    def n_states(self) -> int:
        return len(self.states)

    def marginal_at(self, step: int) -> np.ndarray:
        """Law of the chain at time ``step`` (1-based; step 1 is the initial law)."""
        if step < 1:
            raise MalformedInputError("step must be >= 1")
        mu = self.initial.probs.copy()
        for _ in range(step - 1):
            mu = mu @ self.transition
        return mu

    def marginal_matrix(self, n: int) -> np.ndarray:
        """Stacked marginals mu_1..mu_n as an (n, states) array."""
        out = np.empty((n, self.n_states))
        mu = self.initial.probs.copy()
        for j in range(n):
            out[j] = mu
            mu = mu @ self.transition
        return out


def chain_from_json(doc) -> MarkovChainSpec:
    """Build a MarkovChainSpec from {"states": [...], "transition": [[...]], "initial": [...]}."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    try:
        states = tuple(doc["states"])
        transition = np.asarray(doc["transition"], dtype=float)
        initial = FinitePmf(states, np.asarray(doc["initial"], dtype=float))
    except (KeyError, TypeError) as exc:
        raise MalformedInputError(f"malformed chain document: {exc}") from exc
    return MarkovChainSpec(states, transition, initial)


def joint_from_json(doc, cell_cap: int = DEFAULT_CELL_CAP) -> JointPmf:
    """Build a JointPmf from {"axes": [[...], ...], "probs": [...]} (row-major probs)."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    try:
        axes = tuple(tuple(ax) for ax in doc["axes"])
        shape = tuple(len(ax) for ax in axes)
        probs = np.asarray(doc["probs"], dtype=float).reshape(shape)
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInputError(f"malformed joint document: {exc}") from exc
    return JointPmf(axes, probs, cell_cap=cell_cap)


def joint_to_json(joint: JointPmf) -> dict:
    return {
        "axes": [list(ax) for ax in joint.axes],
        "probs": joint.probs.ravel().tolist(),
    }
