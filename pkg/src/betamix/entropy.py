"""Empirical L1 covering numbers and closed-form uniform entropy estimates.

Exact covering numbers are minimal internal covers found by exhaustive set
cover (small families only); the greedy farthest-point cover provides an upper
bound for larger families.  The closed forms are the Sauer-Shelah estimate for
classes of bounded VC dimension and the bounded-weight network estimate.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, SizeError

EXACT_COVER_MAX_MEMBERS = 20
# strict d < r implemented with a margin to avoid boundary flapping
STRICT_MARGIN = 1e-12


@dataclass(frozen=True)
class FunctionFamily:
    """A finite, evaluable hypothesis class.

    ``members`` are callables from input points to reals.  Linear spans carry
    their basis instead (``members`` empty); they are fitted, not enumerated.
    """

    kind: str
    members: tuple = ()
    declared_vc: int | None = None
    range_bound: float | None = None
    basis: tuple = ()

    def values(self, points: Sequence) -> np.ndarray:
        """Member-by-point value matrix."""
        return np.array([[float(f(z)) for z in points] for f in self.members])

    @staticmethod
    def from_table(values, declared_vc=None, range_bound=None) -> "FunctionFamily":
        """Explicit table family: points are the integer indices 0..n_points-1."""
        table = np.asarray(values, dtype=float)
        members = tuple((lambda j, row=row: float(row[int(j)])) for row in table)
        return FunctionFamily("explicit-table", members, declared_vc, range_bound)

    @staticmethod
    def linear_span(basis: Sequence[Callable], range_bound=None) -> "FunctionFamily":
        """Truncated linear span; declared VC bound is dim + 1."""
        basis = tuple(basis)
        return FunctionFamily(
            "linear-span-truncated",
            (),
            declared_vc=vc_dimension_bound(len(basis)),
            range_bound=range_bound,
            basis=basis,
        )


def l1_distances(values: np.ndarray) -> np.ndarray:
    """Pairwise empirical L1 seminorm distances between family members."""
    values = np.asarray(values, dtype=float)
    return np.abs(values[:, None, :] - values[None, :, :]).mean(axis=2)


def _cover_from_distances(dist: np.ndarray, r: float) -> int:
    """Minimal internal cover size from a pairwise distance matrix (strict radius)."""
    if r <= 0:
        raise DomainError("radius must be positive")
    n = dist.shape[0]
    covers = [
        int(sum(1 << j for j in range(n) if dist[i, j] <= r - STRICT_MARGIN))
        for i in range(n)
    ]
    full = (1 << n) - 1
    for size in range(1, n + 1):
        for centers in itertools.combinations(range(n), size):
            mask = 0
            for c in centers:
                mask |= covers[c]
            if mask == full:
                return size
    raise AssertionError("unreachable: the family always covers itself")


def covering_number_exact(values: np.ndarray, r: float) -> int:
    """Minimal internal L1 r-cover of a small family given its value matrix."""
    values = np.asarray(values, dtype=float)
    if values.shape[0] > EXACT_COVER_MAX_MEMBERS:
        raise SizeError(
            f"{values.shape[0]} members exceeds exact-mode cap "
            f"{EXACT_COVER_MAX_MEMBERS}; use covering_number_greedy"
        )
    return _cover_from_distances(l1_distances(values), r)


def covering_number_greedy(values: np.ndarray, r: float) -> int:
    """Farthest-point greedy internal L1 r-cover size (upper bound on the exact one)."""
    if r <= 0:
        raise DomainError("radius must be positive")
    dist = l1_distances(np.asarray(values, dtype=float))
    n = dist.shape[0]
    centers = [0]
    min_dist = dist[0].copy()
    while True:
        uncovered = min_dist > r - STRICT_MARGIN
        if not uncovered.any():
            return len(centers)
        nxt = int(np.argmax(np.where(uncovered, min_dist, -np.inf)))
        centers.append(nxt)
        min_dist = np.minimum(min_dist, dist[nxt])


def sauer_shelah_entropy(V: int, B: float, r: float) -> float:
    """Closed-form log covering bound for a [0, B]-valued class of VC dimension V.

    Valid as printed for r <= B/4; for r in (B/4, B] the estimate at scale 4B
    is used, and for r > B the bound is 0.
    """
    if V < 1:
        raise DomainError("V must be a positive integer")
    if B <= 0:
        raise DomainError("B must be positive")
    if r <= 0:
        raise DomainError("radius must be positive")
    if r > B:
        return 0.0
    if r > B / 4.0:
        return sauer_shelah_entropy(V, 4.0 * B, r)
    lbr = math.log(B / r)
    return math.log(3.0) + V * (1.0 + math.log(2.0) + lbr + math.log(1.0 + math.log(3.0) + lbr))


def neural_net_entropy(N: int, d: int, B: float, r: float) -> float:
    """Log covering bound for one-hidden-layer networks with weight budget B.

    Inputs in R^d, N hidden units, outer weights summing (in absolute value) to
    at most B; valid for radii in (0, B/2).
    """
    if N < 1 or d < 1:
        raise DomainError("N and d must be positive integers")
    if B <= 0:
        raise DomainError("B must be positive")
    if not 0.0 < r < B / 2.0:
        raise DomainError(f"radius must lie in (0, B/2), got {r}")
    return ((2 * d + 5) * N + 1) * (1.0 + math.log(12.0) + math.log(B / r) + math.log(N + 1.0))


def vc_dimension_bound(linear_dim: int) -> int:
    """Declared VC upper bound for the truncation of a linear span: dim + 1."""
    if linear_dim < 1:
        raise DomainError("linear dimension must be >= 1")
    return linear_dim + 1


@dataclass(frozen=True)
class EntropyEstimate:
    """A (sample-size, radius) -> log-covering-bound evaluator.

    ``valid_radius`` is the closed interval of radii where the underlying
    closed form applies as printed.
    """

    evaluator: Callable[[int, float], float]
    valid_radius: tuple = (0.0, math.inf)

    def __call__(self, size: int, r: float) -> float:
        return float(self.evaluator(size, r))


def sauer_shelah_estimate(V: int, B: float) -> EntropyEstimate:
    return EntropyEstimate(lambda size, r: sauer_shelah_entropy(V, B, r), (0.0, B / 4.0))


def neural_net_estimate(N: int, d: int, B: float) -> EntropyEstimate:
    return EntropyEstimate(lambda size, r: neural_net_entropy(N, d, B, r), (0.0, B / 2.0))


def finite_family_entropy(n_members: int) -> EntropyEstimate:
    """log(n_members) is always a valid uniform entropy estimate for a finite class."""
    if n_members < 1:
        raise DomainError("n_members must be >= 1")
    return EntropyEstimate(lambda size, r: math.log(n_members))


def zero_entropy() -> EntropyEstimate:
    return EntropyEstimate(lambda size, r: 0.0)
