"""Small shared statistics helpers for Monte Carlo frequencies."""
from __future__ import annotations

import math


def wilson_stderr(successes: int, trials: int, z: float = 3.0) -> float:
    """Wilson-score standard error of a binomial frequency.

    Shrinks toward 1/2 with strength z**2 pseudo-counts so the error never
    collapses to zero at observed frequencies of 0 or 1.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    center = (successes + z * z / 2.0) / (trials + z * z)
    return math.sqrt(center * (1.0 - center) / (trials + z * z))
