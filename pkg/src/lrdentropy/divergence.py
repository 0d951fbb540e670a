"""Convergence/divergence verdicts for slowly growing partial sums.

Shared by the cepstrum sums (sum k b_k^2) and the reflection-coefficient
products of the strong Szego constant, so both routes use one rule.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "CONVERGENCE_TOL",
    "DIVERGENCE_MIN_SLOPE",
    "DIVERGENCE_INCREMENT_RATIO",
    "SeriesStatus",
    "SeriesAssessment",
    "assess_partial_sums",
    "dyadic_checkpoints",
]

# successive dyadic partial sums closer than this (relative to max(1, |S|)) count as converged
CONVERGENCE_TOL = 1e-8
# d S / d log m below this is never called divergent
DIVERGENCE_MIN_SLOPE = 1e-3
# last doubling increment must keep at least this fraction of the increment two doublings earlier
DIVERGENCE_INCREMENT_RATIO = 0.5


class SeriesStatus(str, enum.Enum):
    CONVERGED = "converged"
    DIVERGENT = "divergent"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class SeriesAssessment:
    status: SeriesStatus
    checkpoints: tuple
    partial_sums: tuple
    slope: float  # fitted d S / d log m over the last checkpoints

    @property
    def last(self) -> float:
        return self.partial_sums[-1]


def dyadic_checkpoints(n_terms: int, first: int = 16) -> np.ndarray:
    """first, 2 first, 4 first, ... up to n_terms (always included)."""
    pts = []
    m = min(first, n_terms)
    while m < n_terms:
        pts.append(m)
        m *= 2
    pts.append(n_terms)
    return np.array(pts)


def assess_partial_sums(checkpoints, partial_sums) -> SeriesAssessment:
    """Classify partial sums S(m) taken at roughly doubling m.

    Converged when the last increment is below CONVERGENCE_TOL. Divergent
    when S grows linearly in log m: positive fitted slope above
    DIVERGENCE_MIN_SLOPE and increments per doubling that are positive and
    not decaying (the harmonic signature). Otherwise indeterminate.
    """
    m = np.asarray(checkpoints, dtype=float)
    s = np.asarray(partial_sums, dtype=float)
    if m.size < 3:
        raise ValueError("need at least three checkpoints")
    tail = slice(-min(4, m.size), None)
    slope = float(np.polyfit(np.log(m[tail]), s[tail], 1)[0])
    inc = np.diff(s)
    status = SeriesStatus.INDETERMINATE
    if not np.all(np.isfinite(s)):
        pass
    elif abs(inc[-1]) < CONVERGENCE_TOL * max(1.0, abs(s[-1])):
        status = SeriesStatus.CONVERGED
    elif (
        slope > DIVERGENCE_MIN_SLOPE
        and np.all(inc[-3:] > 0)
        and inc[-1] >= DIVERGENCE_INCREMENT_RATIO * inc[max(-3, -inc.size)]
    ):
        status = SeriesStatus.DIVERGENT
    return SeriesAssessment(status, tuple(int(x) for x in m), tuple(float(x) for x in s), slope)
