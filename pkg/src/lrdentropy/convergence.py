"""Measured convergence rate of h_e(n) to the entropy rate.

Two candidate shapes are fitted in log-log space: C/n, and C log(n)/n (any
prefactor such as (1 - 2H)^2 is absorbed into C). The measured local
slopes d log gap / d log n are always reported next to the fits.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .models import ProcessSpec
from .quadrature import QuadratureConfig
from .toeplitz import ConvergenceSeries, conditional_entropy_sequence

__all__ = [
    "ZERO_GAP_TOL",
    "RateModel",
    "RateFit",
    "RateFitError",
    "Verdict",
    "RateReport",
    "convergence_series",
    "fit_rate",
    "local_slopes",
    "rate_report",
]

# gaps at or below this are numerically zero (Levinson rounding is ~1e-16)
ZERO_GAP_TOL = 1e-13


class RateModel(str, enum.Enum):
    C_OVER_N = "C_over_n"
    C_LOGN_OVER_N = "C_logn_over_n"

    def shape(self, n):
        n = np.asarray(n, dtype=float)
        return 1.0 / n if self is RateModel.C_OVER_N else np.log(n) / n


class RateFitError(ValueError):
    pass


@dataclass(frozen=True)
class RateFit:
    model: RateModel
    C: float
    residual_norm: float  # RMS of log gap - log(C shape) on the window
    fit_window: tuple
    competing_residual: Optional[float] = None

    def __post_init__(self):
        lo, hi = self.fit_window
        if not lo < hi:
            raise ValueError("fit window needs n_lo < n_hi")
        if self.residual_norm < 0:
            raise ValueError("residual_norm must be >= 0")


def convergence_series(spec: ProcessSpec, n_max: int, cfg: QuadratureConfig | None = None) -> ConvergenceSeries:
    if n_max < 16:
        raise ValueError("n_max must be >= 16")
    return conditional_entropy_sequence(spec, n_max, cfg)


def _window_gaps(series: ConvergenceSeries, window):
    lo, hi = window
    if not (2 <= lo < hi <= series.n[-1]):
        raise RateFitError(f"window {window} outside [2, {series.n[-1]}]")
    return series.n[lo - 1:hi], series.gap[lo - 1:hi]


def _log_fit(n, gap, model: RateModel):
    resid = np.log(gap) - np.log(model.shape(n))
    log_c = resid.mean()
    return math.exp(log_c), float(np.sqrt(np.mean((resid - log_c) ** 2)))


def fit_rate(series: ConvergenceSeries, model, fit_window=None) -> RateFit:
    """Least-squares fit of log gap(n) = log C + log shape(n) on the window.

    A window of numerically zero gaps returns C = 0; a window mixing zero or
    negative gaps with positive ones is refused.
    """
    model = RateModel(model)
    n_max = int(series.n[-1])
    window = tuple(fit_window) if fit_window else (max(2, n_max // 4), n_max)
    n, gap = _window_gaps(series, window)
    if np.all(np.abs(gap) <= ZERO_GAP_TOL):
        return RateFit(model, 0.0, 0.0, window, 0.0)
    if np.any(gap <= ZERO_GAP_TOL):
        raise RateFitError(f"non-positive gaps in window {window}")
    c, res = _log_fit(n, gap, model)
    other = RateModel.C_LOGN_OVER_N if model is RateModel.C_OVER_N else RateModel.C_OVER_N
    _, other_res = _log_fit(n, gap, other)
    return RateFit(model, c, res, window, other_res)


def local_slopes(series: ConvergenceSeries, first: int = 16):
    """[(n, slope)] with slope = log2(gap(2n) / gap(n)) for positive gaps."""
    out = []
    n = first
    while 2 * n <= series.n[-1]:
        g1, g2 = series.at(n), series.at(2 * n)
        if g1 > ZERO_GAP_TOL and g2 > ZERO_GAP_TOL:
            out.append((n, math.log(g2 / g1) / math.log(2.0)))
        n *= 2
    return out


class Verdict(str, enum.Enum):
    C_OVER_N = "consistent_with_C_over_n"
    LOGN_OVER_N = "consistent_with_logn_over_n"
    FASTER = "faster_than_both"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class RateReport:
    n_max: int
    fit_window: tuple
    local_slopes: list
    fits: dict = field(default_factory=dict)  # model name -> RateFit or None
    sup_n_gap: float = 0.0
    verdict: Verdict = Verdict.INDETERMINATE
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "n_max": self.n_max,
            "fit_window": list(self.fit_window),
            "local_slopes": [[n, s] for n, s in self.local_slopes],
            "fits": {k: (None if v is None else {**asdict(v), "model": v.model.value,
                                                  "fit_window": list(v.fit_window)})
                     for k, v in self.fits.items()},
            "sup_n_gap": self.sup_n_gap,
            "verdict": self.verdict.value,
            "note": self.note,
        }


def rate_report(spec: ProcessSpec, n_max: int = 4096, cfg: QuadratureConfig | None = None,
                series: ConvergenceSeries | None = None) -> RateReport:
    """Local slopes, both fitted constants and a verdict for one model."""
    series = series or convergence_series(spec, n_max, cfg)
    n_max = int(series.n[-1])
    window = (max(2, n_max // 4), n_max)
    slopes = local_slopes(series)
    sup_n_gap = float(np.max(series.n * np.maximum(series.gap, 0.0)))
    _, gaps = _window_gaps(series, window)

    fits = {}
    note = ""
    for model in RateModel:
        try:
            fits[model.value] = fit_rate(series, model, window)
        except RateFitError as exc:
            fits[model.value] = None
            note = str(exc)

    if np.all(np.abs(gaps) <= ZERO_GAP_TOL):
        verdict = Verdict.FASTER
        note = "gap is numerically zero on the fit window"
    elif fits[RateModel.C_OVER_N.value] is None:
        verdict = Verdict.FASTER if slopes and slopes[-1][1] < -1.5 else Verdict.INDETERMINATE
    elif slopes and slopes[-1][1] < -1.5:
        verdict = Verdict.FASTER
    elif slopes and slopes[-1][1] > -0.5:
        verdict = Verdict.INDETERMINATE
        note = "gap decays slower than either candidate"
    else:
        a = fits[RateModel.C_OVER_N.value].residual_norm
        b = fits[RateModel.C_LOGN_OVER_N.value].residual_norm
        verdict = Verdict.C_OVER_N if a <= b else Verdict.LOGN_OVER_N
    return RateReport(n_max, window, slopes, fits, sup_n_gap, verdict, note)
