"""Cepstral coefficients of log spectral densities and past-future mutual information.

b_k = (1/2pi) int_{-pi}^{pi} log f(lam) e^{-ik lam} dlam. The origin singularity
is split off exactly: log f = t log|2 sin(lam/2)| + r(lam) with t the tail
exponent, and log|2 sin(lam/2)| = -sum_{k>=1} cos(k lam)/k contributes -t/(2k).
The bounded remainder r is handled numerically.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .divergence import SeriesAssessment, SeriesStatus, assess_partial_sums, dyadic_checkpoints
from .models import (
    ARFIMA,
    DEFAULT_TRUNCATION,
    FGN,
    ProcessSpec,
    arfima_spectral_density,
    autocovariance,
    classify_dependence,
    Dependence,
    fgn_cf,
    fgn_lattice_sum,
)
from .quadrature import QuadratureConfig, QuadratureError, quad
from .special import sine_integral

__all__ = [
    "CepstrumSeries",
    "QUADRATURE_CROSSOVER",
    "DEFAULT_GRID_EXPONENT",
    "log_density_remainder",
    "cepstral_coefficients",
    "weighted_cepstrum_partial_sum",
    "weighted_cepstrum_assessment",
    "MutualInformationResult",
    "mutual_information_past_future",
    "fgn_asymptotic_cepstrum",
    "li_covariance_criterion",
]

QUADRATURE_CROSSOVER = 64
DEFAULT_GRID_EXPONENT = 20
_LAM_FLOOR = 1e-10


@dataclass(frozen=True)
class CepstrumSeries:
    """b_1..b_K (``b[k-1]`` is b_k); b_0 is kept apart."""

    b: np.ndarray
    b0: float
    method: str  # quadrature | fft_grid
    error_bound: np.ndarray
    n_quadrature: int = 0
    failures: tuple = ()

    def __len__(self):
        return self.b.size

    def coefficient(self, k: int) -> float:
        if k == 0:
            return self.b0
        return float(self.b[k - 1])


def log_density_remainder(spec: ProcessSpec, truncation: int = DEFAULT_TRUNCATION):
    """(t, r) with log f(lam) = t log|2 sin(lam/2)| + r(lam), r bounded near 0."""
    if isinstance(spec, FGN):
        H = spec.hurst
        t = 1.0 - 2.0 * H
        log4cf = math.log(4.0 * fgn_cf(H, spec.variance))

        def r(lam):
            lam = np.maximum(np.abs(np.asarray(lam, dtype=float)), _LAM_FLOOR)
            log_2sin = np.log(2.0 * np.sin(lam / 2.0))
            # log f = log(4 c_f) + 2 log sin(lam/2) + log S(lam)
            return log4cf - 2.0 * math.log(2.0) + (2.0 - t) * log_2sin + np.log(
                fgn_lattice_sum(lam, H, truncation))
        return t, r

    t = -2.0 * spec.d
    arma_part = ARFIMA(0.0, spec.ar, spec.ma, spec.innovation_variance)

    def r(lam):
        lam = np.maximum(np.abs(np.asarray(lam, dtype=float)), _LAM_FLOOR)
        return np.log(arfima_spectral_density(arma_part, lam))
    return t, r


@functools.lru_cache(maxsize=32)
def _remainder_fft(spec: ProcessSpec, grid_exponent: int, truncation: int) -> np.ndarray:
    n = 2**grid_exponent
    _, r = log_density_remainder(spec, truncation)
    half = r(2.0 * math.pi * np.arange(n // 2 + 1) / n)
    full = np.concatenate((half, half[-2:0:-1]))
    coeffs = np.fft.rfft(full).real / n
    coeffs.setflags(write=False)
    return coeffs


def cepstral_coefficients(spec: ProcessSpec, k_max: int, cfg: QuadratureConfig | None = None,
                          grid_exponent: int = DEFAULT_GRID_EXPONENT,
                          crossover: int = QUADRATURE_CROSSOVER,
                          truncation: int = DEFAULT_TRUNCATION) -> CepstrumSeries:
    """b_1..b_{k_max}: per-k quadrature up to ``crossover``, FFT grid above."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    cfg = cfg or QuadratureConfig()
    t, r = log_density_remainder(spec, truncation)

    def rs(lam):
        return float(r(lam))

    n_quad = min(k_max, crossover)
    b = np.empty(k_max)
    err = np.empty(k_max)
    failures = []
    try:
        b0 = quad(rs, 0.0, math.pi, cfg)[0] / math.pi
    except QuadratureError as exc:
        failures.append((0, str(exc)))
        b0 = float("nan")
    for k in range(1, n_quad + 1):
        try:
            val, e = quad(rs, 0.0, math.pi, cfg, weight="cos", wvar=k)
        except QuadratureError as exc:
            failures.append((k, str(exc)))
            val, e = float("nan"), float("inf")
        b[k - 1] = val / math.pi - t / (2.0 * k)
        err[k - 1] = e / math.pi
    method = "quadrature"
    if k_max > n_quad:
        method = "fft_grid"
        coeffs = _remainder_fft(spec, grid_exponent, truncation)
        ks = np.arange(n_quad + 1, k_max + 1)
        b[n_quad:] = coeffs[ks] - t / (2.0 * ks)
        # crossover discrepancy is the empirical accuracy of the grid
        grid_at_cross = coeffs[n_quad] - t / (2.0 * n_quad)
        candidates = [abs(grid_at_cross - b[n_quad - 1]), err[n_quad - 1], 1e-15]
        err[n_quad:] = max(c for c in candidates if math.isfinite(c))
    b.setflags(write=False)
    err.setflags(write=False)
    return CepstrumSeries(b, b0, method, err, n_quad, tuple(failures))


def weighted_cepstrum_partial_sum(series: CepstrumSeries, m: int) -> float:
    """sum_{k=1}^m k b_k^2."""
    if not 1 <= m <= len(series):
        raise ValueError(f"m must lie in [1, {len(series)}]")
    k = np.arange(1, m + 1)
    return float(np.sum(k * series.b[:m] ** 2))


def weighted_cepstrum_assessment(series: CepstrumSeries, first: int = 16) -> SeriesAssessment:
    """Partial sums of k b_k^2 at dyadic m, classified by the shared rule."""
    k = np.arange(1, len(series) + 1)
    cum = np.cumsum(k * series.b**2)
    ms = dyadic_checkpoints(len(series), first)
    return assess_partial_sums(ms, cum[ms - 1])


@dataclass(frozen=True)
class MutualInformationResult:
    status: SeriesStatus
    value: Optional[float]
    assessment: SeriesAssessment
    note: str = ""

    @property
    def divergent(self) -> bool:
        return self.status is SeriesStatus.DIVERGENT


def mutual_information_past_future(spec: ProcessSpec, cfg: QuadratureConfig | None = None,
                                   n_terms: int = 4096) -> MutualInformationResult:
    """I_pf = 1/2 sum k b_k^2, or a divergence verdict.

    LRD models are divergent outright; the partial-sum trace is still
    computed so callers can show it.
    """
    series = cepstral_coefficients(spec, n_terms, cfg)
    assessment = weighted_cepstrum_assessment(series)
    if classify_dependence(spec) is Dependence.LRD:
        return MutualInformationResult(SeriesStatus.DIVERGENT, None, assessment,
                                       "long-range dependent: infinite by construction")
    if assessment.status is SeriesStatus.CONVERGED:
        return MutualInformationResult(SeriesStatus.CONVERGED, 0.5 * assessment.last, assessment)
    note = ""
    if assessment.status is SeriesStatus.DIVERGENT:
        note = "partial sums grow like log m although the model is not long-range dependent"
    return MutualInformationResult(assessment.status, None, assessment, note)


def fgn_asymptotic_cepstrum(H: float, k: int) -> float:
    """(1 - 2H)(-Si(pi)) / (pi k): large-k cepstrum of the low-frequency FGN density."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return (1.0 - 2.0 * H) * (-sine_integral(math.pi)) / (math.pi * k)


def li_covariance_criterion(spec: ProcessSpec, m: int) -> float:
    """sum_{k=1}^m k gamma(k)^2."""
    if m < 1:
        raise ValueError("m must be >= 1")
    g = autocovariance(spec, m).gamma
    k = np.arange(1, m + 1)
    return float(np.sum(k * g[1:] ** 2))
