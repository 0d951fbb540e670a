"""Finite-n entropy from Toeplitz covariance matrices via the Levinson-Durbin recursion."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cepstrum import cepstral_coefficients
from .divergence import SeriesAssessment, SeriesStatus, assess_partial_sums, dyadic_checkpoints
from .entropy import HALF_LOG_2PI_E, EntropyRateResult, entropy_rate
from .models import CovarianceSequence, ProcessSpec, autocovariance, spectral_function
from .quadrature import QuadratureConfig, log_spectrum_mean

__all__ = [
    "LevinsonError",
    "LevinsonResult",
    "levinson",
    "ConvergenceSeries",
    "conditional_entropy_sequence",
    "excess_entropy_partial_sum",
    "szego_limit_G",
    "StrongSzegoResult",
    "strong_szego_E",
]


class LevinsonError(ArithmeticError):
    """The Toeplitz matrix stopped being positive definite at size ``k``."""

    def __init__(self, k: int, value: float):
        super().__init__(f"non-positive innovation variance {value!r} at k={k}")
        self.k = k
        self.value = value


@dataclass(frozen=True)
class LevinsonResult:
    """v_1..v_n (``innovation_variances[k-1]`` is v_k) and alpha_1..alpha_{n-1}."""

    innovation_variances: np.ndarray
    reflection_coeffs: np.ndarray

    @property
    def n(self) -> int:
        return self.innovation_variances.size

    def log_determinants(self) -> np.ndarray:
        """log|K^(k)| for k = 1..n."""
        return np.cumsum(np.log(self.innovation_variances))


def levinson(gamma) -> LevinsonResult:
    """Durbin's recursion on gamma(0..n) -> v_1..v_{n+1}, alpha_1..alpha_n.

    v_k = |K^(k)| / |K^(k-1)| is the one-step prediction error variance from
    k-1 past values; alpha_k is the lag-k partial autocorrelation and
    v_{k+1} = v_k (1 - alpha_k^2).
    """
    g = gamma.gamma if isinstance(gamma, CovarianceSequence) else np.asarray(gamma, dtype=float)
    n = g.size - 1
    v = np.empty(n + 1)
    alpha = np.empty(n)
    phi = np.zeros(n)  # prediction coefficients, phi[:k] valid at step k
    v[0] = g[0]
    if not v[0] > 0:
        raise LevinsonError(1, float(v[0]))
    for k in range(1, n + 1):
        acc = g[k] - np.dot(phi[: k - 1], g[k - 1:0:-1])
        a = acc / v[k - 1]
        if k > 1:
            phi[: k - 1] -= a * phi[k - 2::-1]
        phi[k - 1] = a
        alpha[k - 1] = a
        v[k] = v[k - 1] * (1.0 - a * a)
        if not (v[k] > 0 and abs(a) < 1):
            raise LevinsonError(k + 1, float(v[k]))
    return LevinsonResult(v, alpha)


@dataclass(frozen=True)
class ConvergenceSeries:
    """h_e(n) and gap(n) = h_e(n) - h for n = 1..n_max."""

    n: np.ndarray
    h_e: np.ndarray
    gap: np.ndarray
    entropy_rate_used: EntropyRateResult
    levinson: Optional[LevinsonResult] = None

    def at(self, n: int) -> float:
        return float(self.gap[n - 1])


def conditional_entropy_sequence(spec: ProcessSpec, n_max: int,
                                 cfg: QuadratureConfig | None = None) -> ConvergenceSeries:
    """h_e(n) = 1/2 log(2 pi e v_n) and its gap to the entropy rate."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    lev = levinson(autocovariance(spec, n_max - 1))
    rate = entropy_rate(spec, cfg)
    log_v = np.log(lev.innovation_variances)
    h_e = HALF_LOG_2PI_E + 0.5 * log_v
    # gap = 1/2 log(v_n / G) with log G = 2 (h - 1/2 log 2 pi e)
    gap = 0.5 * log_v - (rate.value - HALF_LOG_2PI_E)
    return ConvergenceSeries(np.arange(1, n_max + 1), h_e, gap, rate, lev)


def excess_entropy_partial_sum(spec: ProcessSpec, m: int, cfg: QuadratureConfig | None = None) -> float:
    """sum_{n=1}^m (h_e(n) - h)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return float(np.sum(conditional_entropy_sequence(spec, m, cfg).gap))


def szego_limit_G(spec: ProcessSpec, cfg: QuadratureConfig | None = None) -> float:
    """G = exp((1/2pi) int log(2 pi f)), the limit of v_n."""
    mean, _ = log_spectrum_mean(spectral_function(spec), cfg)
    return math.exp(mean)


@dataclass(frozen=True)
class StrongSzegoResult:
    status: SeriesStatus
    value: Optional[float]  # E(mu) when converged
    product_route: SeriesAssessment  # partial sums of -sum j log(1 - alpha_j^2)
    cepstrum_route: SeriesAssessment  # partial sums of sum k b_k^2

    @property
    def log_product(self) -> float:
        return self.product_route.last

    @property
    def log_cepstrum(self) -> float:
        return self.cepstrum_route.last


def strong_szego_E(spec: ProcessSpec, n_terms: int = 4096,
                   cfg: QuadratureConfig | None = None) -> StrongSzegoResult:
    """E(mu) = prod_j (1 - alpha_j^2)^-j = exp(sum_k k b_k^2), by both routes.

    Converged only when both routes converge (value from the product route);
    divergent when both show logarithmic growth; indeterminate otherwise.
    """
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    lev = levinson(autocovariance(spec, n_terms))
    j = np.arange(1, n_terms + 1)
    log_prod = np.cumsum(-j * np.log1p(-lev.reflection_coeffs**2))
    ms = dyadic_checkpoints(n_terms, first=min(16, max(1, n_terms // 8)))
    prod_route = assess_partial_sums(ms, log_prod[ms - 1])

    series = cepstral_coefficients(spec, n_terms, cfg)
    cum = np.cumsum(j * series.b**2)
    cep_route = assess_partial_sums(ms, cum[ms - 1])

    if prod_route.status is cep_route.status is SeriesStatus.CONVERGED:
        return StrongSzegoResult(SeriesStatus.CONVERGED, math.exp(prod_route.last), prod_route, cep_route)
    if prod_route.status is cep_route.status is SeriesStatus.DIVERGENT:
        return StrongSzegoResult(SeriesStatus.DIVERGENT, None, prod_route, cep_route)
    return StrongSzegoResult(SeriesStatus.INDETERMINATE, None, prod_route, cep_route)
