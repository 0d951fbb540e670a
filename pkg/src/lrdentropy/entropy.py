"""Differential entropy rates of FGN and ARFIMA processes (nats per step)."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

from scipy import optimize

from .models import ARFIMA, ProcessSpec, SpectralFunction, fgn_cf, fgn_lattice_sum, spectral_function
from .quadrature import QuadratureConfig, log_power_integral, log_spectrum_mean, quad
from .special import digamma, ln_gamma

__all__ = [
    "HALF_LOG_2PI_E",
    "EntropyRateResult",
    "MaximizerModel",
    "MaximizerError",
    "entropy_rate_from_spectrum",
    "fgn_entropy_rate",
    "fgn_entropy_rate_approx",
    "arfima_entropy_rate",
    "arfima0d0_entropy_rate_fixed_variance",
    "fgn_entropy_rate_derivative",
    "fgn_entropy_rate_approx_derivative",
    "arfima_fixed_variance_derivative",
    "entropy_rate_maximizer",
    "entropy_rate",
    "entropy_rate_quadrature",
]

HALF_LOG_2PI_E = 0.5 * math.log(2.0 * math.pi * math.e)
_LOG_PI_MINUS_1 = math.log(math.pi) - 1.0


@dataclass(frozen=True)
class EntropyRateResult:
    """An entropy rate, or a divergence marker when ``divergent`` is set (``value`` is None)."""

    value: Optional[float]
    method: str  # closed_form | quadrature | approximation
    error_estimate: float = 0.0
    divergent: bool = False

    def __post_init__(self):
        if self.error_estimate < 0:
            raise ValueError("error_estimate must be >= 0")
        if self.divergent != (self.value is None):
            raise ValueError("value must be None exactly when divergent")

    def __float__(self):
        if self.divergent:
            return float("-inf")
        return self.value


def entropy_rate_from_spectrum(f: SpectralFunction, cfg: QuadratureConfig | None = None) -> EntropyRateResult:
    """Kolmogorov's formula 1/2 log(2 pi e) + (1/4pi) int log(2 pi f)."""
    mean, err = log_spectrum_mean(f, cfg)
    return EntropyRateResult(HALF_LOG_2PI_E + 0.5 * mean, "quadrature", 0.5 * err)


def _check_hurst(H):
    if not 0.0 < H < 1.0:
        raise ValueError(f"need 0 < H < 1, got H={H}")


def _fgn_log_lattice_integral(H: float, cfg: QuadratureConfig, truncation: int):
    """(1/2pi) int_{-pi}^{pi} log sum_j |2 pi j + lam|^(-2H-1) dlam, with its error."""
    s = 2.0 * H + 1.0
    eps = cfg.origin_excision

    def remainder(lam):
        # the j = 0 term carries the lam^-s singularity
        return math.log(fgn_lattice_sum(lam, H, truncation)) + s * math.log(lam)

    body, err = quad(remainder, eps, math.pi, cfg)
    total = -s * log_power_integral(0.0, math.pi) + body + eps * remainder(eps)
    err += eps * abs(remainder(2 * eps) - remainder(eps))
    return total / math.pi, err / math.pi


def fgn_entropy_rate(H: float, sigma2: float = 1.0, cfg: QuadratureConfig | None = None,
                     truncation: int = 200) -> EntropyRateResult:
    """Exact FGN entropy rate.

    1/2 log(2 pi e) + 1/2 log(s2 sin(pi H) Gamma(2H+1)) + (1/4pi) int log S(lam),
    S the lattice sum; the (1 - cos) factor integrates to -2 pi log 2 and is
    folded into the constant.
    """
    _check_hurst(H)
    cfg = cfg or QuadratureConfig()
    mean, err = _fgn_log_lattice_integral(H, cfg, truncation)
    const = 0.5 * (math.log(sigma2) + math.log(math.sin(math.pi * H)) + ln_gamma(2.0 * H + 1.0))
    return EntropyRateResult(HALF_LOG_2PI_E + const + 0.5 * mean, "quadrature", 0.5 * err)


def fgn_entropy_rate_approx(H: float, sigma2: float = 1.0) -> EntropyRateResult:
    """Closed form from the low-frequency density c_f |lam|^(1-2H)."""
    _check_hurst(H)
    cf = fgn_cf(H, sigma2)
    value = HALF_LOG_2PI_E + 0.5 * math.log(2.0 * math.pi * cf) + (1.0 - 2.0 * H) * _LOG_PI_MINUS_1
    return EntropyRateResult(value, "approximation")


def arfima_entropy_rate(spec: ARFIMA) -> EntropyRateResult:
    """1/2 log(2 pi e s_eps^2); independent of d and of the ARMA part."""
    return EntropyRateResult(HALF_LOG_2PI_E + 0.5 * math.log(spec.innovation_variance), "closed_form")


def arfima0d0_entropy_rate_fixed_variance(H: float, sigma2: float = 1.0) -> EntropyRateResult:
    """ARFIMA(0, H - 1/2, 0) entropy rate at fixed process variance s2.

    Diverges to -inf at H = 1; reported with ``divergent=True``.
    """
    if H >= 1.0:
        return EntropyRateResult(None, "closed_form", divergent=True)
    if not H > 0.0:
        raise ValueError(f"need 0 < H < 1, got H={H}")
    value = HALF_LOG_2PI_E + 0.5 * math.log(sigma2) + ln_gamma(1.5 - H) - 0.5 * ln_gamma(2.0 - 2.0 * H)
    return EntropyRateResult(value, "closed_form")


def fgn_entropy_rate_derivative(H: float, cfg: QuadratureConfig | None = None, truncation: int = 200) -> float:
    """dh/dH of the exact FGN rate (independent of the variance)."""
    _check_hurst(H)
    cfg = cfg or QuadratureConfig()
    eps = cfg.origin_excision

    def remainder(lam):
        # weighted mean of log|2 pi j + lam|; tends to log(lam) as lam -> 0
        ratio = fgn_lattice_sum(lam, H, truncation, weighted=True) / fgn_lattice_sum(lam, H, truncation)
        return ratio - math.log(lam)

    body, _ = quad(remainder, eps, math.pi, cfg)
    integral = log_power_integral(0.0, math.pi) + body + eps * remainder(eps)
    return 0.5 * math.pi / math.tan(math.pi * H) + digamma(2.0 * H + 1.0) - integral / math.pi


def fgn_entropy_rate_approx_derivative(H: float) -> float:
    """d h~/dH = (pi/2) cot(pi H) + psi(2H + 1) - 2 (log pi - 1)."""
    _check_hurst(H)
    return 0.5 * math.pi / math.tan(math.pi * H) + digamma(2.0 * H + 1.0) - 2.0 * _LOG_PI_MINUS_1


def arfima_fixed_variance_derivative(H: float) -> float:
    """dh/dH = psi(2 - 2H) - psi(3/2 - H); zero exactly where psi(3/2 - H) = psi(2 - 2H)."""
    _check_hurst(H)
    return digamma(2.0 - 2.0 * H) - digamma(1.5 - H)


class MaximizerModel(str, enum.Enum):
    FGN_EXACT = "FGN_exact"
    FGN_APPROX = "FGN_approx"
    ARFIMA_FIXED_VARIANCE = "ARFIMA_fixed_variance"


class MaximizerError(RuntimeError):
    pass


def entropy_rate_maximizer(model, cfg: QuadratureConfig | None = None, bracket=(0.01, 0.99),
                           xtol: float = 1e-10, max_evaluations: int = 60) -> float:
    """H in (0, 1) where the entropy-rate derivative vanishes.

    Brent's method (bisection with secant/inverse-quadratic steps) on the
    bracket; each FGN_exact evaluation costs one quadrature.
    """
    model = MaximizerModel(model)
    if model is MaximizerModel.FGN_EXACT:
        def deriv(H):
            return fgn_entropy_rate_derivative(H, cfg)
    elif model is MaximizerModel.FGN_APPROX:
        deriv = fgn_entropy_rate_approx_derivative
    else:
        deriv = arfima_fixed_variance_derivative
    lo, hi = bracket
    f_lo, f_hi = deriv(lo), deriv(hi)
    if f_lo * f_hi > 0:
        raise MaximizerError(f"derivative has no sign change on [{lo}, {hi}] for {model.value}")
    try:
        root, info = optimize.brentq(deriv, lo, hi, xtol=xtol, maxiter=max_evaluations - 2,
                                     full_output=True)
    except RuntimeError as exc:
        raise MaximizerError(str(exc)) from None
    if not info.converged:
        raise MaximizerError(f"root finder did not converge: {info.flag}")
    return root


def entropy_rate(spec: ProcessSpec, cfg: QuadratureConfig | None = None) -> EntropyRateResult:
    """Closed form for ARFIMA, exact-form quadrature for FGN."""
    if isinstance(spec, ARFIMA):
        return arfima_entropy_rate(spec)
    return fgn_entropy_rate(spec.hurst, spec.variance, cfg)


def entropy_rate_quadrature(spec: ProcessSpec, cfg: QuadratureConfig | None = None) -> EntropyRateResult:
    """Kolmogorov quadrature applied directly to the model's spectral density."""
    return entropy_rate_from_spectrum(spectral_function(spec), cfg)
