"""Quadrature of log spectral densities with an integrable log singularity at 0."""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass

from scipy import integrate

from .models import SpectralFunction

__all__ = ["QuadratureConfig", "QuadratureError", "log_spectrum_mean", "log_power_integral"]

ENV_PREFIX = "LRDENT_"


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, estimate=float("nan"), error=float("nan")):
        super().__init__(f"{message} (estimate={estimate!r}, error={error!r})")
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 500
    origin_excision: float = 1e-6

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if not 0.0 < self.origin_excision <= 1e-3:
            raise ValueError("origin_excision must lie in (0, 1e-3]")

    @classmethod
    def from_env(cls, environ=None, **overrides) -> "QuadratureConfig":
        """Defaults, then ``LRDENT_ABS_TOL``-style environment variables, then ``overrides``."""
        env = os.environ if environ is None else environ
        kwargs = {}
        for name, conv in (("abs_tol", float), ("rel_tol", float),
                           ("max_subdivisions", int), ("origin_excision", float)):
            raw = env.get(ENV_PREFIX + name.upper())
            if raw is not None:
                kwargs[name] = conv(raw)
        kwargs.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kwargs)


def quad(func, a, b, cfg: QuadratureConfig, **kwargs):
    """scipy quad that raises QuadratureError instead of warning."""
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, err = integrate.quad(func, a, b, epsabs=cfg.abs_tol, epsrel=cfg.rel_tol,
                                        limit=cfg.max_subdivisions, **kwargs)
        except integrate.IntegrationWarning as exc:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                value, err = integrate.quad(func, a, b, epsabs=cfg.abs_tol, epsrel=cfg.rel_tol,
                                            limit=cfg.max_subdivisions, **kwargs)
            if err <= max(100 * cfg.abs_tol, 100 * cfg.rel_tol * abs(value)):
                return value, err
            raise QuadratureError(str(exc).splitlines()[0], value, err) from None
    return value, err


def log_power_integral(a: float, b: float) -> float:
    """Integral of log(lam) over [a, b], a >= 0 (0 log 0 = 0)."""
    def prim(x):
        return x * math.log(x) - x if x > 0 else 0.0
    return prim(b) - prim(a)


def log_spectrum_mean(f: SpectralFunction, cfg: QuadratureConfig | None = None):
    """(1/2pi) * integral over [-pi, pi] of log(2 pi f(lam)); returns (value, error).

    With t the local exponent at the origin, log(2 pi f) = t log(lam) + r(lam)
    where r stays bounded. The log part is integrated exactly; r is integrated
    adaptively on [eps, pi] and by the endpoint value on [0, eps].
    """
    cfg = cfg or QuadratureConfig()
    t = f.tail_exponent
    eps = cfg.origin_excision

    def remainder(lam):
        return math.log(2.0 * math.pi * f(lam)) - t * math.log(lam)

    body, err = quad(remainder, eps, math.pi, cfg)
    patch = eps * remainder(eps)
    total = t * log_power_integral(0.0, math.pi) + body + patch
    err += eps * abs(remainder(eps) - remainder(2.0 * eps))
    return total / math.pi, err / math.pi

