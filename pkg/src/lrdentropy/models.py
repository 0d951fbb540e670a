"""Stationary Gaussian process models: FGN and ARFIMA(p, d, q).

Spectral densities follow the convention

    gamma(k) = integral over [-pi, pi] of f(lam) * exp(i k lam) dlam,

so white noise of variance s2 has the flat density s2 / (2 pi).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
from scipy import signal

from .special import ln_gamma

__all__ = [
    "FGN",
    "ARFIMA",
    "ProcessSpec",
    "Dependence",
    "CovarianceSequence",
    "SpectralFunction",
    "DEFAULT_TRUNCATION",
    "fgn_cf",
    "fgn_lattice_sum",
    "fgn_spectral_density",
    "fgn_spectral_density_approx",
    "arfima_spectral_density",
    "fgn_autocovariance",
    "arfima0d0_autocovariance",
    "innovation_variance_from_process_variance",
    "arfima_ar_ma_coefficients",
    "arma_impulse_response",
    "autocovariance",
    "spectral_function",
    "classify_dependence",
    "hurst_of",
]

DEFAULT_TRUNCATION = 200
TWO_PI = 2.0 * math.pi


def _roots_outside_unit_circle(poly_coeffs: Sequence[float]) -> bool:
    # poly_coeffs in increasing powers, constant term first. Negligible leading
    # coefficients only add roots near infinity, so they are dropped.
    coeffs = np.asarray(poly_coeffs, dtype=float)
    big = np.nonzero(np.abs(coeffs) > 1e-14 * np.abs(coeffs).max())[0]
    coeffs = coeffs[: big[-1] + 1]
    if coeffs.size <= 1:
        return True
    roots = np.polynomial.polynomial.polyroots(coeffs)
    return bool(np.all(np.abs(roots) > 1.0 + 1e-12))


@dataclass(frozen=True)
class FGN:
    """Fractional Gaussian noise with Hurst parameter ``hurst`` and variance ``variance``."""

    hurst: float
    variance: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.hurst < 1.0:
            raise ValueError(f"FGN requires 0 < H < 1, got H={self.hurst}")
        if not self.variance > 0.0:
            raise ValueError(f"FGN requires variance > 0, got {self.variance}")


@dataclass(frozen=True)
class ARFIMA:
    """ARFIMA(p, d, q): phi(L) (1 - L)^d X = psi(L) eps, eps ~ N(0, innovation_variance).

    ``ar`` holds phi_1..phi_p of phi(x) = 1 - sum phi_j x^j and ``ma`` holds
    psi_1..psi_q of psi(x) = 1 + sum psi_j x^j. Both polynomials must have all
    roots strictly outside the unit circle.
    """

    d: float
    ar: tuple = ()
    ma: tuple = ()
    innovation_variance: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "ar", tuple(float(c) for c in self.ar))
        object.__setattr__(self, "ma", tuple(float(c) for c in self.ma))
        if not -0.5 < self.d < 0.5:
            raise ValueError(f"ARFIMA requires -1/2 < d < 1/2, got d={self.d}")
        if not self.innovation_variance > 0.0:
            raise ValueError(
                f"ARFIMA requires innovation variance > 0, got {self.innovation_variance}"
            )
        if not _roots_outside_unit_circle([1.0, *(-c for c in self.ar)]):
            raise ValueError(f"AR polynomial is not stationary: ar={self.ar}")
        if not _roots_outside_unit_circle([1.0, *self.ma]):
            raise ValueError(f"MA polynomial is not invertible: ma={self.ma}")

    @property
    def is_fractional_noise(self) -> bool:
        return not self.ar and not self.ma


ProcessSpec = Union[FGN, ARFIMA]


class Dependence(str, enum.Enum):
    LRD = "LRD"
    SRD = "SRD"
    CSRD = "CSRD"


@dataclass(frozen=True)
class CovarianceSequence:
    """Autocovariances gamma(0..n) of a stationary process."""

    gamma: np.ndarray = field(repr=False)

    def __post_init__(self):
        g = np.array(self.gamma, dtype=float)
        if g.ndim != 1 or g.size == 0:
            raise ValueError("gamma must be a non-empty 1-D sequence")
        if not g[0] > 0.0:
            raise ValueError(f"gamma(0) must be positive, got {g[0]}")
        if np.any(np.abs(g) > g[0] * (1.0 + 1e-12)):
            raise ValueError("|gamma(k)| exceeds gamma(0)")
        g.setflags(write=False)
        object.__setattr__(self, "gamma", g)

    def __len__(self):
        return self.gamma.size

    @property
    def n_lags(self) -> int:
        return self.gamma.size - 1


@dataclass(frozen=True)
class SpectralFunction:
    """An even spectral density with its behaviour at the origin.

    ``tail_exponent`` is t in f(lam) ~ c |lam|^t as lam -> 0 (1 - 2H for
    FGN, -2d for ARFIMA).
    """

    density: Callable[[np.ndarray], np.ndarray]
    singular_at_origin: bool
    tail_exponent: float
    label: str = ""

    def __call__(self, lam):
        return self.density(lam)


# ---------------------------------------------------------------------------
# FGN


def fgn_cf(hurst: float, variance: float = 1.0) -> float:
    """c_f = (variance / 2 pi) sin(pi H) Gamma(2H + 1)."""
    return variance / TWO_PI * math.sin(math.pi * hurst) * math.exp(ln_gamma(2.0 * hurst + 1.0))


def _tail(u, s, weighted):
    # Sum over j > J of g(j), g(x) = y^-s (times log y if weighted), y = 2 pi x +- lam,
    # by midpoint Euler-Maclaurin from x = J + 1/2; u = y(J + 1/2).
    if weighted:
        integral = u ** (1.0 - s) * (np.log(u) / (s - 1.0) + 1.0 / (s - 1.0) ** 2) / TWO_PI
        deriv = TWO_PI * u ** (-s - 1.0) * (1.0 - s * np.log(u))
    else:
        integral = u ** (1.0 - s) / (TWO_PI * (s - 1.0))
        deriv = -TWO_PI * s * u ** (-s - 1.0)
    return integral + deriv / 24.0


def fgn_lattice_sum(lam, hurst: float, truncation: int = DEFAULT_TRUNCATION, weighted: bool = False):
    """sum_j |2 pi j + lam|^(-2H-1), or the log-weighted sum when ``weighted``.

    The weighted form is sum_j log|2 pi j + lam| |2 pi j + lam|^(-2H-1). Terms
    with |j| <= ``truncation`` are summed directly; the rest come from an
    integral tail with a first-order Euler-Maclaurin correction. ``lam`` must
    lie in [-pi, pi] and be nonzero.
    """
    if truncation < 1:
        raise ValueError("truncation must be >= 1")
    lam_arr = np.abs(np.atleast_1d(np.asarray(lam, dtype=float)))
    s = 2.0 * hurst + 1.0
    j = TWO_PI * np.arange(-truncation, truncation + 1, dtype=float)
    out = np.empty_like(lam_arr)
    chunk = max(1, 2**20 // j.size)
    for start in range(0, lam_arr.size, chunk):
        part = lam_arr[start:start + chunk]
        y = np.abs(j[None, :] + part[:, None])
        terms = y ** (-s)
        if weighted:
            terms = terms * np.log(y)
        out[start:start + chunk] = terms.sum(axis=1)
    base = TWO_PI * (truncation + 0.5)
    out += _tail(base + lam_arr, s, weighted) + _tail(base - lam_arr, s, weighted)
    return float(out[0]) if np.ndim(lam) == 0 else out


def fgn_spectral_density(spec: FGN, lam, truncation: int = DEFAULT_TRUNCATION):
    """FGN spectral density 2 c_f (1 - cos lam) sum_j |2 pi j + lam|^(-2H-1)."""
    if not isinstance(spec, FGN):
        raise TypeError("fgn_spectral_density needs an FGN spec")
    if truncation < 1:
        raise ValueError("truncation must be >= 1")
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    if np.any(np.abs(lam_arr) > math.pi * (1 + 1e-12)):
        raise ValueError("lam must lie in [-pi, pi]")
    zero = lam_arr == 0.0
    H = spec.hurst
    if np.any(zero) and H > 0.5:
        raise ValueError("FGN spectral density has a pole at lam = 0 for H > 1/2")
    cf = fgn_cf(H, spec.variance)
    out = np.empty_like(lam_arr)
    nz = ~zero
    if np.any(nz):
        lnz = lam_arr[nz]
        # 1 - cos(lam) = 2 sin^2(lam/2), stable for small lam
        out[nz] = 4.0 * cf * np.sin(lnz / 2.0) ** 2 * fgn_lattice_sum(lnz, H, truncation)
    out[zero] = spec.variance / TWO_PI if H == 0.5 else 0.0
    return float(out[0]) if np.ndim(lam) == 0 else out


def fgn_spectral_density_approx(spec: FGN, lam):
    """Low-frequency form c_f |lam|^(1-2H)."""
    lam_arr = np.asarray(lam, dtype=float)
    if spec.hurst > 0.5 and np.any(lam_arr == 0.0):
        raise ValueError("approximate FGN density is singular at lam = 0 for H > 1/2")
    with np.errstate(divide="ignore"):
        out = fgn_cf(spec.hurst, spec.variance) * np.abs(lam_arr) ** (1.0 - 2.0 * spec.hurst)
    return float(out) if np.ndim(lam) == 0 else out


def fgn_autocovariance(spec: FGN, k):
    """gamma(k) = (s2/2)(|k+1|^2H - 2|k|^2H + |k-1|^2H), evaluated without cancellation."""
    k_arr = np.abs(np.asarray(k, dtype=float))
    a = 2.0 * spec.hurst
    out = np.empty_like(k_arr, dtype=float)
    small = k_arr < 2
    ks = k_arr[small]
    out[small] = 0.5 * (np.abs(ks + 1) ** a - 2 * ks**a + np.abs(ks - 1) ** a)
    kl = k_arr[~small]
    x = 1.0 / kl
    out[~small] = 0.5 * kl**a * (np.expm1(a * np.log1p(x)) + np.expm1(a * np.log1p(-x)))
    out *= spec.variance
    return float(out) if np.ndim(k) == 0 else out


# ---------------------------------------------------------------------------
# ARFIMA


def _check_d(d):
    if not -0.5 < d < 0.5:
        raise ValueError(f"need -1/2 < d < 1/2, got d={d}")


def arfima_spectral_density(spec: ARFIMA, lam):
    """(s_eps^2 / 2 pi) |psi(e^il)|^2 / |phi(e^il)|^2 |2 sin(lam/2)|^(-2d)."""
    if not isinstance(spec, ARFIMA):
        raise TypeError("arfima_spectral_density needs an ARFIMA spec")
    lam_arr = np.asarray(lam, dtype=float)
    if np.any(np.abs(lam_arr) > math.pi * (1 + 1e-12)):
        raise ValueError("lam must lie in [-pi, pi]")
    if spec.d > 0 and np.any(lam_arr == 0.0):
        raise ValueError("ARFIMA spectral density has a pole at lam = 0 for d > 0")
    z = np.exp(1j * lam_arr)
    num = np.abs(np.polynomial.polynomial.polyval(z, [1.0, *spec.ma])) ** 2
    den = np.abs(np.polynomial.polynomial.polyval(z, [1.0, *(-c for c in spec.ar)])) ** 2
    with np.errstate(divide="ignore"):
        frac = np.abs(2.0 * np.sin(lam_arr / 2.0)) ** (-2.0 * spec.d)
    out = spec.innovation_variance / TWO_PI * num / den * frac
    return float(out) if np.ndim(lam) == 0 else out


def arfima0d0_autocovariance(d: float, sigma_eps2: float, k_max: int) -> CovarianceSequence:
    """gamma(0..k_max) of ARFIMA(0, d, 0) via the ratio recursion."""
    _check_d(d)
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    g0 = sigma_eps2 * math.exp(ln_gamma(1.0 - 2.0 * d) - 2.0 * ln_gamma(1.0 - d))
    k = np.arange(1, k_max + 1, dtype=float)
    ratios = (k - 1.0 + d) / (k - d)
    gamma = g0 * np.concatenate(([1.0], np.cumprod(ratios)))
    return CovarianceSequence(gamma)


def innovation_variance_from_process_variance(d: float, sigma2: float) -> float:
    """s_eps^2 = s2 Gamma(1-d)^2 / Gamma(1-2d) for ARFIMA(0, d, 0)."""
    _check_d(d)
    return sigma2 * math.exp(2.0 * ln_gamma(1.0 - d) - ln_gamma(1.0 - 2.0 * d))


def arfima_ar_ma_coefficients(d: float, k_max: int):
    """AR(inf) weights pi_k and MA(inf) weights a_k, k = 0..k_max, of ARFIMA(0, d, 0)."""
    _check_d(d)
    k = np.arange(1, k_max + 1, dtype=float)
    pi = np.concatenate(([1.0], np.cumprod((k - 1.0 - d) / k)))
    a = np.concatenate(([1.0], np.cumprod((k - 1.0 + d) / k)))
    return pi, a


def arma_impulse_response(ar: Sequence[float], ma: Sequence[float], tol: float = 1e-17,
                          max_len: int = 2**20) -> np.ndarray:
    """MA(inf) weights h_0 = 1, h_1, ... of psi(L)/phi(L), truncated where negligible."""
    b = np.array([1.0, *ma])
    a = np.array([1.0, *(-c for c in ar)])
    if not ar:
        return b
    length = max(64, 4 * (len(ar) + len(ma)))
    while True:
        impulse = np.zeros(length)
        impulse[0] = 1.0
        h = signal.lfilter(b, a, impulse)
        tail = np.abs(h[-max(len(ar), 8):]).max()
        if tail <= tol * np.abs(h).max() or length >= max_len:
            break
        length *= 2
    keep = np.nonzero(np.abs(h) > tol * np.abs(h).max())[0]
    return h[: keep[-1] + 1]


def autocovariance(spec: ProcessSpec, n: int) -> CovarianceSequence:
    """gamma(0..n) for any supported model.

    ARFIMA with AR/MA parts: the ARMA filter's impulse-response autocorrelation
    convolved with the fractional-noise autocovariance.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if isinstance(spec, FGN):
        return CovarianceSequence(fgn_autocovariance(spec, np.arange(n + 1)))
    if spec.is_fractional_noise:
        return arfima0d0_autocovariance(spec.d, spec.innovation_variance, n)
    h = arma_impulse_response(spec.ar, spec.ma)
    L = h.size
    rh = np.correlate(h, h, mode="full")  # lags -(L-1)..(L-1), symmetric
    base = arfima0d0_autocovariance(spec.d, spec.innovation_variance, n + L - 1).gamma
    lags = np.abs(np.arange(-(L - 1), n + L))
    gy = base[lags]
    if L * (n + 1) > 2**22:
        g = signal.fftconvolve(gy, rh, mode="valid")
    else:
        g = np.convolve(gy, rh, mode="valid")
    return CovarianceSequence(g)


def spectral_function(spec: ProcessSpec, truncation: int = DEFAULT_TRUNCATION) -> SpectralFunction:
    """Wrap a model's spectral density with its origin metadata."""
    if isinstance(spec, FGN):
        return SpectralFunction(
            density=lambda lam: fgn_spectral_density(spec, lam, truncation),
            singular_at_origin=spec.hurst > 0.5,
            tail_exponent=1.0 - 2.0 * spec.hurst,
            label=f"fgn(H={spec.hurst!r})",
        )
    return SpectralFunction(
        density=lambda lam: arfima_spectral_density(spec, lam),
        singular_at_origin=spec.d > 0,
        tail_exponent=-2.0 * spec.d,
        label=f"arfima(d={spec.d!r})",
    )


def hurst_of(spec: ProcessSpec) -> float:
    """H of an FGN, or d + 1/2 for ARFIMA."""
    return spec.hurst if isinstance(spec, FGN) else spec.d + 0.5


def classify_dependence(spec: ProcessSpec) -> Dependence:
    """LRD / SRD / CSRD from the exact memory parameter."""
    h = spec.hurst if isinstance(spec, FGN) else None
    if h is not None:
        return Dependence.LRD if h > 0.5 else Dependence.SRD if h == 0.5 else Dependence.CSRD
    d = spec.d
    return Dependence.LRD if d > 0 else Dependence.SRD if d == 0 else Dependence.CSRD
