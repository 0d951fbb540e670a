"""Sample paths: circulant embedding for FGN, truncated MA(inf) for ARFIMA(0, d, 0).

Random stream discipline
------------------------
Each path uses its own ``numpy.random.Philox`` counter-based generator keyed
by the 64-bit ``seed`` (counter starting at zero). Raw 64-bit words are taken
in order; the top 53 bits of each give a uniform u = (m + 1/2) / 2^53 in
(0, 1), mapped to N(0, 1) by the inverse normal CDF. There is no rejection
step, so variate i always comes from word i. Replicates use seeds
seed, seed + 1, ...
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import signal, special

from .models import ARFIMA, FGN, ProcessSpec, arfima_ar_ma_coefficients, fgn_autocovariance
from .special import ln_gamma

__all__ = [
    "PathRequest",
    "EmbeddingError",
    "TruncationError",
    "standard_normals",
    "generate_fgn",
    "generate_arfima0d0",
    "generate",
    "ma_variance_deficit",
    "sample_autocovariance",
]

MAX_EMBEDDING_DOUBLINGS = 3
MAX_VARIANCE_DEFICIT = 0.01


class EmbeddingError(RuntimeError):
    pass


class TruncationError(ValueError):
    pass


@dataclass(frozen=True)
class PathRequest:
    spec: ProcessSpec
    n: int
    seed: int = 0
    ma_truncation: int = 100_000
    burn_in: Optional[int] = None  # defaults to ma_truncation
    allow_deficit: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.ma_truncation < 1:
            raise ValueError("ma_truncation must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.burn_in is not None and self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")

    @property
    def effective_burn_in(self) -> int:
        return self.ma_truncation if self.burn_in is None else self.burn_in


def standard_normals(seed: int, size: int) -> np.ndarray:
    """``size`` N(0, 1) variates from the Philox stream keyed by ``seed``."""
    bitgen = np.random.Philox(key=seed)
    words = bitgen.random_raw(size).astype(np.uint64)
    u = ((words >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    return special.ndtri(u)


def _embedding_eigenvalues(spec: FGN, n: int):
    m = 1 << max(0, math.ceil(math.log2(max(n - 1, 1))))
    for _ in range(MAX_EMBEDDING_DOUBLINGS + 1):
        g = fgn_autocovariance(spec, np.arange(m + 1))
        row = np.concatenate((g, g[-2:0:-1]))
        eig = np.fft.fft(row).real
        if eig.min() >= -1e-10 * eig.max():
            return np.clip(eig, 0.0, None)
        m *= 2
    raise EmbeddingError(f"negative circulant eigenvalue after {MAX_EMBEDDING_DOUBLINGS} doublings")


def generate_fgn(req: PathRequest) -> np.ndarray:
    """Exact FGN path of length n (Davies-Harte circulant embedding)."""
    if not isinstance(req.spec, FGN):
        raise TypeError("generate_fgn needs an FGN spec")
    eig = _embedding_eigenvalues(req.spec, req.n)
    size = eig.size
    z = standard_normals(req.seed, 2 * size)
    w = np.sqrt(eig / size) * (z[:size] + 1j * z[size:])
    return np.fft.fft(w).real[: req.n].copy()


def ma_variance_deficit(d: float, truncation: int) -> float:
    """Fraction of gamma(0) lost by truncating the MA(inf) weights after lag ``truncation``."""
    _, a = arfima_ar_ma_coefficients(d, truncation)
    total = math.exp(ln_gamma(1.0 - 2.0 * d) - 2.0 * ln_gamma(1.0 - d))
    return max(0.0, 1.0 - float(np.sum(a * a)) / total)


def generate_arfima0d0(req: PathRequest) -> np.ndarray:
    """ARFIMA(0, d, 0) path via X_t = sum_{k<=K} a_k eps_{t-k}, burn-in discarded."""
    spec = req.spec
    if not (isinstance(spec, ARFIMA) and spec.is_fractional_noise):
        raise TypeError("generate_arfima0d0 needs an ARFIMA(0, d, 0) spec")
    deficit = ma_variance_deficit(spec.d, req.ma_truncation)
    if deficit > MAX_VARIANCE_DEFICIT and not req.allow_deficit:
        raise TruncationError(
            f"MA truncation {req.ma_truncation} loses {deficit:.2%} of the variance; "
            "increase ma_truncation or set allow_deficit"
        )
    burn = req.effective_burn_in
    eps = math.sqrt(spec.innovation_variance) * standard_normals(req.seed, burn + req.n)
    if spec.d == 0:
        return eps[burn:].copy()
    _, a = arfima_ar_ma_coefficients(spec.d, req.ma_truncation)
    x = signal.fftconvolve(eps, a)[: burn + req.n]
    return x[burn:].copy()


def generate(req: PathRequest) -> np.ndarray:
    if isinstance(req.spec, FGN):
        return generate_fgn(req)
    return generate_arfima0d0(req)


def sample_autocovariance(x, max_lag: int, demean: bool = False) -> np.ndarray:
    """(1/(n-k)) sum x_t x_{t+k} for k = 0..max_lag; zero mean assumed unless ``demean``."""
    x = np.asarray(x, dtype=float)
    if demean:
        x = x - x.mean()
    n = x.size
    return np.array([np.dot(x[: n - k], x[k:]) / (n - k) for k in range(max_lag + 1)])
