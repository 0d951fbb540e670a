"""Real special functions used by the closed forms: log-gamma, digamma, Si.

Thin, validated wrappers around :mod:`scipy.special`. They accept scalars or
arrays and raise on arguments outside the positive axis instead of quietly
returning ``inf``/``nan``.
"""

import numpy as np
from scipy import special as _sp

__all__ = ["ln_gamma", "digamma", "sine_integral"]


def _check_positive(x, name):
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise ValueError(f"{name} requires x > 0, got {x!r}")
    return arr


def _out(arr, x):
    return float(arr) if np.ndim(x) == 0 else arr


def ln_gamma(x):
    """log Gamma(x) for x > 0."""
    arr = _check_positive(x, "ln_gamma")
    return _out(_sp.gammaln(arr), x)


def digamma(x):
    """psi(x) = Gamma'(x)/Gamma(x) for x > 0."""
    arr = _check_positive(x, "digamma")
    return _out(_sp.psi(arr), x)


def sine_integral(x):
    """Si(x) = integral of sin(t)/t over [0, x], for x >= 0."""
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr >= 0)):
        raise ValueError(f"sine_integral requires x >= 0, got {x!r}")
    si, _ = _sp.sici(arr)
    return _out(si, x)
