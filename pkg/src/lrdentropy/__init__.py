"""Entropy rates, past-future information and convergence diagnostics for Gaussian LRD processes."""

from importlib import metadata as _metadata

try:
    __version__ = _metadata.version("artifact")
except _metadata.PackageNotFoundError:  # pragma: no cover - source checkout
    __version__ = "0.1.0"

from .special import *  # noqa: E402,F401,F403
from .models import *  # noqa: E402,F401,F403
from .quadrature import *  # noqa: E402,F401,F403
from .entropy import *  # noqa: E402,F401,F403
from .divergence import *  # noqa: E402,F401,F403
from .cepstrum import *  # noqa: E402,F401,F403
from .toeplitz import *  # noqa: E402,F401,F403
from .convergence import *  # noqa: E402,F401,F403
from .paths import *  # noqa: E402,F401,F403
from .tables import *  # noqa: E402,F401,F403
