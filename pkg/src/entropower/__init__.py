"""Renyi entropy powers of Fourier-conjugate states.

Core numerical library plus a FastAPI service and a thin-client CLI for
classifying index pairs, evaluating uncertainty-product lower bounds, and
verifying them empirically on analytic and sampled state families.
"""

__version__ = "0.1.0"

from .errors import (
    DivergenceError,
    DomainError,
    NumericalError,
    UnsupportedFamilyError,
)

__all__ = [
    "DivergenceError",
    "DomainError",
    "NumericalError",
    "UnsupportedFamilyError",
    "__version__",
]
