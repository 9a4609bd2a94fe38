"""Index-pair geometry and the constant lower bounds.

The (alpha, beta) quarter-plane splits into: the conjugacy curve C
(1/alpha + 1/beta = 2 with alpha >= 1/2), the open square S (both indices
below 1/2), the region D0 above the curve (alpha > 1/2, beta > conjugate)
where no bound exists, and the remainder D_minus.  C and S are part of D,
the complement of D0.

Bounds: B(alpha) on the conjugacy curve, the piecewise-constant bound
B(max(alpha, beta)) on D \\ S and 2*pi on S, the conjugated-norm constant
C_{p,q}, and the discrete-discrete overlap bound (2n/(n+1))^2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = [
    "IndexPair", "Region", "BoundCase", "conjugate_index", "classify",
    "bound_B", "bound_general", "bound_conjugated", "maassen_bound",
    "CLASSIFY_TOL",
]

CLASSIFY_TOL = 1e-12
_B_LIMIT_BAND = 1e-6
_EULER_PI = math.e * math.pi


@dataclass(frozen=True)
class IndexPair:
    """A pair of entropic indices; infinite indices live in the entropy
    module's limit paths, not here."""

    alpha: float
    beta: float

    def __post_init__(self):
        for name, v in (("alpha", self.alpha), ("beta", self.beta)):
            if not math.isfinite(v) or v < 0.0:
                raise DomainError(f"{name} must be finite and >= 0, got {v}")

    def swapped(self) -> "IndexPair":
        return IndexPair(self.beta, self.alpha)


class Region(enum.Enum):
    """Tag of the classification partition."""

    C = "C"
    D_MINUS = "D_minus"
    S = "S"
    D0 = "D0"


_SETTINGS = ("continuous_continuous", "discrete_discrete", "discrete_continuous")


@dataclass(frozen=True)
class BoundCase:
    """Which conjugated-pair setting a bound request refers to."""

    setting: str
    n: int | None = None

    def __post_init__(self):
        if self.setting not in _SETTINGS:
            raise DomainError(f"setting must be one of {_SETTINGS}")
        if self.setting == "discrete_discrete":
            if self.n is None or int(self.n) != self.n or self.n < 1:
                raise DomainError("discrete_discrete requires integer n >= 1")
        elif self.n is not None:
            raise DomainError(f"n applies only to discrete_discrete")


def conjugate_index(alpha: float) -> float:
    """alpha / (2*alpha - 1); infinite exactly at alpha = 1/2."""
    if not alpha >= 0.5:
        raise DomainError(f"conjugate index requires alpha >= 1/2, got {alpha}")
    if alpha == 0.5:
        return math.inf
    if math.isinf(alpha):
        return 0.5
    return alpha / (2.0 * alpha - 1.0)


def _conjugacy_gap(pair: IndexPair) -> float:
    """1/alpha + 1/beta - 2; negative above the conjugacy curve."""
    inv_a = math.inf if pair.alpha == 0.0 else 1.0 / pair.alpha
    inv_b = math.inf if pair.beta == 0.0 else 1.0 / pair.beta
    return inv_a + inv_b - 2.0


def classify(pair: IndexPair, tol: float = CLASSIFY_TOL) -> Region:
    """Partition tag of an index pair.

    The conjugacy curve itself belongs to C (and hence to D): membership in
    D0 requires being strictly above the curve beyond ``tol``.
    """
    gap = _conjugacy_gap(pair)
    if pair.alpha >= 0.5 and abs(gap) <= tol:
        return Region.C
    if pair.alpha > 0.5 and gap < -tol:
        return Region.D0
    if pair.alpha < 0.5 and pair.beta < 0.5:
        return Region.S
    return Region.D_MINUS


def bound_B(alpha: float) -> float:
    """pi * alpha^{1/(2(alpha-1))} * conj^{1/(2(conj-1))} on [1/2, inf],
    with the continuity values 2*pi at the endpoints and e*pi at 1."""
    if not alpha >= 0.5:
        raise DomainError(f"B is defined on [1/2, inf), got {alpha}")
    if alpha == 0.5 or math.isinf(alpha):
        return 2.0 * math.pi
    if abs(alpha - 1.0) < _B_LIMIT_BAND:
        return _EULER_PI
    conj = conjugate_index(alpha)
    ln_terms = (math.log(alpha) / (2.0 * (alpha - 1.0))
                + math.log(conj) / (2.0 * (conj - 1.0)))
    return math.pi * math.exp(ln_terms)


def bound_general(pair: IndexPair) -> float | None:
    """Constant lower bound for an arbitrary index pair, or None where no
    bound exists (the product can be made arbitrarily small)."""
    region = classify(pair)
    if region is Region.D0:
        return None
    if region is Region.S:
        return 2.0 * math.pi
    return bound_B(max(pair.alpha, pair.beta))


def bound_conjugated(case: BoundCase, p: float = 2.0) -> float:
    """Norm-inequality constant for conjugated exponents 1/p + 1/q = 1."""
    if not p >= 1.0:
        raise DomainError(f"p must be >= 1, got {p}")
    if case.setting == "discrete_discrete":
        return float(case.n)
    if case.setting == "discrete_continuous":
        return 2.0 * math.pi
    if abs(p - 2.0) < _B_LIMIT_BAND:
        return _EULER_PI
    if p == 1.0 or math.isinf(p):
        return 2.0 * math.pi
    q = p / (p - 1.0)
    ln_terms = (math.log(p) / (p - 2.0) + math.log(q) / (q - 2.0))
    return 2.0 * math.pi * math.exp(ln_terms)


def maassen_bound(n) -> float:
    """(2n/(n+1))^2 for the discrete-discrete pair; n = inf gives the
    supremum 4."""
    if n == math.inf:
        return 4.0
    if int(n) != n or n < 1:
        raise DomainError("n must be an integer >= 1 (or inf for the limit)")
    return (2.0 * n / (n + 1.0)) ** 2
