"""State families: continuous wavefunctions and finite discrete states.

Continuous families carry exact normalization constants; the generic
``Rescaled`` wrapper applies an invertible linear change of variables while
preserving unit norm, so every constructed state satisfies the L2 constraint
by construction.  Sampled states live on uniform Cartesian grids.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, UnsupportedFamilyError
from .specfun import bessel_k, log_gamma

__all__ = [
    "Wavefunction", "Gaussian", "StudentT", "StudentTPartner", "StudentR",
    "ExponentialLaplace", "UniformBall", "SampledGrid", "Rescaled",
    "DiscreteState", "density_at", "fourier_partner", "rescale",
    "random_discrete_state", "kronecker_state", "flat_state",
    "sample_on_grid", "grid_to_csv", "grid_from_csv", "unit_covariance",
]


def _as_matrix(m, d: int) -> np.ndarray:
    a = np.asarray(m, dtype=float)
    if a.ndim == 0:
        a = float(a) * np.eye(d)
    elif a.ndim == 1:
        if a.shape != (d,):
            raise DomainError(f"diagonal of length {a.shape[0]} for dimension {d}")
        a = np.diag(a)
    if a.shape != (d, d):
        raise DomainError(f"matrix shape {a.shape} does not match dimension {d}")
    return a


def _as_points(x, d: int) -> tuple[np.ndarray, bool]:
    """Coerce x to shape (m, d); returns (points, scalar_input)."""
    a = np.asarray(x, dtype=float)
    if d == 1 and a.ndim == 0:
        return a.reshape(1, 1), True
    if a.ndim == 1:
        if a.shape[0] == d:
            return a.reshape(1, d), True
        if d == 1:
            return a.reshape(-1, 1), False
        raise DomainError(f"point of length {a.shape[0]} for dimension {d}")
    if a.ndim == 2 and a.shape[1] == d:
        return a, False
    raise DomainError(f"cannot interpret x of shape {a.shape} in dimension {d}")


class Wavefunction:
    """Base class for continuous states; subclasses define density_radial
    or density_points."""

    d: int

    def density_points(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class Gaussian(Wavefunction):
    """Gaussian state parameterized by the covariance of its density."""

    d: int
    covariance: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self):
        cov = np.eye(self.d) if self.covariance is None else _as_matrix(self.covariance, self.d)
        try:
            np.linalg.cholesky(cov)
        except np.linalg.LinAlgError:
            raise DomainError("Gaussian covariance must be positive definite")
        object.__setattr__(self, "covariance", cov)

    def density_points(self, pts: np.ndarray) -> np.ndarray:
        inv = np.linalg.inv(self.covariance)
        det = float(np.linalg.det(self.covariance))
        q = np.einsum("mi,ij,mj->m", pts, inv, pts)
        return (2 * math.pi) ** (-self.d / 2) * det ** -0.5 * np.exp(-0.5 * q)


@dataclass(frozen=True)
class StudentT(Wavefunction):
    """Student-t state, amplitude proportional to (1 + |x|^2)^{-(d+nu)/4}."""

    d: int
    nu: float

    def __post_init__(self):
        if not self.nu > 0:
            raise DomainError("StudentT requires nu > 0")

    def log_norm_const(self) -> float:
        # density constant Gamma((d+nu)/2) / (pi^{d/2} Gamma(nu/2))
        return (log_gamma((self.d + self.nu) / 2)
                - (self.d / 2) * math.log(math.pi) - log_gamma(self.nu / 2))

    def density_points(self, pts: np.ndarray) -> np.ndarray:
        r2 = np.sum(pts * pts, axis=1)
        return math.exp(self.log_norm_const()) * (1.0 + r2) ** (-(self.d + self.nu) / 2)


@dataclass(frozen=True)
class StudentTPartner(Wavefunction):
    """Fourier partner of StudentT: Bessel-type density
    c^2 |x|^{(nu-d)/2} K_{(d-nu)/4}(|x|)^2."""

    d: int
    nu: float

    def __post_init__(self):
        if not self.nu > 0:
            raise DomainError("StudentTPartner requires nu > 0")

    def log_norm_const(self) -> float:
        d, nu = self.d, self.nu
        return (((4 - d - nu) / 2) * math.log(2.0) + log_gamma((d + nu) / 2)
                - (d / 2) * math.log(math.pi) - log_gamma(nu / 2)
                - 2 * log_gamma((d + nu) / 4))

    def density_radial(self, r: float) -> float:
        d, nu = self.d, self.nu
        c = math.exp(self.log_norm_const())
        if r == 0.0:
            if nu > d:
                m = (nu - d) / 4
                return c * math.exp(2 * (log_gamma(m) + (m - 1) * math.log(2.0)))
            return math.inf
        return c * r ** ((nu - d) / 2) * bessel_k((d - nu) / 4, r) ** 2

    def density_points(self, pts: np.ndarray) -> np.ndarray:
        r = np.sqrt(np.sum(pts * pts, axis=1))
        return np.array([self.density_radial(float(v)) for v in r])


@dataclass(frozen=True)
class StudentR(Wavefunction):
    """Student-r state on the ball of radius sqrt(nu+2) (unit covariance);
    amplitude proportional to (1 - |x|^2/(nu+2))^{(nu-d)/4}."""

    d: int
    nu: float

    def __post_init__(self):
        if not self.nu >= self.d:
            raise DomainError("StudentR requires nu >= d")

    @property
    def radius(self) -> float:
        return math.sqrt(self.nu + 2.0)

    def log_norm_const(self) -> float:
        m = (self.nu - self.d) / 2
        return (log_gamma(self.d / 2 + m + 1) - (self.d / 2) * math.log(math.pi)
                - self.d * math.log(self.radius) - log_gamma(m + 1))

    def density_points(self, pts: np.ndarray) -> np.ndarray:
        r2 = np.sum(pts * pts, axis=1) / self.radius ** 2
        m = (self.nu - self.d) / 2
        inside = r2 < 1.0
        out = np.zeros(len(pts))
        out[inside] = math.exp(self.log_norm_const()) * (1.0 - r2[inside]) ** m
        return out


@dataclass(frozen=True)
class ExponentialLaplace(Wavefunction):
    """One-dimensional state with amplitude e^{-|x|} (unit L2 norm)."""

    d: int = 1

    def __post_init__(self):
        if self.d != 1:
            raise DomainError("ExponentialLaplace is defined for d=1 only")

    def density_points(self, pts: np.ndarray) -> np.ndarray:
        return np.exp(-2.0 * np.abs(pts[:, 0]))


@dataclass(frozen=True)
class UniformBall(Wavefunction):
    """Uniform density on the ball of radius sqrt(d+2) (unit covariance)."""

    d: int

    @property
    def radius(self) -> float:
        return math.sqrt(self.d + 2.0)

    @property
    def volume(self) -> float:
        return (math.pi ** (self.d / 2) * self.radius ** self.d
                / math.exp(log_gamma(self.d / 2 + 1)))

    def density_points(self, pts: np.ndarray) -> np.ndarray:
        r2 = np.sum(pts * pts, axis=1)
        return np.where(r2 < self.radius ** 2, 1.0 / self.volume, 0.0)


@dataclass(frozen=True)
class SampledGrid(Wavefunction):
    """Complex samples on a uniform Cartesian grid (d <= 3).

    ``origin`` is the coordinate of the first sample along each axis and
    ``spacing`` the step; samples are in row-major order with the last axis
    fastest.
    """

    d: int
    origin: tuple[float, ...]
    spacing: tuple[float, ...]
    samples: np.ndarray
    check_norm: bool = True

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise DomainError("SampledGrid supports d in {1, 2, 3}")
        samples = np.asarray(self.samples, dtype=complex)
        if samples.ndim != self.d:
            raise DomainError("sample array rank must equal dimension")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "origin", tuple(float(v) for v in self.origin))
        object.__setattr__(self, "spacing", tuple(float(v) for v in self.spacing))
        if any(s <= 0 for s in self.spacing):
            raise DomainError("grid spacing must be positive")
        if self.check_norm and abs(self.norm_squared() - 1.0) > 1e-8:
            raise DomainError(
                f"grid state norm^2 = {self.norm_squared():.10g}, expected 1"
            )

    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2) * self.cell_volume())

    def axis(self, i: int) -> np.ndarray:
        n = self.samples.shape[i]
        return self.origin[i] + self.spacing[i] * np.arange(n)

    def density_points(self, pts: np.ndarray) -> np.ndarray:
        # nearest-sample lookup; points outside the grid give 0
        dens = np.abs(self.samples) ** 2
        out = np.zeros(len(pts))
        for m, p in enumerate(pts):
            idx = []
            ok = True
            for i in range(self.d):
                j = round((p[i] - self.origin[i]) / self.spacing[i])
                if j < 0 or j >= self.samples.shape[i]:
                    ok = False
                    break
                idx.append(int(j))
            if ok:
                out[m] = dens[tuple(idx)]
        return out


@dataclass(frozen=True)
class Rescaled(Wavefunction):
    """Unit-norm change of variables x -> M x of a base state."""

    base: Wavefunction
    matrix: np.ndarray

    def __post_init__(self):
        m = _as_matrix(self.matrix, self.base.d)
        det = float(np.linalg.det(m))
        if abs(det) < 1e-300:
            raise DomainError("rescale matrix must be invertible")
        object.__setattr__(self, "matrix", m)

    @property
    def d(self) -> int:  # type: ignore[override]
        return self.base.d

    @property
    def abs_det(self) -> float:
        return abs(float(np.linalg.det(self.matrix)))

    def density_points(self, pts: np.ndarray) -> np.ndarray:
        inv = np.linalg.inv(self.matrix)
        return self.base.density_points(pts @ inv.T) / self.abs_det


def density_at(state: Wavefunction, x) -> float | np.ndarray:
    """|Psi(x)|^2 at a point (or an (m, d) batch of points)."""
    pts, scalar = _as_points(x, state.d)
    vals = state.density_points(pts)
    return float(vals[0]) if scalar else vals


def fourier_partner(state: Wavefunction) -> Wavefunction:
    """Conjugate state under the unitary continuous Fourier transform."""
    if isinstance(state, Gaussian):
        # e^{-x' A x / 4} maps to e^{-k' A^{-1} k / 4}: covariance inverts
        # and picks up the factor 1/4
        return Gaussian(state.d, 0.25 * np.linalg.inv(state.covariance))
    if isinstance(state, StudentT):
        return StudentTPartner(state.d, state.nu)
    if isinstance(state, StudentTPartner):
        return StudentT(state.d, state.nu)
    if isinstance(state, ExponentialLaplace):
        # e^{-|x|} transforms to the Lorentzian-squared density, which is the
        # nu=3 Student-t member
        return StudentT(1, 3.0)
    if isinstance(state, Rescaled):
        return Rescaled(fourier_partner(state.base),
                        np.linalg.inv(state.matrix).T)
    raise UnsupportedFamilyError(
        f"no closed-form Fourier partner for {type(state).__name__}; "
        "use the transforms module on a sampled grid"
    )


def rescale(state: Wavefunction, m) -> Wavefunction:
    """Apply x -> M x, returning a unit-norm state."""
    mat = _as_matrix(m, state.d)
    det = float(np.linalg.det(mat))
    if abs(det) < 1e-300:
        raise DomainError("rescale matrix must be invertible")
    if np.allclose(mat, np.eye(state.d)):
        return state
    if isinstance(state, Gaussian):
        return Gaussian(state.d, mat @ state.covariance @ mat.T)
    if isinstance(state, Rescaled):
        return Rescaled(state.base, mat @ state.matrix)
    return Rescaled(state, mat)


def unit_covariance(state: Wavefunction) -> Wavefunction:
    """Isotropic rescale bringing the density covariance to the identity.

    Defined for the families whose base-scale covariance is known in closed
    form; StudentT requires nu > 2 (finite variance).
    """
    if isinstance(state, Gaussian):
        cov = state.covariance
        if np.allclose(cov, np.diag(np.diag(cov))):
            return Gaussian(state.d, np.eye(state.d))
        raise UnsupportedFamilyError("unit_covariance for diagonal Gaussian only")
    if isinstance(state, StudentT):
        if state.nu <= 2:
            raise DomainError("StudentT has finite covariance only for nu > 2")
        # base density covariance is I/(nu-2)
        return Rescaled(state, math.sqrt(state.nu - 2.0) * np.eye(state.d))
    if isinstance(state, (StudentR, UniformBall)):
        return state  # unit covariance by construction
    if isinstance(state, ExponentialLaplace):
        # density e^{-2|x|} has variance 1/2
        return Rescaled(state, math.sqrt(2.0) * np.eye(1))
    raise UnsupportedFamilyError(f"unit_covariance undefined for {type(state).__name__}")


# ---------------------------------------------------------------------------
# discrete states
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiscreteState:
    """Finitely supported discrete state; position k carries amplitude
    amplitudes[k - offset]."""

    amplitudes: np.ndarray
    offset: int = 0

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.ndim != 1 or amp.size == 0:
            raise DomainError("amplitudes must be a nonempty vector")
        nrm = float(np.sum(np.abs(amp) ** 2))
        if abs(nrm - 1.0) > 1e-9:
            raise DomainError(f"discrete state norm^2 = {nrm:.12g}, expected 1")
        object.__setattr__(self, "amplitudes", amp)

    @property
    def n(self) -> int:
        return self.amplitudes.size

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @staticmethod
    def from_amplitudes(values: Iterable[complex], offset: int = 0) -> "DiscreteState":
        amp = np.asarray(list(values), dtype=complex)
        nrm = math.sqrt(float(np.sum(np.abs(amp) ** 2)))
        if nrm == 0.0:
            raise DomainError("cannot normalize the zero vector")
        return DiscreteState(amp / nrm, offset)


def kronecker_state(n: int, position: int = 0) -> DiscreteState:
    if n < 1 or not 0 <= position < n:
        raise DomainError("need n >= 1 and 0 <= position < n")
    amp = np.zeros(n, dtype=complex)
    amp[position] = 1.0
    return DiscreteState(amp)


def flat_state(n: int) -> DiscreteState:
    if n < 1:
        raise DomainError("need n >= 1")
    return DiscreteState(np.full(n, n ** -0.5, dtype=complex))


def random_discrete_state(n: int, seed: int) -> DiscreteState:
    """Haar-like random state: iid complex standard normals, normalized."""
    if n < 1:
        raise DomainError("need n >= 1")
    rng = np.random.default_rng(seed)
    amp = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return DiscreteState.from_amplitudes(amp)


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------


def sample_on_grid(state: Wavefunction, half_width: float, n: int) -> SampledGrid:
    """Sample the (real, nonnegative) amplitude sqrt(density) of a d=1 state
    on a symmetric uniform grid of n points, renormalized on the grid."""
    if state.d != 1:
        raise DomainError("sample_on_grid supports d=1")
    if n < 8:
        raise DomainError("need at least 8 samples")
    dx = 2.0 * half_width / n
    xs = -half_width + dx * np.arange(n)
    dens = np.clip(state.density_points(xs.reshape(-1, 1)), 0.0, None)
    amp = np.sqrt(dens).astype(complex)
    nrm2 = float(np.sum(np.abs(amp) ** 2) * dx)
    amp /= math.sqrt(nrm2)
    return SampledGrid(1, (float(xs[0]),), (dx,), amp)


def grid_to_csv(grid: SampledGrid, path: str) -> None:
    header = [f"x_{i + 1}" for i in range(grid.d)] + ["re", "im"]
    axes = [grid.axis(i) for i in range(grid.d)]
    flat = grid.samples.reshape(-1)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row_idx, val in enumerate(flat):
            idx = np.unravel_index(row_idx, grid.samples.shape)
            coords = [f"{axes[i][idx[i]]:.17g}" for i in range(grid.d)]
            w.writerow(coords + [f"{val.real:.17g}", f"{val.imag:.17g}"])


def grid_from_csv(path: str, check_norm: bool = True) -> SampledGrid:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows[0]) < 3:
        raise DomainError("grid CSV needs header x_1,...,x_d,re,im")
    d = len(rows[0]) - 2
    if d not in (1, 2, 3):
        raise DomainError("grid CSV supports d in {1, 2, 3}")
    data = np.asarray([[float(v) for v in r] for r in rows[1:]], dtype=float)
    coords, re, im = data[:, :d], data[:, d], data[:, d + 1]
    axes = []
    for i in range(d):
        ax = np.unique(coords[:, i])
        if ax.size > 1:
            steps = np.diff(ax)
            if np.max(np.abs(steps - steps[0])) > 1e-9 * abs(steps[0]):
                raise DomainError(f"axis {i + 1} is not uniformly spaced")
        axes.append(ax)
    shape = tuple(ax.size for ax in axes)
    if int(np.prod(shape)) != len(data):
        raise DomainError("rows do not fill a full Cartesian grid")
    samples = (re + 1j * im).reshape(shape)
    origin = tuple(float(ax[0]) for ax in axes)
    spacing = tuple(float(ax[1] - ax[0]) if ax.size > 1 else 1.0 for ax in axes)
    return SampledGrid(d, origin, spacing, samples, check_norm=check_norm)
