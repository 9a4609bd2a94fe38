"""Three Fourier conventions linking conjugate states.

* ``series_transform`` — discrete state to a periodic density on the torus,
  kernel (2*pi)^{-d/2} * sum_a Psi(a) e^{-i a x}.
* ``dft``/``idft`` — unitary discrete Fourier transform on n points,
  kernel n^{-1/2} e^{-2*pi*i*a*k/n}.
* ``continuous_transform`` — numerical continuous transform of a sampled
  d=1 state, kernel (2*pi)^{-1/2} e^{-i k x}, evaluated on the reciprocal
  grid with spacing 2*pi/(n*dx).

Multi-dimensional discrete states are supported through the injection
a -> (a, 0, ..., 0) into the d-torus, which leaves the density constant in
the remaining coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError
from .states import DiscreteState, SampledGrid

__all__ = ["PeriodicDensity", "series_transform", "dft", "idft",
           "continuous_transform"]

_DIRECT_LIMIT = 4096
_BOUNDARY_RATIO = 1e-10
_RENORM_TOL = 1e-4


@dataclass(frozen=True)
class PeriodicDensity:
    """Density |psi_hat|^2 on the torus [0, 2*pi)^d, varying along the first
    coordinate only."""

    d: int
    coefficients: np.ndarray
    offset: int = 0

    def __post_init__(self):
        if self.d < 1:
            raise DomainError("dimension must be >= 1")
        coeff = np.asarray(self.coefficients, dtype=complex)
        if coeff.ndim != 1 or coeff.size == 0:
            raise DomainError("coefficients must be a nonempty vector")
        object.__setattr__(self, "coefficients", coeff)

    def density(self, theta) -> np.ndarray | float:
        """Density at angle(s) theta (first torus coordinate)."""
        th = np.asarray(theta, dtype=float)
        scalar = th.ndim == 0
        th = np.atleast_1d(th)
        ks = self.offset + np.arange(self.coefficients.size)
        amp = np.exp(-1j * np.outer(th, ks)) @ self.coefficients
        dens = (2 * math.pi) ** (-self.d) * np.abs(amp) ** 2
        return float(dens[0]) if scalar else dens

    def integral(self, n: int = 8192) -> float:
        """Numerical torus integral of the density (the exact value is the
        squared norm of the coefficients)."""
        th = 2 * math.pi * np.arange(n) / n
        return float(np.mean(self.density(th)) * (2 * math.pi) ** self.d)


def series_transform(state: DiscreteState, d: int = 1) -> PeriodicDensity:
    """Fourier-series conjugate of a finitely supported discrete state."""
    if d < 1:
        raise DomainError("dimension must be >= 1")
    return PeriodicDensity(d, state.amplitudes, state.offset)


def dft(state: DiscreteState) -> DiscreteState:
    """Unitary discrete Fourier transform."""
    amp = np.fft.fft(state.amplitudes) / math.sqrt(state.n)
    return DiscreteState(amp)


def idft(state: DiscreteState) -> DiscreteState:
    """Inverse of :func:`dft`."""
    amp = np.fft.ifft(state.amplitudes) * math.sqrt(state.n)
    return DiscreteState(amp)


def _conjugate_grid(grid: SampledGrid) -> tuple[np.ndarray, np.ndarray, float]:
    n = grid.samples.size
    dx = grid.spacing[0]
    dk = 2 * math.pi / (n * dx)
    k = (np.arange(n) - n // 2) * dk
    x = grid.origin[0] + dx * np.arange(n)
    return x, k, dk


def _transform_direct(samples: np.ndarray, x: np.ndarray, k: np.ndarray,
                      dx: float) -> np.ndarray:
    phases = np.exp(-1j * np.outer(k, x))
    return dx / math.sqrt(2 * math.pi) * (phases @ samples)


def _transform_fft(samples: np.ndarray, x: np.ndarray, k: np.ndarray,
                   dx: float) -> np.ndarray:
    # k_m = (m - h) dk with dk*dx = 2*pi/n, so the kernel splits into a
    # pre-phase e^{+2*pi*i*h*j/n}, a plain FFT, and a post-phase e^{-i k x_0}
    n = samples.size
    h = n // 2
    j = np.arange(n)
    pre = samples * np.exp(2j * math.pi * h * j / n)
    out = np.fft.fft(pre)
    return dx / math.sqrt(2 * math.pi) * np.exp(-1j * k * x[0]) * out


def continuous_transform(grid: SampledGrid, method: str = "auto",
                         return_factor: bool = False):
    """Numerical continuous Fourier transform of a d=1 sampled state.

    Returns the conjugate state on the reciprocal grid, renormalized to unit
    norm.  With ``return_factor=True`` also returns the renormalization
    factor applied to the raw quadrature output.
    """
    if grid.d != 1:
        raise DomainError("continuous_transform supports d=1 grids")
    if method not in ("auto", "direct", "fft"):
        raise DomainError(f"unknown method {method!r}")
    samples = grid.samples
    dens = np.abs(samples) ** 2
    peak = float(np.max(dens))
    if peak == 0.0:
        raise DomainError("cannot transform the zero state")
    boundary = max(float(dens[0]), float(dens[-1]))
    if boundary > _BOUNDARY_RATIO * peak:
        raise NumericalError(
            "truncation-dominated transform: boundary density is "
            f"{boundary / peak:.3g} of the peak (limit {_BOUNDARY_RATIO:g}); "
            "widen the grid"
        )
    x, k, dk = _conjugate_grid(grid)
    dx = grid.spacing[0]
    if method == "auto":
        method = "direct" if samples.size <= _DIRECT_LIMIT else "fft"
    if method == "direct":
        out = _transform_direct(samples, x, k, dx)
    else:
        out = _transform_fft(samples, x, k, dx)
    norm2 = float(np.sum(np.abs(out) ** 2) * dk)
    factor = norm2 ** -0.5
    if abs(factor - 1.0) > _RENORM_TOL:
        raise NumericalError(
            f"renormalization factor {factor:.6g} deviates from 1 by more "
            f"than {_RENORM_TOL:g}; grid is too coarse or too narrow"
        )
    result = SampledGrid(1, (float(k[0]),), (dk,), out * factor)
    return (result, factor) if return_factor else result
