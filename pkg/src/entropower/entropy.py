"""Renyi entropy powers N_lambda = exp(H_lambda / d) in the continuous,
discrete, and torus settings.

``lambda = 1`` is always handled by a dedicated Shannon path; closed-form
families take the symmetric two-sided numerical limit of the analytic
expression (the two sides must agree), and quadrature paths evaluate
-integral(rho ln rho) directly.  ``lambda = 0`` is the support measure and
``lambda = inf`` the essential supremum of the density.  Quadrature-backed
paths route requests inside the band |lambda - 1| < 1e-4 through the
Shannon path to avoid cancellation in (1/(1-lambda)) ln(integral); families
with a cancellation-free log-space formula evaluate it down to a 1e-12
guard instead.

For lambda = inf two conventions exist: the limit of the integral formula
gives exp(-(1/d) ln sup|Psi|^2) (the default, ``convention="density"``),
while the sup-norm reading gives exp(-(1/d) ln sup|Psi|)
(``convention="amplitude"``).  Both are exposed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import DivergenceError, DomainError, NumericalError, UnsupportedFamilyError
from .specfun import bessel_k, integrate, log_gamma
from .states import (
    DiscreteState, ExponentialLaplace, Gaussian, Rescaled, SampledGrid,
    StudentR, StudentT, StudentTPartner, UniformBall, Wavefunction,
    fourier_partner,
)
from .transforms import PeriodicDensity, continuous_transform

__all__ = [
    "EntropyPower", "partner_power", "renyi_power_continuous",
    "renyi_power_discrete", "renyi_power_torus", "renyi_power_quadrature",
    "student_t_power_analytic", "student_t_partner_power_analytic",
]

_SHANNON_BAND = 1e-4
# The 1e-4 band guards paths where (1/(1-lambda)) ln(integral rho^lambda)
# amplifies quadrature noise.  Families whose log-space formula is free of
# cancellation (Gaussian, Laplace) evaluate it all the way down to this
# machine-level guard instead, so values stay exact at the band edge.
_FORMULA_GUARD = 1e-12
_LIMIT_H = 1e-4
_LIMIT_AGREE = 1e-6
_TORUS_N = 16384


@dataclass(frozen=True)
class EntropyPower:
    """An entropy power N_lambda together with how it was obtained."""

    value: float
    lam: float
    method: str  # analytic | quadrature | discrete-sum | torus-quadrature
    abs_error_estimate: float = 0.0
    caveat: str | None = None

    def __post_init__(self):
        if self.value < 0.0 or math.isnan(self.value):
            raise NumericalError(f"invalid entropy power {self.value}")

    @property
    def is_divergent(self) -> bool:
        return math.isinf(self.value) or self.value == 0.0


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if math.isnan(lam) or lam < 0.0:
        raise DomainError("lambda must be a real number >= 0")
    return lam


def _two_sided_limit(f, at: float = 1.0, h: float = _LIMIT_H,
                     agree: float = _LIMIT_AGREE) -> tuple[float, float]:
    """Symmetric limit of f at a removable singularity; the h and h/2
    midpoints must agree to ``agree``."""
    m1 = 0.5 * (f(at - h) + f(at + h))
    m2 = 0.5 * (f(at - h / 2) + f(at + h / 2))
    diff = abs(m1 - m2)
    if diff > agree:
        raise NumericalError(
            f"one-sided limits at lambda={at} disagree by {diff:.3g}"
        )
    return m2, diff


def _ratio_gated_limit(f, at: float = 1.0, h: float = 1e-3) -> tuple[float, float]:
    """Symmetric limit for stencils with amplified quadrature noise or large
    curvature: instead of an absolute agreement gate, require the midpoint
    differences to shrink quadratically (ratio ~1/4) under refinement, then
    Richardson-extrapolate the surviving h^2 term."""
    mids = [0.5 * (f(at - s) + f(at + s)) for s in (h, h / 2, h / 4)]
    d12 = abs(mids[0] - mids[1])
    d23 = abs(mids[1] - mids[2])
    if d12 <= 1e-6:
        # converged before the noise floor; the finest level only adds noise
        ext = (4.0 * mids[1] - mids[0]) / 3.0
        return ext, max(d12 / 3.0, 1e-15)
    if d23 <= 0.75 * d12:
        ext = (4.0 * mids[2] - mids[1]) / 3.0
        return ext, max(abs(ext - mids[2]), 1e-15)
    raise NumericalError(
        f"one-sided limits at lambda={at} do not converge: refinement "
        f"differences {d12:.3g} -> {d23:.3g}")


# ---------------------------------------------------------------------------
# Student-t closed forms
# ---------------------------------------------------------------------------


def _check_dim(d: int) -> int:
    if int(d) != d or d < 1:
        raise DomainError("dimension must be a positive integer")
    return int(d)


def _student_t_condition(d: int, nu: float, alpha: float) -> None:
    floor = max(0.0, d * (1.0 - alpha) / alpha) if alpha > 0 else math.inf
    if not nu > floor:
        raise DivergenceError(
            f"nu > max(0, d(1-alpha)/alpha) = {floor:.6g}", math.inf)


def _student_t_log_power(d: int, nu: float, alpha: float) -> float:
    """ln N_alpha for the power-law state, away from alpha in {1, inf}."""
    s = (d + nu) / 2.0
    a_const = log_gamma(s) - log_gamma(nu / 2.0)
    num = alpha * a_const - log_gamma(alpha * s) + log_gamma(alpha * s - d / 2.0)
    return 0.5 * math.log(math.pi) + num / (d * (1.0 - alpha))


def student_t_power_analytic(d: int, nu: float, alpha: float) -> EntropyPower:
    """Closed-form N_alpha of the power-law (Student-t) state."""
    d = _check_dim(d)
    if not nu > 0:
        raise DomainError("nu must be > 0")
    alpha = _check_lambda(alpha)
    _student_t_condition(d, nu, alpha)
    if math.isinf(alpha):
        ln_sup = log_gamma((d + nu) / 2) - (d / 2) * math.log(math.pi) \
            - log_gamma(nu / 2)
        return EntropyPower(math.exp(-ln_sup / d), alpha, "analytic")
    if abs(alpha - 1.0) < _SHANNON_BAND:
        val, err = _two_sided_limit(lambda a: _student_t_log_power(d, nu, a))
        return EntropyPower(math.exp(val), alpha, "analytic", err)
    return EntropyPower(math.exp(_student_t_log_power(d, nu, alpha)),
                        alpha, "analytic")


def _partner_condition(d: int, nu: float, beta: float) -> None:
    if beta <= 0:
        raise DivergenceError("beta > 0", math.inf)
    floor = max(0.0, d * (beta - 1.0) / beta)
    if not nu > floor:
        raise DivergenceError(
            f"nu > max(0, d(beta-1)/beta) = {floor:.6g}", 0.0)


def _bessel_moment(d: int, nu: float, beta: float) -> tuple[float, float]:
    """I = integral_0^inf r^{d-1+beta(nu-d)/2} K_{(d-nu)/4}(r)^{2*beta} dr,
    evaluated in log space; returns (value, abs error estimate)."""
    mu = abs(d - nu) / 4.0
    a = d - 1.0 + beta * (nu - d) / 2.0

    def integrand(r: float) -> float:
        if r <= 0.0:
            return 0.0
        try:
            k = bessel_k(mu, r)
            ln_k = math.log(k) if k > 0.0 else -math.inf
        except NumericalError:
            # small-argument leading term, only reachable deep in the
            # power-dominated regime
            ln_k = log_gamma(mu) - math.log(2.0) + mu * math.log(2.0 / r)
        ln_val = a * math.log(r) + 2.0 * beta * ln_k
        return math.exp(ln_val) if ln_val < 700.0 else math.inf

    # near the existence boundary the integrand is r^{-1+eps} at the origin
    # and the moment grows without bound, so the tolerance is relative
    res = integrate(integrand, 0.0, math.inf, tol=1e-8, points=[1.0, 10.0])
    res.require_converged()
    return res.value, res.abs_error_estimate


def _partner_log_power(d: int, nu: float, beta: float) -> tuple[float, float]:
    """ln N_beta of the Bessel-type conjugate state, away from beta in
    {1, inf}; returns (value, abs error estimate)."""
    moment, moment_err = _bessel_moment(d, nu, beta)
    num = (beta * (log_gamma((d + nu) / 2) - 2 * log_gamma((d + nu) / 4))
           - beta * log_gamma(nu / 2)
           + math.log(moment)
           + ((4 - d - nu) * beta + 2) * math.log(2.0) / 2
           - log_gamma(d / 2))
    denom = d * (1.0 - beta)
    ln_n = 0.5 * math.log(math.pi) + num / denom
    err = moment_err / moment / abs(denom) if moment > 0 else 0.0
    return ln_n, err


def student_t_partner_power_analytic(d: int, nu: float, beta: float) -> EntropyPower:
    """N_beta of the Fourier conjugate of the power-law state (Bessel-type
    density); the radial moment uses adaptive quadrature, the prefactors are
    exact."""
    d = _check_dim(d)
    if not nu > 0:
        raise DomainError("nu must be > 0")
    beta = _check_lambda(beta)
    _partner_condition(d, nu, beta)
    if math.isinf(beta):
        if nu <= d:
            # density is unbounded at the origin, so sup rho = inf
            return EntropyPower(0.0, beta, "analytic",
                                caveat="density unbounded at the origin")
        m = (nu - d) / 4.0
        ln_c2 = ((4 - d - nu) / 2) * math.log(2.0) + log_gamma((d + nu) / 2) \
            - (d / 2) * math.log(math.pi) - log_gamma(nu / 2) \
            - 2 * log_gamma((d + nu) / 4)
        ln_sup = ln_c2 + 2 * (log_gamma(m) + (m - 1) * math.log(2.0))
        return EntropyPower(math.exp(-ln_sup / d), beta, "analytic")
    if abs(beta - 1.0) < _SHANNON_BAND:
        val, err = _ratio_gated_limit(lambda b: _partner_log_power(d, nu, b)[0])
        return EntropyPower(math.exp(val), beta, "analytic", err)
    ln_n, err = _partner_log_power(d, nu, beta)
    value = math.exp(ln_n)
    return EntropyPower(value, beta, "analytic", value * err)


# ---------------------------------------------------------------------------
# continuous states: closed forms per family
# ---------------------------------------------------------------------------


def _gaussian_power(state: Gaussian, lam: float) -> EntropyPower:
    _, logdet = np.linalg.slogdet(state.covariance)
    base = 0.5 * math.log(2 * math.pi) + logdet / (2 * state.d)
    if lam == 0.0:
        raise DivergenceError("finite support (Gaussian support is all of "
                              "R^d)", math.inf)
    if math.isinf(lam):
        return EntropyPower(math.exp(base), lam, "analytic")
    if abs(lam - 1.0) < _FORMULA_GUARD:
        return EntropyPower(math.exp(base + 0.5), lam, "analytic")
    return EntropyPower(
        math.exp(base + math.log1p(lam - 1.0) / (2 * (lam - 1.0))),
        lam, "analytic")


def _laplace_power(lam: float) -> EntropyPower:
    if lam == 0.0:
        raise DivergenceError("finite support (the state is supported on "
                              "all of R)", math.inf)
    if math.isinf(lam):
        return EntropyPower(1.0, lam, "analytic")
    if abs(lam - 1.0) < _FORMULA_GUARD:
        return EntropyPower(math.e, lam, "analytic")
    return EntropyPower(
        math.exp(math.log1p(lam - 1.0) / (lam - 1.0)), lam, "analytic")


def _student_r_log_integral(state: StudentR, lam: float) -> float:
    d, m = state.d, (state.nu - state.d) / 2.0
    ln_c = state.log_norm_const()
    return (lam * ln_c + (d / 2) * math.log(math.pi) + d * math.log(state.radius)
            + log_gamma(lam * m + 1.0) - log_gamma(d / 2 + lam * m + 1.0))


def _student_r_power(state: StudentR, lam: float) -> EntropyPower:
    d = state.d
    if lam == 0.0 or math.isinf(lam):
        if math.isinf(lam):
            ln_val = -state.log_norm_const() / d  # sup rho sits at the origin
        else:
            ln_val = ((d / 2) * math.log(math.pi) + d * math.log(state.radius)
                      - log_gamma(d / 2 + 1.0)) / d
        return EntropyPower(math.exp(ln_val), lam, "analytic")
    if abs(lam - 1.0) < _SHANNON_BAND:
        val, err = _two_sided_limit(
            lambda t: _student_r_log_integral(state, t) / (d * (1.0 - t)))
        return EntropyPower(math.exp(val), lam, "analytic", err)
    return EntropyPower(
        math.exp(_student_r_log_integral(state, lam) / (d * (1.0 - lam))),
        lam, "analytic")


def _uniform_ball_power(state: UniformBall, lam: float) -> EntropyPower:
    return EntropyPower(state.volume ** (1.0 / state.d), lam, "analytic")


def _sampled_grid_power(grid: SampledGrid, lam: float) -> EntropyPower:
    dv = grid.cell_volume()
    dens = np.abs(grid.samples.reshape(-1)) ** 2

    def log_integral(rho: np.ndarray, lam: float) -> float:
        return math.log(float(np.sum(rho ** lam)) * dv)

    def ln_n(rho: np.ndarray) -> float:
        if lam == 0.0:
            support = float(np.count_nonzero(rho) * dv)
            return math.log(support) / grid.d
        if math.isinf(lam):
            return -math.log(float(np.max(rho))) / grid.d
        if abs(lam - 1.0) < _SHANNON_BAND:
            pos = rho[rho > 0.0]
            return -float(np.sum(pos * np.log(pos)) * dv) / grid.d
        return log_integral(rho, lam) / (grid.d * (1.0 - lam))

    value = ln_n(dens)
    err = 0.0
    if grid.d == 1 and dens.size >= 16 and not (lam == 0.0 or math.isinf(lam)):
        # Richardson-style estimate against the half-resolution grid
        half = np.abs(grid.samples.reshape(-1)[::2]) ** 2
        dv2, dv = 2 * dv, dv
        coarse_norm = float(np.sum(half)) * dv2
        half = half / coarse_norm
        ln_half = {
            True: lambda: -float(np.sum(half[half > 0] * np.log(half[half > 0])) * dv2) / grid.d,
            False: lambda: math.log(float(np.sum(half ** lam)) * dv2) / (grid.d * (1.0 - lam)),
        }[abs(lam - 1.0) < _SHANNON_BAND]()
        err = abs(math.exp(value) - math.exp(ln_half))
    caveat = "grid-support measure" if lam == 0.0 else None
    return EntropyPower(math.exp(value), lam, "quadrature", err, caveat)


def renyi_power_continuous(state: Wavefunction, lam: float,
                           convention: str = "density") -> EntropyPower:
    """Entropy power of a continuous state.

    Closed forms are used for the analytic families; sampled grids use grid
    quadrature.  Divergent cases are reported as value ``inf`` (integral
    diverges, lambda < 1 side) or ``0`` (unbounded density, lambda > 1
    side) with the violated condition in ``caveat``.
    """
    lam = _check_lambda(lam)
    if convention not in ("density", "amplitude"):
        raise DomainError("convention must be 'density' or 'amplitude'")
    try:
        result = _dispatch_continuous(state, lam)
    except DivergenceError as err:
        return EntropyPower(err.limit, lam, "analytic", caveat=err.condition)
    if convention == "amplitude" and math.isinf(lam):
        # sup-norm reading: exp(-(1/d) ln sup|Psi|) = sqrt of the default
        return EntropyPower(math.sqrt(result.value), lam, result.method,
                            result.abs_error_estimate, result.caveat)
    return result


def _dispatch_continuous(state: Wavefunction, lam: float) -> EntropyPower:
    if isinstance(state, Rescaled):
        base = _dispatch_continuous(state.base, lam)
        scale = state.abs_det ** (1.0 / state.d)
        return EntropyPower(base.value * scale, lam, base.method,
                            base.abs_error_estimate * scale, base.caveat)
    if isinstance(state, Gaussian):
        return _gaussian_power(state, lam)
    if isinstance(state, StudentT):
        return student_t_power_analytic(state.d, state.nu, lam)
    if isinstance(state, StudentTPartner):
        return student_t_partner_power_analytic(state.d, state.nu, lam)
    if isinstance(state, StudentR):
        return _student_r_power(state, lam)
    if isinstance(state, ExponentialLaplace):
        return _laplace_power(lam)
    if isinstance(state, UniformBall):
        return _uniform_ball_power(state, lam)
    if isinstance(state, SampledGrid):
        return _sampled_grid_power(state, lam)
    raise UnsupportedFamilyError(
        f"no entropy-power rule for {type(state).__name__}")


# ---------------------------------------------------------------------------
# direct quadrature (d=1), used as an independent cross-check
# ---------------------------------------------------------------------------


def _split_point(state: Wavefunction, lam: float) -> float | None:
    """Tail split where the integrand drops to 1e-16 of its peak, for
    power-law densities."""
    if isinstance(state, StudentT):
        q = lam * (state.d + state.nu) / 2.0
        # the tail term is an exact substitution, so the split never needs
        # to sit further out than the 1e-16-of-peak point
        return min(math.sqrt(10.0 ** (16.0 / q) - 1.0), 50.0)
    return None


def renyi_power_quadrature(state: Wavefunction, lam: float) -> EntropyPower:
    """Entropy power of a symmetric d=1 state by direct quadrature of the
    density (independent of the closed forms)."""
    lam = _check_lambda(lam)
    if state.d != 1:
        raise DomainError("quadrature path supports d=1")
    if lam == 0.0 or math.isinf(lam):
        raise DomainError("quadrature path supports finite lambda > 0")

    def dens(x: float) -> float:
        return float(state.density_points(np.array([[x]]))[0])

    if abs(lam - 1.0) < _SHANNON_BAND:
        def integrand(x):
            r = dens(x)
            return -r * math.log(r) if r > 0.0 else 0.0
        res = integrate(integrand, -math.inf, math.inf, points=[0.0])
        res.require_converged()
        return EntropyPower(math.exp(res.value), lam, "quadrature",
                            res.abs_error_estimate * math.exp(res.value))

    split = _split_point(state, lam)
    if split is not None and isinstance(state, StudentT):
        # integrate the bulk directly and the power-law tail after the
        # substitution t = 1/x, which maps it to a bounded smooth integrand
        q = lam * (state.d + state.nu) / 2.0
        c_lam = math.exp(lam * state.log_norm_const())
        bulk = integrate(lambda x: c_lam * (1.0 + x * x) ** (-q),
                         0.0, split, points=[1.0])
        tail = integrate(lambda t: c_lam * t ** (2 * q - 2) * (1 + t * t) ** (-q),
                         0.0, 1.0 / split)
        bulk.require_converged()
        tail.require_converged()
        total = 2.0 * (bulk.value + tail.value)
        err = 2.0 * (bulk.abs_error_estimate + tail.abs_error_estimate)
    else:
        res = integrate(lambda x: dens(x) ** lam, -math.inf, math.inf,
                        points=[0.0])
        res.require_converged()
        total, err = res.value, res.abs_error_estimate
    if total <= 0.0 or math.isinf(total):
        raise NumericalError("quadrature produced a non-finite density integral")
    ln_n = math.log(total) / (1.0 - lam)
    value = math.exp(ln_n)
    return EntropyPower(value, lam, "quadrature",
                        value * err / total / abs(1.0 - lam))


# ---------------------------------------------------------------------------
# discrete setting
# ---------------------------------------------------------------------------


def renyi_power_discrete(state: DiscreteState, lam: float) -> EntropyPower:
    """N_lambda = (sum_k p_k^lambda)^{1/(1-lambda)} with the usual limits."""
    lam = _check_lambda(lam)
    p = state.probabilities()
    p = p[p > 0.0]
    if lam == 0.0:
        return EntropyPower(float(p.size), lam, "discrete-sum")
    if math.isinf(lam):
        return EntropyPower(1.0 / float(np.max(p)), lam, "discrete-sum")
    if abs(lam - 1.0) < _SHANNON_BAND:
        return EntropyPower(math.exp(-float(np.sum(p * np.log(p)))), lam,
                            "discrete-sum")
    return EntropyPower(
        math.exp(math.log(float(np.sum(p ** lam))) / (1.0 - lam)), lam,
        "discrete-sum")


# ---------------------------------------------------------------------------
# conjugate powers of compactly supported states (spectral route)
# ---------------------------------------------------------------------------

# The conjugate amplitude of psi(x) = sqrt(c) (1 - x^2/R^2)^{m/2} decays like
# A k^{-(m/2+1)} |cos(kR - phase)|, so rho_hat^beta is integrable iff
# beta (m+2) > 1.  The resolved band [0, K] is integrated by Simpson's rule
# on a grid with _PTS_PER_PERIOD points per half-period pi/R, and the tail
# beyond K analytically through the mean of |cos|^{2 beta}.
_SPECTRUM_KR = 2500.0
_PTS_PER_PERIOD = 80
_SPECTRUM_CHUNK = 4000
_TAIL_MARGIN = 0.05
_COMPACT_SHANNON_H = 1e-2
_COMPACT_SHANNON_AGREE = 1e-3


@dataclass(frozen=True)
class _CompactSpectrum:
    k: np.ndarray
    rho: np.ndarray  # conjugate density on the k grid
    dk: float
    cutoff: float    # end of the resolved band
    amp: float       # envelope constant A of the decaying amplitude
    m: float


_SPECTRUM_CACHE: dict[tuple, _CompactSpectrum] = {}


def _compact_profile(state: Wavefunction) -> tuple[float, float, float]:
    """(R, m, c) with psi(x) = sqrt(c) (1 - x^2/R^2)^{m/2} on [-R, R]."""
    if isinstance(state, UniformBall) and state.d == 1:
        return state.radius, 0.0, 1.0 / (2.0 * state.radius)
    if isinstance(state, StudentR) and state.d == 1:
        return (state.radius, (state.nu - state.d) / 2.0,
                math.exp(state.log_norm_const()))
    raise UnsupportedFamilyError(
        f"no spectral profile for {type(state).__name__} in dimension {state.d}")


def _compact_spectrum(state: Wavefunction) -> _CompactSpectrum:
    R, m, c = _compact_profile(state)
    key = (round(R, 15), round(m, 15))
    cached = _SPECTRUM_CACHE.get(key)
    if cached is not None:
        return cached
    dk = math.pi / (R * _PTS_PER_PERIOD)
    k = np.arange(0.0, _SPECTRUM_KR / R, dk)
    # Gauss-Legendre resolves the <= KR/(2 pi) oscillations of cos(kx) psi(x)
    ngl = int(_SPECTRUM_KR / 2) + 64
    xs, ws = np.polynomial.legendre.leggauss(ngl)
    x = 0.5 * R * (xs + 1.0)
    weighted = 0.5 * R * ws * math.sqrt(c) * (1.0 - (x / R) ** 2) ** (m / 2.0)
    coeff = math.sqrt(2.0 / math.pi)
    psihat = np.empty_like(k)
    for i in range(0, k.size, _SPECTRUM_CHUNK):
        kk = k[i:i + _SPECTRUM_CHUNK]
        psihat[i:i + _SPECTRUM_CHUNK] = coeff * (np.cos(np.outer(kk, x)) @ weighted)
    amp = coeff * math.sqrt(c) * (2.0 / R) ** (m / 2.0) * math.gamma(m / 2.0 + 1.0)
    spec = _CompactSpectrum(k, psihat ** 2, dk, float(k[-1] + dk), amp, m)
    _SPECTRUM_CACHE[key] = spec
    return spec


def _compact_log_integral(spec: _CompactSpectrum, beta: float,
                          stride: int = 1) -> float:
    """ln integral over R of the conjugate density to the power beta."""
    vals = spec.rho[::stride] ** beta
    bulk = float(simpson(vals, dx=spec.dk * stride))
    p = beta * (spec.m + 2.0)
    mean = math.exp(log_gamma(beta + 0.5) - 0.5 * math.log(math.pi)
                    - log_gamma(beta + 1.0))
    tail = spec.amp ** (2.0 * beta) * mean * spec.cutoff ** (1.0 - p) / (p - 1.0)
    return math.log(2.0 * (bulk + tail))


def _compact_partner_power(state: Wavefunction, beta: float) -> EntropyPower:
    R, m, c = _compact_profile(state)
    if beta == 0.0:
        raise DivergenceError(
            "finite conjugate support (the conjugate density is analytic, "
            "so its support is the whole line)", math.inf)
    boundary = 1.0 / (m + 2.0)
    if beta <= boundary:
        raise DivergenceError(
            f"beta > 1/(m+2) = {boundary:.6g} for tail exponent m = {m:.6g}",
            math.inf)
    if math.isinf(beta):
        # the conjugate amplitude of a nonnegative profile peaks at the
        # origin: sup rho_hat = (2/pi) (integral_0^R psi)^2
        ln_half_mass = (0.5 * math.log(c) + math.log(R)
                        + 0.5 * math.log(math.pi) - math.log(2.0)
                        + log_gamma(m / 2.0 + 1.0) - log_gamma(m / 2.0 + 1.5))
        ln_sup = math.log(2.0 / math.pi) + 2.0 * ln_half_mass
        return EntropyPower(math.exp(-ln_sup), beta, "analytic")
    if beta * (m + 2.0) - 1.0 < _TAIL_MARGIN:
        raise NumericalError(
            f"beta = {beta:.6g} is too close to the integrability boundary "
            f"{boundary:.6g} for the spectral route")
    spec = _compact_spectrum(state)
    if abs(beta - 1.0) < _SHANNON_BAND:
        val, err = _two_sided_limit(
            lambda b: _compact_log_integral(spec, b) / (1.0 - b),
            h=_COMPACT_SHANNON_H, agree=_COMPACT_SHANNON_AGREE)
        return EntropyPower(math.exp(val), beta, "quadrature", err)
    value = math.exp(_compact_log_integral(spec, beta) / (1.0 - beta))
    coarse = math.exp(_compact_log_integral(spec, beta, stride=2)
                      / (1.0 - beta))
    return EntropyPower(value, beta, "quadrature", abs(value - coarse))


def partner_power(state: Wavefunction, lam: float,
                  convention: str = "density") -> EntropyPower:
    """Entropy power N_lambda of the Fourier conjugate of ``state``.

    Families whose conjugate is itself a closed-form state delegate to that
    state's rule; compactly supported profiles (d=1) use the spectral route;
    sampled grids are transformed numerically.  Divergent cases are reported
    the same way as :func:`renyi_power_continuous`.
    """
    lam = _check_lambda(lam)
    if convention not in ("density", "amplitude"):
        raise DomainError("convention must be 'density' or 'amplitude'")
    if isinstance(state, Rescaled):
        base = partner_power(state.base, lam, convention)
        scale = state.abs_det ** (-1.0 / state.d)
        return EntropyPower(base.value * scale, lam, base.method,
                            base.abs_error_estimate * scale, base.caveat)
    try:
        conjugate = fourier_partner(state)
    except UnsupportedFamilyError:
        conjugate = None
    if conjugate is not None:
        return renyi_power_continuous(conjugate, lam, convention)
    if isinstance(state, SampledGrid):
        return renyi_power_continuous(continuous_transform(state), lam,
                                      convention)
    try:
        result = _compact_partner_power(state, lam)
    except DivergenceError as err:
        return EntropyPower(err.limit, lam, "quadrature", caveat=err.condition)
    if convention == "amplitude" and math.isinf(lam):
        return EntropyPower(math.sqrt(result.value), lam, result.method,
                            result.abs_error_estimate, result.caveat)
    return result


# ---------------------------------------------------------------------------
# torus setting
# ---------------------------------------------------------------------------


def renyi_power_torus(density: PeriodicDensity, lam: float,
                      n: int = _TORUS_N) -> EntropyPower:
    """Entropy power of a periodic density on the d-torus.

    The density varies along the first coordinate only; the trapezoid rule
    along that coordinate (spectrally accurate for trigonometric data) is
    combined with the exact flat factors of the remaining coordinates.  The
    error estimate compares against the half-resolution grid.
    """
    lam = _check_lambda(lam)
    d = density.d
    if lam == 0.0:
        # the density is the modulus of a trigonometric polynomial, whose
        # zero set has measure zero: the support is the full torus
        return EntropyPower(2 * math.pi, lam, "analytic")
    th = 2 * math.pi * np.arange(n) / n
    rho = np.asarray(density.density(th), dtype=float)
    ln_flat = (d - 1) * math.log(2 * math.pi)

    def ln_n(vals: np.ndarray) -> float:
        if math.isinf(lam):
            return -math.log(float(np.max(vals))) / d
        if abs(lam - 1.0) < _SHANNON_BAND:
            pos = vals[vals > 0.0]
            h1 = -float(np.mean(pos * np.log(pos))) * 2 * math.pi
            return h1 * math.exp(ln_flat) / d
        ln_int = math.log(float(np.mean(vals ** lam)) * 2 * math.pi) + ln_flat
        return ln_int / (d * (1.0 - lam))

    value = math.exp(ln_n(rho))
    half = math.exp(ln_n(rho[::2]))
    return EntropyPower(value, lam, "torus-quadrature", abs(value - half))
