"""Tests for the Fourier-convention transforms."""

import math

import numpy as np
import pytest

from entropower.errors import DomainError, NumericalError
from entropower.states import (
    DiscreteState, ExponentialLaplace, Gaussian, SampledGrid, StudentT,
    StudentTPartner, density_at, flat_state, kronecker_state,
    random_discrete_state, sample_on_grid,
)
from entropower.transforms import (
    continuous_transform, dft, idft, series_transform,
)

TWO_PI = 2 * math.pi


# ---------------------------------------------------------------------------
# series transform
# ---------------------------------------------------------------------------


def test_series_kronecker_is_flat():
    pd = series_transform(kronecker_state(4, 1))
    th = np.linspace(0.0, TWO_PI, 17, endpoint=False)
    np.testing.assert_allclose(pd.density(th), 1.0 / TWO_PI, rtol=1e-12)


def test_series_kronecker_flat_d3():
    pd = series_transform(kronecker_state(1), d=3)
    assert pd.density(0.7) == pytest.approx(TWO_PI ** -3, rel=1e-12)


def test_series_two_amplitudes_cosine():
    st = DiscreteState.from_amplitudes([1.0, 1.0])
    pd = series_transform(st)
    th = np.linspace(0.0, TWO_PI, 33, endpoint=False)
    np.testing.assert_allclose(pd.density(th), (1.0 + np.cos(th)) / TWO_PI,
                               atol=1e-12)


def test_series_offset_changes_phase_not_norm():
    st = DiscreteState.from_amplitudes([1.0, 1.0j, -0.5], offset=3)
    pd = series_transform(st)
    assert pd.integral() == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("seed", [0, 5, 11])
def test_series_torus_integral_is_one(seed):
    pd = series_transform(random_discrete_state(16, seed))
    assert pd.integral() == pytest.approx(1.0, abs=1e-8)


# ---------------------------------------------------------------------------
# discrete Fourier transform
# ---------------------------------------------------------------------------


def test_dft_kronecker_is_flat():
    out = dft(kronecker_state(4))
    np.testing.assert_allclose(np.abs(out.amplitudes), 0.5, rtol=1e-12)


def test_dft_flat_is_kronecker():
    out = dft(flat_state(6))
    expected = np.zeros(6)
    expected[0] = 1.0
    np.testing.assert_allclose(np.abs(out.amplitudes), expected, atol=1e-12)


def test_dft_unitary():
    st = random_discrete_state(8, 42)
    out = dft(st)
    assert np.sum(out.probabilities()) == pytest.approx(1.0, abs=1e-12)
    back = idft(out)
    np.testing.assert_allclose(back.amplitudes, st.amplitudes, atol=1e-12)


# ---------------------------------------------------------------------------
# continuous transform
# ---------------------------------------------------------------------------


def test_gaussian_self_conjugate_numeric():
    grid = sample_on_grid(Gaussian(1, 0.5), 12.0, 1024)
    out, factor = continuous_transform(grid, return_factor=True)
    assert abs(factor - 1.0) < 1e-8
    ks = out.axis(0)
    mask = np.abs(ks) <= 6.0
    got = np.abs(out.samples[mask]) ** 2
    want = density_at(Gaussian(1, 0.5), ks[mask].reshape(-1, 1))
    assert np.max(np.abs(got - want)) <= 1e-6


def test_reciprocal_grid_rule():
    grid = sample_on_grid(Gaussian(1, 0.5), 10.0, 256)
    out = continuous_transform(grid)
    dx = grid.spacing[0]
    dk = TWO_PI / (256 * dx)
    assert out.spacing[0] == pytest.approx(dk, rel=1e-14)
    assert out.origin[0] == pytest.approx(-128 * dk, rel=1e-14)


def test_laplace_transform_matches_analytic_partner():
    grid = sample_on_grid(ExponentialLaplace(), 20.0, 4096)
    out = continuous_transform(grid, method="direct")
    ks = out.axis(0)
    mask = np.abs(ks) <= 5.0
    got = np.abs(out.samples[mask]) ** 2
    want = density_at(StudentT(1, 3.0), ks[mask].reshape(-1, 1))
    assert np.max(np.abs(got - want)) <= 1e-4


def test_student_t_transform_matches_bessel_density():
    # heavy tails force a very wide grid; exercises the FFT path
    n, half = 1 << 17, 25000.0
    grid = sample_on_grid(StudentT(1, 3.0), half, n)
    out, factor = continuous_transform(grid, return_factor=True)
    assert abs(factor - 1.0) < 1e-4
    ks = out.axis(0)
    mask = np.abs(ks) <= 5.0
    got = np.abs(out.samples[mask]) ** 2
    want = density_at(StudentTPartner(1, 3.0), ks[mask].reshape(-1, 1))
    assert np.max(np.abs(got - want)) <= 1e-4


def test_fft_path_matches_direct():
    grid = sample_on_grid(Gaussian(1, 2.0), 16.0, 512)
    a = continuous_transform(grid, method="direct")
    b = continuous_transform(grid, method="fft")
    np.testing.assert_allclose(b.samples, a.samples, atol=1e-10)


def test_parity_preserved():
    n, half = 512, 14.0
    dx = 2 * half / n
    xs = -half + dx * np.arange(n)
    amp = (1.0 + 0.3 * np.cos(xs)) * np.exp(-xs ** 2 / 2)
    amp = amp.astype(complex)
    amp /= math.sqrt(np.sum(np.abs(amp) ** 2) * dx)
    out = continuous_transform(SampledGrid(1, (xs[0],), (dx,), amp))
    vals = out.samples
    scale = float(np.max(np.abs(vals)))
    assert np.max(np.abs(vals.imag)) <= 1e-8 * scale
    np.testing.assert_allclose(vals[1:], vals[:0:-1], atol=1e-8 * scale)


def test_boundary_mass_precondition():
    grid = sample_on_grid(Gaussian(1), 2.0, 64)
    with pytest.raises(NumericalError, match="truncation"):
        continuous_transform(grid)


def test_double_transform_recovers_even_density():
    grid = sample_on_grid(Gaussian(1, 0.5), 12.0, 512)
    back = continuous_transform(continuous_transform(grid))
    xs = back.axis(0)
    mask = np.abs(xs) <= 5.0
    got = np.abs(back.samples[mask]) ** 2
    want = density_at(Gaussian(1, 0.5), xs[mask].reshape(-1, 1))
    assert np.max(np.abs(got - want)) <= 1e-6


def test_rejects_bad_method_and_dimension():
    grid = sample_on_grid(Gaussian(1, 0.5), 12.0, 128)
    with pytest.raises(DomainError):
        continuous_transform(grid, method="nope")
    g2 = SampledGrid(2, (0.0, 0.0), (1.0, 1.0),
                     np.full((2, 2), 0.5, dtype=complex), check_norm=False)
    with pytest.raises(DomainError):
        continuous_transform(g2)
