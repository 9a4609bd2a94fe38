"""Tests for uncertainty products, region verification, counterexample
search, and sweeps.

Frozen oracle values:

* power-law nu=3 pair at (2,2): product 8*pi/5 (both factors known exactly)
* Gaussian pair at (2,2): product 2*pi at any covariance
* Gaussian diagonal formula: pi * alpha^{1/(2(alpha-1))} * beta^{1/(2(beta-1))}
* (2, 1/2) Gaussian product 2*sqrt(2)*pi, strictly above B(2) = 3*sqrt(3)*pi/2
* Kronecker indicator, discrete-continuous: product exactly 2*pi
* Kronecker indicator, discrete-discrete: product exactly n
"""

import json
import math

import numpy as np
import pytest

from entropower.errors import DivergenceError, DomainError, NumericalError
from entropower.regions import BoundCase, IndexPair, Region, bound_B, \
    bound_general, classify, conjugate_index, maassen_bound
from entropower.states import (
    ExponentialLaplace, Gaussian, StudentR, StudentT, UniformBall,
    kronecker_state, random_discrete_state,
)
from entropower.verify import (
    ProductReport, SweepResult, counterexample, default_grid, format_float,
    gaussian_product_analytic, pair_computable, sample_pairs_in_d,
    scale_invariance_check, sweep, uncertainty_product, verify_region,
)

TWO_PI = 2.0 * math.pi
CC = BoundCase("continuous_continuous")


# ---------------------------------------------------------------------------
# uncertainty products
# ---------------------------------------------------------------------------


def test_student_t3_pair_product_8pi_over_5():
    report = uncertainty_product(StudentT(1, 3.0), IndexPair(2.0, 2.0), CC)
    assert abs(report.product - 8.0 * math.pi / 5.0) < 1e-6
    assert report.bound is None
    assert report.satisfied == "no-bound"
    assert report.region == "D0"
    assert report.product < TWO_PI


def test_gaussian_pair_product_2pi():
    for cov in (1.0, 0.5, 3.7):
        report = uncertainty_product(Gaussian(1, cov), IndexPair(2.0, 2.0), CC)
        assert abs(report.product - TWO_PI) < 1e-12


def test_gaussian_on_curve_saturates():
    for alpha in (0.7, 2.0, 3.0):
        pair = IndexPair(alpha, conjugate_index(alpha))
        report = uncertainty_product(Gaussian(1), pair, CC)
        assert report.satisfied == "holds"
        assert report.bound == pytest.approx(bound_B(alpha), rel=1e-12)
        assert abs(report.margin) < 1e-9 * report.bound


def test_gaussian_in_d_minus_holds_with_positive_margin():
    report = uncertainty_product(Gaussian(1), IndexPair(2.0, 0.5), CC)
    assert report.satisfied == "holds"
    assert report.margin > 0.0
    assert report.product == pytest.approx(2.0 * math.sqrt(2.0) * math.pi,
                                           rel=1e-12)


def test_divergent_factor_raises():
    # alpha below the heavy-tail existence floor d/(d+nu) = 1/4
    with pytest.raises(DivergenceError):
        uncertainty_product(StudentT(1, 3.0), IndexPair(0.2, 2.0), CC)
    # compact conjugate below its integrability boundary
    with pytest.raises(DivergenceError):
        uncertainty_product(UniformBall(1), IndexPair(2.0, 0.4), CC)


def test_tolerance_budget_by_method():
    analytic = uncertainty_product(Gaussian(1), IndexPair(2.0, 0.5), CC)
    assert analytic.tolerance == pytest.approx(analytic.bound * 1e-9)
    numeric = uncertainty_product(UniformBall(1), IndexPair(2.0, 0.6), CC)
    assert numeric.tolerance == pytest.approx(numeric.bound * 1e-6)
    assert numeric.satisfied == "holds"


def test_setting_validation():
    with pytest.raises(DomainError):
        uncertainty_product(kronecker_state(4), IndexPair(2.0, 2.0), CC)
    with pytest.raises(DomainError):
        uncertainty_product(Gaussian(1), IndexPair(2.0, 2.0),
                            BoundCase("discrete_discrete", n=4))
    with pytest.raises(DomainError):
        uncertainty_product(kronecker_state(4), IndexPair(2.0, 2.0),
                            BoundCase("discrete_discrete", n=5))


def test_discrete_discrete_kronecker_product_is_n():
    # the conjugated saturation: indicator against its flat transform
    for n in (2, 4, 8):
        report = uncertainty_product(kronecker_state(n), IndexPair(0.5, 3.0),
                                     BoundCase("discrete_discrete", n=n))
        assert report.product == pytest.approx(float(n), rel=1e-12)
        assert report.bound == pytest.approx(maassen_bound(n))
        # the constant bound sits strictly below the saturation value for
        # n >= 2; both numbers are reported, the gap is genuine
        assert report.bound < report.product
        assert report.satisfied == "holds"


def test_discrete_discrete_random_states_hold():
    grid = [IndexPair(a, b) for a in (0.25, 1.0, 4.0) for b in (0.5, 2.0)]
    for seed in range(5):
        state = random_discrete_state(4, seed)
        for pair in grid:
            report = uncertainty_product(state, pair,
                                         BoundCase("discrete_discrete", n=4))
            assert report.satisfied == "holds"
            assert report.product >= maassen_bound(4) * (1.0 - 1e-9)


def test_discrete_continuous_kronecker_2pi():
    # indicator series-transforms to the flat torus density
    for pair in (IndexPair(2.0, 2.0 / 3.0), IndexPair(0.8, 1.0)):
        report = uncertainty_product(kronecker_state(5), pair,
                                     BoundCase("discrete_continuous"))
        assert report.product == pytest.approx(TWO_PI, rel=1e-12)
        assert report.bound == pytest.approx(TWO_PI)
        assert report.satisfied == "holds"
        assert abs(report.margin) < 1e-9


def test_discrete_continuous_d0_has_no_bound():
    report = uncertainty_product(kronecker_state(5), IndexPair(2.0, 2.0),
                                 BoundCase("discrete_continuous"))
    assert report.bound is None
    assert report.satisfied == "no-bound"


# ---------------------------------------------------------------------------
# Gaussian closed-form product
# ---------------------------------------------------------------------------


def test_gaussian_product_analytic_values():
    assert gaussian_product_analytic(IndexPair(2.0, 2.0)) == pytest.approx(
        TWO_PI, rel=1e-12)
    assert gaussian_product_analytic(IndexPair(2.0, 2.0 / 3.0)) == pytest.approx(
        3.0 * math.sqrt(3.0) * math.pi / 2.0, rel=1e-12)
    assert gaussian_product_analytic(IndexPair(2.0, 0.5)) == pytest.approx(
        2.0 * math.sqrt(2.0) * math.pi, rel=1e-12)
    assert gaussian_product_analytic(IndexPair(2.0, 0.5)) > bound_B(2.0)
    assert gaussian_product_analytic(IndexPair(1.0, 1.0)) == pytest.approx(
        math.e * math.pi, rel=1e-12)


def test_gaussian_product_matches_computed_products():
    for pair in (IndexPair(1.5, 0.7), IndexPair(3.0, 1.2),
                 IndexPair(0.6, 0.9)):
        report = uncertainty_product(Gaussian(1), pair, CC)
        assert report.product == pytest.approx(
            gaussian_product_analytic(pair), rel=1e-10)


def test_gaussian_product_analytic_rejects_zero():
    with pytest.raises(DomainError):
        gaussian_product_analytic(IndexPair(0.0, 2.0))


# ---------------------------------------------------------------------------
# existence pre-filter and pair sampler
# ---------------------------------------------------------------------------


def test_pair_computable():
    assert pair_computable(Gaussian(1), IndexPair(0.3, 4.0))
    assert not pair_computable(Gaussian(1), IndexPair(0.0, 2.0))
    assert not pair_computable(StudentT(1, 3.0), IndexPair(0.2, 2.0))
    assert pair_computable(StudentT(1, 3.0), IndexPair(0.3, 2.0))
    assert not pair_computable(UniformBall(1), IndexPair(2.0, 0.4))
    assert pair_computable(UniformBall(1), IndexPair(2.0, 0.6))
    # compact power-law conjugate boundary is 1/(m+2) = 1/3 for nu=3
    assert not pair_computable(StudentR(1, 3.0), IndexPair(2.0, 0.3))
    assert pair_computable(StudentR(1, 3.0), IndexPair(2.0, 0.4))
    assert not pair_computable(ExponentialLaplace(), IndexPair(2.0, 0.2))
    assert pair_computable(ExponentialLaplace(), IndexPair(2.0, 0.3))
    # heavy tail below d: the Bessel side caps the conjugate index
    assert not pair_computable(StudentT(1, 0.5), IndexPair(1.0, 2.5))
    assert pair_computable(StudentT(1, 0.5), IndexPair(1.0, 1.5))


def test_sample_pairs_in_d_composition():
    pairs = sample_pairs_in_d(100, 20, 20, seed=7)
    assert len(pairs) == 100
    regions = [classify(p) for p in pairs]
    assert regions.count(Region.C) == 20
    assert regions.count(Region.S) == 20
    assert regions.count(Region.D_MINUS) == 60
    assert Region.D0 not in regions
    # deterministic under the same seed
    again = sample_pairs_in_d(100, 20, 20, seed=7)
    assert [(p.alpha, p.beta) for p in pairs] == \
        [(p.alpha, p.beta) for p in again]


# ---------------------------------------------------------------------------
# region verification
# ---------------------------------------------------------------------------


def test_verify_region_small_grid():
    states = [Gaussian(1), StudentT(1, 3.0)]
    pairs = [IndexPair(2.0, 2.0 / 3.0), IndexPair(0.8, 1.0),
             IndexPair(0.3, 0.3)]
    reports = verify_region(states, pairs)
    assert len(reports) == 6
    assert all(r.satisfied == "holds" for r in reports)
    # deterministic state-major order
    assert reports[0].pair == pairs[0]
    assert reports[3].pair == pairs[0]


def test_verify_region_aggregates_failures():
    with pytest.raises(NumericalError, match="1 of 2 points failed"):
        verify_region([UniformBall(1)],
                      [IndexPair(2.0, 0.4), IndexPair(2.0, 0.8)])


def test_verify_region_thread_pool_matches_serial():
    states = [Gaussian(1)]
    pairs = [IndexPair(2.0, 2.0 / 3.0), IndexPair(1.5, 0.9)]
    serial = verify_region(states, pairs, workers=1)
    threaded = verify_region(states, pairs, workers=4)
    assert [r.product for r in serial] == [r.product for r in threaded]


# ---------------------------------------------------------------------------
# counterexample search
# ---------------------------------------------------------------------------


def test_counterexample_2_2():
    nu, report = counterexample(IndexPair(2.0, 2.0), 0.5, d=1)
    assert 0.5 < nu < 3.0
    assert report.product < 0.5
    assert report.bound is None


def test_counterexample_beta_below_one():
    nu, report = counterexample(IndexPair(2.0, 0.75), 0.5, d=1)
    assert 0.0 < nu < 1.0
    assert report.product < 0.5


def test_counterexample_beta_one_continuity_path():
    # (3, 1) sits in the unbounded region; the limit point is nu* = 0
    nu, report = counterexample(IndexPair(3.0, 1.0), 0.5, d=1)
    assert nu > 0.0
    assert report.product < 0.5


def test_counterexample_rejects_bounded_pairs():
    with pytest.raises(DomainError, match="is in C"):
        counterexample(IndexPair(2.0, 2.0 / 3.0), 0.5)
    with pytest.raises(DomainError, match="is in D_minus"):
        counterexample(IndexPair(2.0, 0.5), 0.5)
    with pytest.raises(DomainError):
        counterexample(IndexPair(2.0, 2.0), -1.0)


def test_counterexample_monotone_near_endpoint():
    # approaching nu* = 1/2 from above, the product decreases
    pair = IndexPair(2.0, 2.0)
    prods = []
    for nu in (1.0, 0.75, 0.6, 0.51):
        prods.append(uncertainty_product(StudentT(1, nu), pair).product)
    assert all(b < a for a, b in zip(prods, prods[1:]))


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


def test_lambda_sweep_monotone_columns():
    grid = np.arange(0.2, 5.0001, 0.2)
    res = sweep("lambda", state=Gaussian(1), grid=grid)
    values = [p.n_alpha for p in res.points]
    assert all(v is not None for v in values)
    assert all(b <= a * (1.0 + 1e-12) for a, b in zip(values, values[1:]))
    flat = sweep("lambda", state=UniformBall(1), grid=grid)
    ball_values = [p.n_alpha for p in flat.points]
    assert max(ball_values) - min(ball_values) < 1e-10


def test_lambda_sweep_gap_rows():
    # the nu=3 heavy tail diverges for lambda <= 1/4
    res = sweep("lambda", state=StudentT(1, 3.0), grid=[0.1, 0.2, 0.5, 2.0])
    assert res.points[0].product is None
    assert res.points[0].note is not None
    assert res.points[1].product is None
    assert res.points[2].product is not None
    assert len(res.points) == 4


def test_alpha_diagonal_student_below_gaussian_somewhere():
    grid = [round(0.6 + 0.1 * i, 10) for i in range(25)]
    res = sweep("alpha_diagonal", state=StudentT(1, 0.8), grid=grid)
    below = 0
    for point in res.points:
        if point.product is None:
            continue
        gauss = gaussian_product_analytic(IndexPair(point.param, point.param))
        if point.product < gauss:
            below += 1
    assert below > 0


def test_alpha_diagonal_bound_only_below_one():
    res = sweep("alpha_diagonal", state=Gaussian(1), grid=[0.5, 0.9, 1.5, 2.5])
    bounds = [p.bound for p in res.points]
    assert bounds[0] is not None and bounds[1] is not None
    assert bounds[2] is None and bounds[3] is None  # the unbounded region


def test_nu_sweep_dichotomy():
    grid = default_grid("nu", pair=IndexPair(2.0, 2.0 / 3.0))
    finite = sweep("nu", pair=IndexPair(2.0, 2.0 / 3.0), grid=grid[:40])
    prods = [p.product for p in finite.points if p.product is not None]
    assert len(prods) >= 30
    # finite limit: the smallest-nu values stay of bounded size
    assert prods[0] < 100.0
    assert finite.points[0].bound == pytest.approx(bound_B(2.0))

    blowup = sweep("nu", pair=IndexPair(2.0, 0.5),
                   grid=np.geomspace(1e-3, 1.0, 12))
    head = [p.product for p in blowup.points[:3]]
    assert all(v is not None and v > 10.0 * bound_B(2.0) for v in head)


def test_sweep_csv_roundtrip(tmp_path):
    res = sweep("lambda", state=Gaussian(1), grid=[0.5, 1.0, 2.0])
    path = tmp_path / "out.csv"
    csv_path, sidecar = res.write_csv(path)
    text = (tmp_path / "out.csv").read_text()
    lines = text.strip().split("\n")
    assert lines[0] == "param,N_alpha,N_beta,product,bound,region"
    assert len(lines) == 4
    # the diagonal point (2,2) lies in the unbounded region: bound empty
    last = lines[3].split(",")
    assert last[4] == ""
    assert last[5] == "D0"
    meta = json.loads((tmp_path / "out.meta.json").read_text())
    assert meta["family"] == "Gaussian"
    assert meta["tolerances"]["quadrature"] == 1e-6


def test_sweep_deterministic_bytes():
    a = sweep("lambda", state=Gaussian(1), grid=[0.5, 1.0, 2.0]).csv_text()
    b = sweep("lambda", state=Gaussian(1), grid=[0.5, 1.0, 2.0]).csv_text()
    assert a == b


def test_sweep_validation():
    with pytest.raises(DomainError):
        sweep("unknown", state=Gaussian(1))
    with pytest.raises(DomainError):
        sweep("lambda")
    with pytest.raises(DomainError):
        sweep("nu")
    with pytest.raises(DomainError):
        sweep("lambda", state=Gaussian(1), grid=[1.0, 1.0, 2.0])


def test_default_grids():
    lam = default_grid("lambda")
    assert lam[0] > 0.0 and abs(lam[-1] - 5.0) < 1e-9
    alpha = default_grid("alpha_diagonal")
    assert alpha[0] > 0.0 and abs(alpha[-1] - 3.0) < 1e-9
    nus = default_grid("nu", pair=IndexPair(2.0, 2.0))
    assert nus[0] > 0.5 and nus[0] < 0.502 and nus[-1] == pytest.approx(10.0)


# ---------------------------------------------------------------------------
# scale invariance
# ---------------------------------------------------------------------------


def test_scale_invariance_gaussian():
    dev = scale_invariance_check(Gaussian(1), IndexPair(2.0, 2.0), 3.0)
    assert dev <= 1e-6


def test_scale_invariance_student_t():
    dev = scale_invariance_check(StudentT(1, 3.0), IndexPair(2.0, 0.5), 0.25)
    assert dev <= 1e-4


def test_scale_invariance_identity_exact():
    assert scale_invariance_check(StudentT(1, 3.0), IndexPair(2.0, 2.0),
                                  1.0) == 0.0


def test_format_float():
    assert format_float(8.0 * math.pi / 5.0) == "5.02654825"
    assert format_float(maassen_bound(2)) == "1.77777778"
