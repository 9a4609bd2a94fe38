"""Uncertainty products, inequality verification across index grids, the
small-product counterexample driver, and parameter sweeps.

Semantics of divergence here are strict: :func:`uncertainty_product` raises
:class:`DivergenceError` when either factor of the product diverges, while
sweeps record such points as explicit gap rows instead of dropping them.
A violated inequality inside the bounded region is an implementation bug
(the inequalities are proved), so :func:`verify_region` aggregates and
raises; small products inside the unbounded region are expected output of
:func:`counterexample`.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .entropy import (
    EntropyPower, _TAIL_MARGIN, partner_power, renyi_power_continuous,
    renyi_power_discrete, renyi_power_torus, student_t_partner_power_analytic,
    student_t_power_analytic,
)
from .errors import DivergenceError, DomainError, NumericalError
from .regions import (
    BoundCase, IndexPair, Region, bound_general, classify, conjugate_index,
    maassen_bound,
)
from .states import (
    DiscreteState, ExponentialLaplace, Gaussian, Rescaled, SampledGrid,
    StudentR, StudentT, StudentTPartner, UniformBall, Wavefunction, rescale,
)
from .transforms import dft, series_transform

__all__ = [
    "ProductReport", "SweepPoint", "SweepResult", "counterexample",
    "default_grid", "format_float", "gaussian_product_analytic",
    "pair_computable", "sample_pairs_in_d", "scale_invariance_check",
    "sweep", "uncertainty_product", "verify_region",
]

# relative slack of bound comparisons, per computation path
ANALYTIC_SLACK = 1e-9
QUADRATURE_SLACK = 1e-6
_EXACT_METHODS = ("analytic", "discrete-sum")

_CC = "continuous_continuous"
_DD = "discrete_discrete"
_DC = "discrete_continuous"


def format_float(x: float) -> str:
    """Fixed 9-significant-digit, locale-independent formatting used by all
    emitted tables."""
    return "%.9g" % x


def _workers(workers: int | None) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("ENTROPOWER_THREADS", "")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProductReport:
    """One uncertainty product N_alpha(state) * N_beta(conjugate) compared
    against the applicable constant bound."""

    pair: IndexPair
    n_alpha: EntropyPower
    n_beta: EntropyPower
    product: float
    bound: float | None
    satisfied: str          # holds | violated | no-bound
    margin: float | None    # product - bound when a bound exists
    tolerance: float        # absolute slack used in the comparison
    region: str
    setting: str


def _slack_for(n_alpha: EntropyPower, n_beta: EntropyPower,
               tol: float | None) -> float:
    if tol is not None:
        return tol
    if n_alpha.method in _EXACT_METHODS and n_beta.method in _EXACT_METHODS:
        return ANALYTIC_SLACK
    return QUADRATURE_SLACK


def _assemble(pair: IndexPair, n_alpha: EntropyPower, n_beta: EntropyPower,
              bound: float | None, setting: str,
              tol: float | None) -> ProductReport:
    for side, power in (("alpha", n_alpha), ("beta", n_beta)):
        if power.is_divergent:
            raise DivergenceError(
                power.caveat or f"N_{side} diverges at {pair}", power.value)
    product = n_alpha.value * n_beta.value
    slack = _slack_for(n_alpha, n_beta, tol)
    if bound is None:
        satisfied, margin, tolerance = "no-bound", None, slack
    else:
        margin = product - bound
        tolerance = bound * slack
        satisfied = "holds" if margin >= -tolerance else "violated"
    return ProductReport(pair, n_alpha, n_beta, product, bound, satisfied,
                         margin, tolerance, classify(pair).value, setting)


def uncertainty_product(state, pair: IndexPair,
                        setting: BoundCase = BoundCase(_CC), *,
                        convention: str = "density",
                        tol: float | None = None) -> ProductReport:
    """N_alpha of the state times N_beta of its Fourier conjugate, with the
    applicable bound attached.

    Continuous-continuous pairs use the closed forms (or the spectral route)
    via :func:`entropower.entropy.partner_power`; discrete-discrete pairs use
    the unitary DFT; discrete-continuous pairs use the series conjugate on
    the torus.  Divergent factors raise :class:`DivergenceError` carrying the
    violated existence condition.
    """
    if setting.setting == _CC:
        if isinstance(state, DiscreteState):
            raise DomainError("continuous_continuous requires a continuous "
                              "state; use discrete_discrete or "
                              "discrete_continuous")
        n_alpha = renyi_power_continuous(state, pair.alpha, convention)
        n_beta = partner_power(state, pair.beta, convention)
        bound = bound_general(pair)
        return _assemble(pair, n_alpha, n_beta, bound, setting.setting, tol)
    if not isinstance(state, DiscreteState):
        raise DomainError(f"{setting.setting} requires a DiscreteState")
    if setting.setting == _DD:
        if setting.n != state.n:
            raise DomainError(
                f"setting.n = {setting.n} does not match the state size "
                f"{state.n}")
        n_alpha = renyi_power_discrete(state, pair.alpha)
        n_beta = renyi_power_discrete(dft(state), pair.beta)
        return _assemble(pair, n_alpha, n_beta, maassen_bound(state.n),
                         setting.setting, tol)
    # discrete-continuous: the conjugate is the series transform on the torus
    n_alpha = renyi_power_discrete(state, pair.alpha)
    n_beta = renyi_power_torus(series_transform(state), pair.beta)
    bound = None if classify(pair) is Region.D0 else 2.0 * math.pi
    return _assemble(pair, n_alpha, n_beta, bound, setting.setting, tol)


def gaussian_product_analytic(pair: IndexPair) -> float:
    """pi * alpha^{1/(2(alpha-1))} * beta^{1/(2(beta-1))}, the Gaussian
    product at any covariance (the product is scale invariant)."""

    def factor(x: float) -> float:
        if x <= 0.0:
            raise DomainError("indices must be positive")
        if math.isinf(x):
            return 1.0
        if abs(x - 1.0) < 1e-6:
            return math.sqrt(math.e)
        return math.exp(math.log(x) / (2.0 * (x - 1.0)))

    return math.pi * factor(pair.alpha) * factor(pair.beta)


# ---------------------------------------------------------------------------
# existence pre-filter and pair sampling
# ---------------------------------------------------------------------------


def _index_ok(state: Wavefunction, lam: float, conjugate: bool) -> bool:
    if isinstance(state, Rescaled):
        return _index_ok(state.base, lam, conjugate)
    if isinstance(state, SampledGrid):
        return lam >= 0.0
    if isinstance(state, Gaussian):
        return lam > 0.0
    if isinstance(state, ExponentialLaplace):
        # conjugate is the nu=3 power-law state in d=1
        return lam > 0.25 if conjugate else lam > 0.0
    if isinstance(state, (StudentT, StudentTPartner)):
        d, nu = state.d, state.nu
        heavy = lam > d / (d + nu)          # the power-law side
        if nu >= d:
            bessel = lam > 0.0              # the Bessel side
        else:
            bessel = 0.0 < lam < d / (d - nu)
        if isinstance(state, StudentTPartner):
            heavy, bessel = bessel, heavy
        return bessel if conjugate else heavy
    if isinstance(state, (StudentR, UniformBall)):
        if not conjugate:
            return lam >= 0.0               # compact support: always finite
        m = (state.nu - state.d) / 2.0 if isinstance(state, StudentR) else 0.0
        return lam * (m + 2.0) - 1.0 >= _TAIL_MARGIN
    return False


def pair_computable(state: Wavefunction, pair: IndexPair) -> bool:
    """Cheap analytic check that both factors of the continuous-continuous
    uncertainty product exist and are reachable by the implemented routes."""
    return (_index_ok(state, pair.alpha, conjugate=False)
            and _index_ok(state, pair.beta, conjugate=True))


def sample_pairs_in_d(n: int = 100, on_c: int = 20, in_s: int = 20,
                      seed: int = 0) -> list[IndexPair]:
    """Deterministic sample of index pairs in the bounded region: ``on_c``
    pairs exactly on the conjugacy curve, ``in_s`` in the open lower-left
    square, the rest strictly elsewhere in the bounded region."""
    if on_c + in_s > n:
        raise DomainError("on_c + in_s must not exceed n")
    rng = np.random.default_rng(seed)
    pairs: list[IndexPair] = []
    for _ in range(on_c):
        a = float(rng.uniform(0.52, 6.0))
        pairs.append(IndexPair(a, conjugate_index(a)))
    for _ in range(in_s):
        pairs.append(IndexPair(float(rng.uniform(0.06, 0.44)),
                               float(rng.uniform(0.06, 0.44))))
    while len(pairs) < n:
        a = float(rng.uniform(0.05, 4.0))
        b = float(rng.uniform(0.05, 4.0))
        pair = IndexPair(a, b)
        gap = 1.0 / a + 1.0 / b - 2.0
        if classify(pair) is Region.D_MINUS and abs(gap) > 1e-6:
            pairs.append(pair)
    return pairs


# ---------------------------------------------------------------------------
# grid verification
# ---------------------------------------------------------------------------


def verify_region(family_set, pair_grid,
                  setting: BoundCase = BoundCase(_CC),
                  tol: float | None = None,
                  workers: int | None = None) -> list[ProductReport]:
    """Uncertainty products for every (state, pair) combination, in
    deterministic state-major order.

    The caller is expected to pre-filter pairs per family (see
    :func:`pair_computable`); any per-point failure is aggregated into a
    single :class:`NumericalError` rather than silently skipped.
    """
    tasks = [(state, pair) for state in family_set for pair in pair_grid]

    def run(task):
        state, pair = task
        return uncertainty_product(state, pair, setting, tol=tol)

    results: list[ProductReport | None] = [None] * len(tasks)
    failures: list[str] = []
    count = _workers(workers)
    if count > 1:
        with ThreadPoolExecutor(max_workers=count) as pool:
            outcomes = list(pool.map(lambda t: _guard(run, t), tasks))
    else:
        outcomes = [_guard(run, t) for t in tasks]
    for i, outcome in enumerate(outcomes):
        if isinstance(outcome, ProductReport):
            results[i] = outcome
        else:
            state, pair = tasks[i]
            failures.append(
                f"{type(state).__name__} at ({pair.alpha:.6g}, "
                f"{pair.beta:.6g}): {outcome}")
    if failures:
        summary = "; ".join(failures[:5])
        raise NumericalError(
            f"{len(failures)} of {len(tasks)} points failed: {summary}")
    return [r for r in results if r is not None]


def _guard(fn, task):
    try:
        return fn(task)
    except (DomainError, NumericalError) as err:
        return err


# ---------------------------------------------------------------------------
# counterexample search
# ---------------------------------------------------------------------------


def counterexample(pair: IndexPair, epsilon: float,
                   d: int = 1) -> tuple[float, ProductReport]:
    """Find a degrees-of-freedom value whose power-law state drives the
    uncertainty product below ``epsilon``.

    Only meaningful in the unbounded region: the product tends to zero as
    nu approaches the limit point nu* = d(beta-1)/beta (beta > 1) or 0
    (beta <= 1).  A geometric scan brackets the threshold and bisection on
    ln(nu - nu*) refines it, with a 60-iteration cap.
    """
    region = classify(pair)
    if region is not Region.D0:
        raise DomainError(
            f"pair ({pair.alpha:.6g}, {pair.beta:.6g}) is in {region.value}, "
            "not D0: the product is bounded below, no counterexample exists")
    if not epsilon > 0.0:
        raise DomainError("epsilon must be > 0")
    nu_star = d * (pair.beta - 1.0) / pair.beta if pair.beta > 1.0 else 0.0

    def product_at(t: float) -> float:
        nu = nu_star + t
        n_a = student_t_power_analytic(d, nu, pair.alpha)
        n_b = student_t_partner_power_analytic(d, nu, pair.beta)
        return n_a.value * n_b.value

    t_hi = max(1.0, float(d))
    best_t, best_value = t_hi, math.inf
    t_lo = None
    t = t_hi
    for _ in range(60):
        try:
            value = product_at(t)
        except (DivergenceError, NumericalError):
            break
        if value < best_value:
            best_t, best_value = t, value
        if value < epsilon:
            t_lo = t
            break
        t /= 2.0
    if t_lo is None:
        raise NumericalError(
            f"product did not reach {epsilon:.3g} within the iteration "
            f"budget; best nu = {nu_star + best_t:.9g} with product "
            f"{best_value:.9g}")
    # refine toward the largest nu still under epsilon
    hi = t_lo * 2.0
    lo = t_lo
    for _ in range(60):
        if hi / lo < 1.0 + 1e-3:
            break
        mid = math.exp(0.5 * (math.log(lo) + math.log(hi)))
        try:
            value = product_at(mid)
        except (DivergenceError, NumericalError):
            break
        if value < epsilon:
            lo = mid
        else:
            hi = mid
    nu = nu_star + lo
    report = uncertainty_product(StudentT(d, nu), pair)
    return nu, report


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepPoint:
    """One sweep row; value fields are None on gap rows, with the reason in
    ``note``."""

    param: float
    n_alpha: float | None
    n_beta: float | None
    product: float | None
    bound: float | None
    region: str
    note: str | None = None


@dataclass(frozen=True)
class SweepResult:
    """Tabulated sweep with a fixed CSV schema and a JSON metadata sidecar."""

    parameter: str
    grid: tuple[float, ...]
    points: tuple[SweepPoint, ...]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.points) != len(self.grid):
            raise DomainError("record count must equal grid length")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise DomainError("sweep grid must be strictly increasing")

    def csv_text(self) -> str:
        lines = ["param,N_alpha,N_beta,product,bound,region"]
        for p in self.points:
            cells = [format_float(p.param)]
            for v in (p.n_alpha, p.n_beta, p.product, p.bound):
                cells.append("" if v is None else format_float(v))
            cells.append(p.region)
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> tuple[str, str]:
        """Write the CSV and its metadata sidecar; returns both paths."""
        path = str(path)
        base, _ = os.path.splitext(path)
        sidecar = base + ".meta.json"
        with open(path, "w") as fh:
            fh.write(self.csv_text())
        with open(sidecar, "w") as fh:
            json.dump(self.metadata, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path, sidecar


_SWEEP_KINDS = ("lambda", "alpha_diagonal", "nu")


def default_grid(kind: str, pair: IndexPair | None = None,
                 d: int = 1) -> tuple[float, ...]:
    """Default sweep grids: the index sweeps cover (0, 5] and (0, 3]; the
    degrees-of-freedom sweep runs from just above the existence boundary of
    the requested pair to 10, geometrically spaced."""
    if kind == "lambda":
        return tuple(np.round(np.arange(0.05, 5.0 + 1e-12, 0.05), 10))
    if kind == "alpha_diagonal":
        return tuple(np.round(np.arange(0.03, 3.0 + 1e-12, 0.03), 10))
    if kind == "nu":
        if pair is None:
            raise DomainError("nu sweep needs the index pair")
        nu_star = d * (pair.beta - 1.0) / pair.beta if pair.beta > 1.0 else 0.0
        offsets = np.geomspace(1e-3, 10.0 - nu_star, 80)
        return tuple(float(nu_star + t) for t in offsets)
    raise DomainError(f"kind must be one of {_SWEEP_KINDS}")


def _product_row(state: Wavefunction, param: float, pair: IndexPair,
                 convention: str) -> SweepPoint:
    """One sweep row; each factor that cannot be computed is left empty with
    the reason noted, so a divergent conjugate does not blank the state's
    own column."""
    region = classify(pair).value
    bound = bound_general(pair)
    notes: list[str] = []

    def attempt(compute) -> float | None:
        try:
            power = compute()
        except (DomainError, NumericalError) as err:
            notes.append(str(err))
            return None
        if power.is_divergent:
            notes.append(power.caveat or "divergent factor")
            return None
        return power.value

    n_a = attempt(lambda: renyi_power_continuous(state, pair.alpha, convention))
    n_b = attempt(lambda: partner_power(state, pair.beta, convention))
    product = n_a * n_b if n_a is not None and n_b is not None else None
    return SweepPoint(param, n_a, n_b, product, bound, region,
                      "; ".join(notes) if notes else None)


def sweep(kind: str, *, state: Wavefunction | None = None,
          pair: IndexPair | None = None, d: int = 1,
          grid=None, convention: str = "density",
          workers: int | None = None) -> SweepResult:
    """Parameter sweep producing one row per grid point.

    ``lambda`` and ``alpha_diagonal`` sweep the index along the diagonal for
    a fixed state (the first tabulates the state's own power profile, the
    second reproduces the diagonal product); ``nu`` sweeps the power-law
    family's degrees of freedom at a fixed index pair.  Points whose factors
    diverge or fail are emitted as gap rows.
    """
    if kind not in _SWEEP_KINDS:
        raise DomainError(f"kind must be one of {_SWEEP_KINDS}")
    if grid is None:
        grid = default_grid(kind, pair=pair, d=d)
    grid = tuple(float(g) for g in grid)

    if kind in ("lambda", "alpha_diagonal"):
        if state is None:
            raise DomainError(f"{kind} sweep needs a state")
        tasks = [(state, g, IndexPair(g, g)) for g in grid]
        parameter = "lambda" if kind == "lambda" else "alpha"
        meta_family = type(state).__name__
        meta = {"kind": kind, "family": meta_family, "d": state.d}
    else:
        if pair is None:
            raise DomainError("nu sweep needs the index pair")
        tasks = [(StudentT(d, g), g, pair) for g in grid]
        parameter = "nu"
        meta = {"kind": kind, "family": "StudentT", "d": d,
                "pair": [pair.alpha, pair.beta]}
    meta.update({
        "convention": convention,
        "tolerances": {"analytic": ANALYTIC_SLACK,
                       "quadrature": QUADRATURE_SLACK},
        "seed": None,
    })

    def run(task):
        st, g, pr = task
        return _product_row(st, g, pr, convention)

    count = _workers(workers)
    if count > 1:
        with ThreadPoolExecutor(max_workers=count) as pool:
            points = tuple(pool.map(run, tasks))
    else:
        points = tuple(run(t) for t in tasks)
    return SweepResult(parameter, grid, points, meta)


# ---------------------------------------------------------------------------
# scale invariance
# ---------------------------------------------------------------------------


def scale_invariance_check(state: Wavefunction, pair: IndexPair,
                           m) -> float:
    """Relative deviation of the uncertainty product under x -> M x; the
    product is scale invariant, so this measures numerical drift only."""
    original = uncertainty_product(state, pair).product
    scaled = uncertainty_product(rescale(state, m), pair).product
    return abs(scaled - original) / original
