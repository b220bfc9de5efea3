"""Both sides of the local and fractional Hardy inequalities, verification and sharpness sweeps.

Test functions are separated, u(x) = f(|x|) h(phi), so in polar coordinates
every integral splits into an angular and a radial factor (or, for the
gradient with p != 2, a tensor-product rule over (r, phi)).
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from config.settings import (
    RADIAL_NODES, SLACK_TOL, SWEEP_NOISE, SWEEP_STEPS, SWEEP_TARGET_FRACTIONAL, SWEEP_TARGET_LOCAL,
)
from core.errors import ConfigError, HardyLabError, NonnegRequired, QRequired, RegimeViolation
from core.fractional import angular_mass, angular_norm, frac_lhs_radial, lambda_constant, \
    seminorm_radial
from core.profiles import TEST_CATALOG, One, RadialProfile, TestFunction, sweep_profile
from core.quadrature import composite_gauss, radial_edges
from core.regimes import (
    CaseId, FracRegime, Regime, admissible_q, ckn_sharp_constant, classify_case13,
    frac_constant, frac_q, hoelder_exponent, sphere_sobolev_exponent, thm11_constant,
    thm11_q, thm13_beta, thm13_constant, thm31_constant, thm31_q,
)
from core.sphere import (
    DEFAULT_QUADRATURE, WEIGHT_CATALOG, SphereQuadrature, SphericalWeight, integrate_angle,
    lq_norm, require_nonneg, surface_measure,
)

logger = logging.getLogger(__name__)

LOCAL_THEOREMS = ('ckn', 'thm11', 'thm12', 'thm13', 'thm31', 'hardy1d')
FRACTIONAL_THEOREMS = ('thm14',)
SWEEP_THEOREMS = ('ckn', 'thm11', 'thm13', 'thm31', 'thm14', 'hardy1d')

# Largest log-radius spanned by a sweep profile before r^N overflows
SWEEP_LOG_SPAN = 600.0
MAX_SWEEP_SPAN = 300.0

ONE = SphericalWeight.constant(1.0)


@dataclass(frozen=True)
class QuotientReport:
    """One evaluated inequality: its two sides, the asserted bound and the slack."""

    theorem: str
    case: str
    weight: str
    test: str
    N: int
    p: float
    alpha: Optional[float]
    s: Optional[float]
    q: Optional[float]
    lhs: float
    rhs: float
    bound: float
    quotient: float
    margin: float
    holds: bool
    extra: Optional[float] = None
    scheme: str = ''
    est_error: Optional[float] = None
    flags: Tuple[str, ...] = ()
    metadata: Dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for name in ('lhs', 'rhs', 'bound', 'quotient', 'margin'):
            if not math.isfinite(getattr(self, name)):
                raise RegimeViolation(f"{name} is not finite ({getattr(self, name)})",
                                      f"verify_case[{self.theorem}]")

    @property
    def ratio(self) -> float:
        """quotient / bound, the fraction of the constant reached."""
        return self.quotient / self.bound if self.bound else math.nan

    def with_case(self, case: str) -> 'QuotientReport':
        return replace(self, case=case)


@dataclass(frozen=True)
class SweepResult:
    reports: List[QuotientReport]
    final_gap: float
    monotone: bool
    target: float

    @property
    def final_ratio(self) -> float:
        return self.reports[-1].ratio

    @property
    def reached(self) -> bool:
        return self.final_ratio >= self.target


# Integrals

def _angular_integral(func, N: int, quad: SphereQuadrature, breakpoints: Iterable[float],
                      operation: str) -> float:
    if N == 1:
        return float(func(np.array(0.0)) + func(np.array(math.pi)))
    return integrate_angle(func, N, quad, tuple(breakpoints), operation)


def lhs_weighted(u: TestFunction, g: SphericalWeight, regime: Regime,
                 quad: SphereQuadrature = DEFAULT_QUADRATURE) -> float:
    """int g(x/|x|) |u|^p / |x|^{p+alpha} dx."""
    N, p = regime.N, regime.p
    h = u.angular
    if h.is_constant:
        angular = abs(float(h.value(0.0))) ** p * angular_mass(g, N, quad)
    else:
        angular = _angular_integral(lambda phi: g(phi) * np.abs(h.value(phi)) ** p, N, quad,
                                    (*g.breakpoints(), *h.breakpoints()), 'lhs_weighted')
    if angular == 0:
        return 0.0
    return angular * u.radial.moment(N - p - regime.alpha, p)


def _angular_rule(u: TestFunction, quad: SphereQuadrature) -> Tuple[np.ndarray, np.ndarray]:
    edges = np.unique(np.concatenate((np.linspace(0.0, math.pi, 9), u.angular.breakpoints())))
    return composite_gauss(edges, quad.angular_nodes)


def gradient_energy(u: TestFunction, regime: Regime,
                    quad: SphereQuadrature = DEFAULT_QUADRATURE) -> float:
    """int |grad u|^p / |x|^alpha dx with |grad u|^2 = f'^2 h^2 + f^2 h'^2 / r^2."""
    N, p, alpha = regime.N, regime.p, regime.alpha
    f, h = u.radial, u.angular
    if not math.isfinite(f.lipschitz()):
        raise RegimeViolation(f"profile {f.describe()} has an unbounded derivative",
                              'gradient_energy')

    if h.is_constant or N == 1:
        weight = _angular_integral(lambda phi: np.abs(h.value(phi)) ** p, N, quad,
                                   h.breakpoints(), 'gradient_energy')
        if weight == 0:
            return 0.0
        return weight * f.moment(N - alpha, p, derivative=True)

    if p == 2:
        radial_part = _angular_integral(lambda phi: h.value(phi) ** 2, N, quad,
                                        h.breakpoints(), 'gradient_energy')
        tangential = _angular_integral(lambda phi: h.derivative(phi) ** 2, N, quad,
                                       h.breakpoints(), 'gradient_energy')
        energy = radial_part * f.moment(N - alpha, 2.0, derivative=True)
        if tangential > 0:
            energy += tangential * f.moment(N - alpha - 2.0, 2.0)
        return energy

    # Tensor-product rule; the angular term behaves like r^{N-alpha-p-1} at 0
    edges = radial_edges(f.breakpoints(), N - alpha - p)
    r, wr = composite_gauss(edges, RADIAL_NODES)
    phi, wp = _angular_rule(u, quad)
    fr, dfr = f.value(r)[:, None], f.derivative(r)[:, None]
    hp, dhp = h.value(phi)[None, :], h.derivative(phi)[None, :]
    density = (dfr ** 2 * hp ** 2 + fr ** 2 * dhp ** 2 / r[:, None] ** 2) ** (0.5 * p)
    density *= r[:, None] ** (N - alpha - 1.0) * np.sin(phi)[None, :] ** (N - 2)
    return surface_measure(N - 1) * float(wr @ density @ wp)


def _hardy_1d_sides(f: RadialProfile, p: float, beta: float) -> Tuple[float, float, float]:
    if not beta > p - 1:
        raise RegimeViolation(f"beta > p - 1 violated (beta = {beta:g}, p = {p:g})",
                              'radial_hardy_1d')
    constant = (p / (beta - p + 1.0)) ** p
    return f.moment(beta - p + 1.0, p), f.moment(beta + 1.0, p, derivative=True), constant


def radial_hardy_1d(f: RadialProfile, p: float, beta: float) -> Tuple[float, float]:
    """(int |f|^p r^{beta-p} dr, (p/(beta-p+1))^p int |f'|^p r^beta dr)."""
    lhs, energy, constant = _hardy_1d_sides(f, p, beta)
    return lhs, constant * energy


# Verification

def _quotient(lhs: float, rhs: float, operation: str) -> float:
    if rhs > 0:
        return lhs / rhs
    if lhs == 0:
        return 0.0
    raise RegimeViolation(f"right side vanishes while the left side is {lhs:g}", operation)


def _finish(theorem: str, case: str, g: SphericalWeight, u: TestFunction, N: int, p: float,
            alpha: Optional[float], s: Optional[float], q: Optional[float], lhs: float,
            rhs: float, bound: float, quotient: float, fail_scale: float,
            **extras) -> QuotientReport:
    bound = bound * fail_scale
    margin = bound - quotient
    holds = margin >= -SLACK_TOL * abs(bound)
    if not holds:
        logger.warning("%s %s fails for %s, %s: quotient %.12g > bound %.12g",
                       theorem, case, g.describe(), u.describe(), quotient, bound)
    return QuotientReport(theorem, case, g.describe(), u.describe(), N, p, alpha, s, q,
                          lhs, rhs, bound, quotient, margin, holds, **extras)


def _local_sides(u: TestFunction, g: SphericalWeight, regime: Regime,
                 quad: SphereQuadrature) -> Tuple[float, float]:
    return lhs_weighted(u, g, regime, quad), gradient_energy(u, regime, quad)


def _thm12_metadata(N: int, p: float, q: float) -> Dict:
    try:
        sobolev = sphere_sobolev_exponent(N, p)
    except QRequired:
        sobolev = None
    return {'sphere_sobolev_exponent': sobolev, 'hoelder_exponent': hoelder_exponent(N, p, q)}


def _case13_metadata(case) -> Dict:
    data = case.describe()
    try:
        thm13_beta(case)
        data['beta_check'] = 'mu(beta) = beta'
    except HardyLabError as e:
        data['beta_check'] = e.kind
    return data


def empirical_thm12_constant(N: int, p: float, alpha: float, q: Optional[float] = None,
                             tests: Optional[Iterable[TestFunction]] = None,
                             weights: Optional[Iterable[SphericalWeight]] = None,
                             quad: SphereQuadrature = DEFAULT_QUADRATURE) -> float:
    """Largest quotient / ||g||_q over the given tests and nonnegative weights."""
    regime = Regime(N, p, alpha)
    regime.require_sphere('empirical_thm12_constant')
    q = admissible_q(N, p, q)
    tests = list(TEST_CATALOG.values()) if tests is None else list(tests)
    weights = list(WEIGHT_CATALOG.values()) if weights is None else list(weights)
    best = 0.0
    for g in weights:
        if not g.nonneg:
            continue
        norm = lq_norm(g, q, N, quad)
        if norm == 0:
            continue
        for u in tests:
            lhs, rhs = _local_sides(u, g, regime, quad)
            best = max(best, _quotient(lhs, rhs, 'empirical_thm12_constant') / norm)
    logger.debug("empirical constant (N=%s, p=%g, alpha=%g, q=%g): %.12g", N, p, alpha, q, best)
    return best


def verify_case(theorem: str, u: TestFunction, g: SphericalWeight, N: int, p: float,
                alpha: float = 0.0, s: Optional[float] = None, q: Optional[float] = None,
                case: Optional[str] = None, quad: SphereQuadrature = DEFAULT_QUADRATURE,
                empirical: Optional[float] = None, scheme: str = 'gauss-graded',
                fail_scale: float = 1.0) -> QuotientReport:
    """Evaluate one inequality on one test function and weight.

    ``theorem`` is one of ckn, thm11, thm12, thm13, thm31, thm14, hardy1d;
    ``case`` picks the p = 2 case for thm13 (default: the primary case).
    ``fail_scale`` multiplies the asserted bound.
    """
    if theorem in FRACTIONAL_THEOREMS:
        return _verify_fractional(u, g, N, s, p, quad, scheme, fail_scale)
    if theorem not in LOCAL_THEOREMS:
        raise ConfigError(f"unknown theorem: {theorem}", 'verify_case')

    operation = f"verify_case[{theorem}]"
    regime = Regime(N, p, alpha)

    if theorem == 'ckn':
        lhs, rhs = _local_sides(u, ONE, regime, quad)
        bound = ckn_sharp_constant(regime)
        return _finish(theorem, '', ONE, u, N, p, alpha, None, None, lhs, rhs, bound,
                       _quotient(lhs, rhs, operation), fail_scale)

    if theorem == 'hardy1d':
        if not u.angular.is_constant:
            raise RegimeViolation("the one-dimensional lemma needs a radial test function",
                                  operation)
        lhs, energy, bound = _hardy_1d_sides(u.radial, p, regime.beta)
        return _finish(theorem, '', ONE, u, N, p, alpha, None, None, lhs, energy, bound,
                       _quotient(lhs, energy, operation), fail_scale,
                       metadata={'beta': regime.beta})

    regime.require_sphere(operation)
    require_nonneg(g, operation)
    lhs, rhs = _local_sides(u, g, regime, quad)
    quotient = _quotient(lhs, rhs, operation)

    if theorem == 'thm11':
        if alpha != 0 or p != 2:
            raise RegimeViolation(f"alpha = 0 and p = 2 required (alpha = {alpha:g}, "
                                  f"p = {p:g})", operation)
        q = thm11_q(N)
        bound = thm11_constant(N, lq_norm(g, q, N, quad))
        return _finish(theorem, '', g, u, N, p, alpha, None, q, lhs, rhs, bound, quotient,
                       fail_scale)

    if theorem == 'thm12':
        q = admissible_q(N, p, q)
        if empirical is None:
            empirical = empirical_thm12_constant(N, p, alpha, q, quad=quad)
        bound = empirical * lq_norm(g, q, N, quad)
        return _finish(theorem, '', g, u, N, p, alpha, None, q, lhs, rhs, bound, quotient,
                       fail_scale, flags=('empirical',), metadata=_thm12_metadata(N, p, q))

    if theorem == 'thm31':
        regime.require_positive_degree(operation)
        q = thm31_q(regime)
        bound = thm31_constant(regime, lq_norm(g, q, N, quad))
        flags = ('reduction-to-classical',) if g == ONE else ()
        return _finish(theorem, '', g, u, N, p, alpha, None, q, lhs, rhs, bound, quotient,
                       fail_scale, flags=flags)

    # thm13
    if p != 2:
        raise RegimeViolation(f"p = 2 required (got p = {p:g})", operation)
    chosen = classify_case13(N, alpha, CaseId(case) if case else None)
    q = chosen.q
    g_norm = lq_norm(g, q, N, quad)
    constant = thm13_constant(N, alpha, g_norm, q)
    metadata = _case13_metadata(chosen)

    if chosen.case_id is not CaseId.CASE2:
        return _finish(theorem, chosen.case_id.value, g, u, N, p, alpha, None, q, lhs, rhs,
                       constant, quotient, fail_scale, metadata=metadata)

    # lhs <= gamma0 C rhs - (gamma0 - 1) ||g||_q / |S|^{1/q} int |u|^2 / |x|^{2+alpha}
    g0 = chosen.gamma0
    extra = lhs_weighted(u, ONE, regime, quad)
    coefficient = (g0 - 1.0) * g_norm / surface_measure(N) ** (1.0 / q)
    combined = _quotient(lhs + coefficient * extra, rhs, operation)
    flags = () if g0 > 1 else ('gamma0<=1',)
    return _finish(theorem, chosen.case_id.value, g, u, N, p, alpha, None, q, lhs, rhs,
                   g0 * constant, combined, fail_scale, extra=extra, flags=flags,
                   metadata=metadata)


def _verify_fractional(u: TestFunction, g: SphericalWeight, N: int, s: Optional[float],
                       p: float, quad: SphereQuadrature, scheme: str,
                       fail_scale: float) -> QuotientReport:
    operation = 'verify_case[thm14]'
    if s is None:
        raise ConfigError("thm14 needs the order s", operation)
    frac = FracRegime(N, s, p)
    if not u.angular.is_constant:
        raise RegimeViolation("fractional checks need a radial test function", operation)
    if not g.nonneg:
        raise NonnegRequired(f"weight {g.describe()} must satisfy g >= 0", operation)

    f = u.radial.scaled(float(u.angular.value(0.0)))
    lam = lambda_constant(frac, scheme)
    q = frac_q(frac)
    bound = frac_constant(frac, angular_norm(g, q, N, quad), lam.value)
    lhs = frac_lhs_radial(f, g, frac, quad)
    seminorm = seminorm_radial(f, frac)
    quotient = _quotient(lhs, seminorm.value, operation)
    # Relative error of Lambda plus the band share of the seminorm
    est_error = lam.est_error / lam.value + (seminorm.band_bound / seminorm.value
                                             if seminorm.value else 0.0)
    flags = ('reduction-to-classical',) if g == ONE else ()
    return _finish('thm14', '', g, u, N, p, None, s, q, lhs, seminorm.value, bound, quotient,
                   fail_scale, scheme=lam.scheme_id, est_error=est_error, flags=flags,
                   metadata={'lambda': lam.value, 'cross_scheme': lam.cross_scheme,
                             'cross_value': lam.cross_value, 'band_delta': seminorm.delta})


# Sharpness

def sweep_span_cap(theorem: str, N: int, alpha: float = 0.0) -> float:
    """Largest log-radius L of a sweep profile for which r^{N+...} stays finite."""
    span = SWEEP_LOG_SPAN / (N + 1.0 if theorem in FRACTIONAL_THEOREMS else N - alpha)
    return min(span, MAX_SWEEP_SPAN)


def sweep_family(theorem: str, N: int, p: float, alpha: float = 0.0,
                 s: Optional[float] = None, steps: int = SWEEP_STEPS) -> List[TestFunction]:
    """Radial test functions approaching the formal optimizer r^{-kappa}."""
    if theorem in FRACTIONAL_THEOREMS:
        if s is None:
            raise ConfigError("fractional sweep needs the order s", 'sharpness_sweep')
        kappa = FracRegime(N, s, p).kappa
    else:
        kappa = Regime(N, p, alpha).kappa
    cap = sweep_span_cap(theorem, N, alpha)
    return [TestFunction(sweep_profile(kappa, k, p, cap), One(), f"step-{k}")
            for k in range(steps)]


def sharpness_sweep(theorem: str, g: SphericalWeight, N: int, p: float, alpha: float = 0.0,
                    s: Optional[float] = None, steps: int = SWEEP_STEPS,
                    case: Optional[str] = None, quad: SphereQuadrature = DEFAULT_QUADRATURE,
                    scheme: str = 'gauss-graded', fail_scale: float = 1.0) -> SweepResult:
    """Quotients along the sweep family, each reported in the ``step-<k>`` case column.

    The sequence should be non-decreasing up to SWEEP_NOISE relative and
    approach the bound from below; ``final_gap`` is 1 - quotient / bound at
    the last step.
    """
    if theorem not in SWEEP_THEOREMS:
        raise ConfigError(f"no sharpness sweep for {theorem} "
                          f"(choose from {', '.join(SWEEP_THEOREMS)})", 'sharpness_sweep')
    if steps < 1:
        raise ConfigError(f"steps must be >= 1 (got {steps})", 'sharpness_sweep')

    reports = []
    for u in sweep_family(theorem, N, p, alpha, s, steps):
        report = verify_case(theorem, u, g, N, p, alpha, s, None, case, quad,
                             scheme=scheme, fail_scale=fail_scale)
        reports.append(report.with_case(u.name))
        logger.debug("sweep %s %s: quotient %.12g (%.6f of bound)", theorem, u.name,
                     report.quotient, report.ratio)

    quotients = [r.quotient for r in reports]
    monotone = all(b >= a * (1.0 - SWEEP_NOISE) for a, b in zip(quotients, quotients[1:]))
    if not monotone:
        logger.warning("sweep %s: quotients not monotone within %g", theorem, SWEEP_NOISE)
    target = SWEEP_TARGET_FRACTIONAL if theorem in FRACTIONAL_THEOREMS else SWEEP_TARGET_LOCAL
    return SweepResult(reports, 1.0 - reports[-1].ratio, monotone, target)


def hardy_1d_sweep(p: float, beta: float, steps: int = SWEEP_STEPS) -> List[float]:
    """lhs / rhs_with_constant along the near-optimizer family for the 1-D lemma."""
    if not beta > p - 1:
        raise RegimeViolation(f"beta > p - 1 violated (beta = {beta:g}, p = {p:g})",
                              'hardy_1d_sweep')
    kappa = (beta - p + 1.0) / p
    cap = min(SWEEP_LOG_SPAN / (beta + 1.0), MAX_SWEEP_SPAN)
    ratios = []
    for k in range(steps):
        lhs, rhs = radial_hardy_1d(sweep_profile(kappa, k, p, cap), p, beta)
        ratios.append(lhs / rhs)
    return ratios
