"""Fractional kernel Psi_{N,s,p}, the sharp constant Lambda_{N,s,p} and radial Gagliardo seminorms.

Psi(r) is the zonal average of |r sigma - e|^{-(N+sp)} over sigma in S^{N-1}.
It blows up like (1 - r)^{-(1+sp)}, so every routine here works with the gap
eps = 1 - r passed in exactly rather than with r itself.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, List, Tuple

import numpy as np

from config.settings import LAMBDA_NODES, LAMBDA_TOL, PSI_NODES, RADIAL_NODES, SEMINORM_TOL
from core.errors import (
    ConfigError, KernelSingularity, QuadratureFailure, QuadratureInconsistent,
    RegimeViolation, SupportRequired,
)
from core.profiles import RadialProfile
from core.quadrature import (
    composite_gauss, gauss_legendre, graded_edges, grading_depth, radial_edges,
    split_geometric, tanh_sinh,
)
from core.regimes import FracRegime
from core.sphere import (
    DEFAULT_QUADRATURE, SphereQuadrature, SphericalWeight, integrate_zonal, lq_norm,
    require_nonneg, surface_measure,
)

logger = logging.getLogger(__name__)

SCHEMES = ('gauss-graded', 'tanh-sinh')

# Geometric ratio of the panels graded toward the kernel singularity
KERNEL_RATIO = 2.0

# Below this gap f(r) - f(r(1 - eps)) is formed from the derivative
DIFFERENCE_SWITCH = 1e-4

MAX_BAND_HALVINGS = 200

# Breakpoint tables longer than this skip the pairwise ratio breakpoints in tau
MAX_RATIO_BREAKPOINTS = 16


@dataclass(frozen=True)
class PsiEval:
    frac: FracRegime
    r: float
    value: float


@dataclass(frozen=True)
class LambdaResult:
    """Lambda = 1 / (2 * inverse_integral)."""

    frac: FracRegime
    value: float
    inverse_integral: float
    scheme_id: str
    est_error: float
    cross_value: float = math.nan
    cross_scheme: str = ''

    def describe(self) -> Dict:
        return {
            'N': self.frac.N, 's': self.frac.s, 'p': self.frac.p,
            'lambda': self.value, 'inverse_integral': self.inverse_integral,
            'scheme': self.scheme_id, 'est_error': self.est_error,
            'cross_scheme': self.cross_scheme, 'cross_value': self.cross_value,
        }


@dataclass(frozen=True)
class SeminormResult:
    value: float
    band_bound: float
    delta: float
    tau_nodes: int = field(default=0, compare=False)


# Psi

@lru_cache(maxsize=1 << 16)
def _psi_gap(N: int, sp: float, eps: float) -> float:
    """Psi_{N,s,p}(1 - eps) for 0 < eps <= 1."""
    if N == 1:
        return eps ** -(1.0 + sp) + (2.0 - eps) ** -(1.0 + sp)

    r = 1.0 - eps
    half = 0.5 * (N + sp)
    # Panels [0, eps], [eps, 2 eps], ... resolve the peak of width ~eps at theta = 0
    edges = [0.0]
    edge = eps
    while edge < math.pi:
        edges.append(edge)
        edge *= KERNEL_RATIO
    edges.append(math.pi)
    theta, weights = composite_gauss(np.asarray(edges), PSI_NODES)

    # eps^{1+sp} is factored out so that gaps down to ~1e-80 stay in range
    log_eps = math.log(eps)
    log_terms = (N - 2) * np.log(np.sin(theta)) \
        - half * np.log(eps * eps + 4.0 * r * np.sin(0.5 * theta) ** 2) \
        + (1.0 + sp) * log_eps
    scaled = float(np.dot(weights, np.exp(log_terms)))
    return surface_measure(N - 1) * scaled * math.exp(-(1.0 + sp) * log_eps)


def psi_gap(frac: FracRegime, eps: float) -> float:
    """Psi at r = 1 - eps, with the gap given exactly."""
    if not 0 < eps <= 1:
        raise KernelSingularity(f"gap 1 - r must lie in (0, 1] (got {eps:g})", 'psi')
    return _psi_gap(frac.N, frac.sp, float(eps))


def psi(frac: FracRegime, r: float) -> float:
    """Psi_{N,s,p}(r) for 0 <= r < 1."""
    if not math.isfinite(r) or r < 0:
        raise RegimeViolation(f"r must be finite and >= 0 (got {r})", 'psi')
    if r >= 1:
        raise KernelSingularity(f"Psi diverges as r -> 1 (got r = {r:g})", 'psi')
    return psi_gap(frac, 1.0 - r)


def psi_array(frac: FracRegime, radii: Iterable[float]) -> np.ndarray:
    """Psi at many ratios; repeated ratios hit the cache."""
    return np.array([psi(frac, float(r)) for r in radii])


def _psi_gaps(frac: FracRegime, gaps: np.ndarray) -> np.ndarray:
    return np.array([_psi_gap(frac.N, frac.sp, float(e)) for e in gaps])


def psi_table(frac: FracRegime, radii: Iterable[float] = (0.0, 0.5, 0.9, 0.99)) -> List[PsiEval]:
    return [PsiEval(frac, float(r), psi(frac, r)) for r in radii]


# Lambda

def _one_minus_power(kappa: float, eps: np.ndarray) -> np.ndarray:
    """1 - (1 - eps)^kappa without cancellation."""
    return -np.expm1(kappa * np.log1p(-eps))


def _left_integrand(frac: FracRegime, r: np.ndarray) -> np.ndarray:
    """r^{sp-1} (1 - r^kappa)^p Psi(r) on (0, 1/2]."""
    return r ** (frac.sp - 1.0) * (1.0 - r ** frac.kappa) ** frac.p * _psi_gaps(frac, 1.0 - r)


def _right_integrand(frac: FracRegime, eps: np.ndarray) -> np.ndarray:
    """The same integrand at r = 1 - eps, eps in (0, 1/2]."""
    return (1.0 - eps) ** (frac.sp - 1.0) * _one_minus_power(frac.kappa, eps) ** frac.p \
        * _psi_gaps(frac, eps)


def _graded_rule(exponent: float, length: float, nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss on [0, length] graded toward 0 for an x^{exponent-1} endpoint."""
    depth = grading_depth(exponent, ratio=KERNEL_RATIO)
    edges = graded_edges(0.0, length, depth, KERNEL_RATIO)
    return composite_gauss(edges, nodes)


def _inverse_integral_gauss(frac: FracRegime, nodes: int) -> float:
    r, wr = _graded_rule(frac.sp, 0.5, nodes)
    eps, we = _graded_rule(frac.p - frac.sp, 0.5, nodes)
    return float(np.dot(wr, _left_integrand(frac, r)) + np.dot(we, _right_integrand(frac, eps)))


def _inverse_integral_tanh_sinh(frac: FracRegime) -> Tuple[float, float]:
    left, err_left = tanh_sinh(lambda x, da, db: _left_integrand(frac, da), 0.0, 0.5,
                               operation='lambda_constant')
    right, err_right = tanh_sinh(lambda x, da, db: _right_integrand(frac, da), 0.0, 0.5,
                                 operation='lambda_constant')
    return left + right, err_left + err_right


@lru_cache(maxsize=256)
def _lambda_scheme(frac: FracRegime, scheme: str, nodes: int) -> Tuple[float, float]:
    """(inverse integral without the factor 2, error estimate)."""
    if scheme == 'gauss-graded':
        coarse = _inverse_integral_gauss(frac, nodes)
        fine = _inverse_integral_gauss(frac, 2 * nodes)
        return fine, abs(fine - coarse)
    if scheme == 'tanh-sinh':
        return _inverse_integral_tanh_sinh(frac)
    raise ConfigError(f"unknown quadrature scheme: {scheme}", 'lambda_constant')


def lambda_constant(frac: FracRegime, scheme: str = 'gauss-graded',
                    nodes: int = LAMBDA_NODES, tol: float = LAMBDA_TOL) -> LambdaResult:
    """Lambda_{N,s,p} with 1/Lambda = 2 int_0^1 r^{sp-1} |1 - r^{(N-sp)/p}|^p Psi(r) dr.

    Both schemes are always evaluated; the one not selected is reported as
    the cross value and the two must agree to ``tol`` relative.
    """
    if scheme not in SCHEMES:
        raise ConfigError(f"unknown quadrature scheme: {scheme} (choose from {SCHEMES})",
                          'lambda_constant')
    other = SCHEMES[1 - SCHEMES.index(scheme)]
    integral, err = _lambda_scheme(frac, scheme, nodes)
    cross_integral, cross_err = _lambda_scheme(frac, other, nodes)

    value = 1.0 / (2.0 * integral)
    cross_value = 1.0 / (2.0 * cross_integral)
    gap = abs(value - cross_value)
    if gap > tol * value:
        raise QuadratureInconsistent(
            f"{scheme} gives {value:.12g}, {other} gives {cross_value:.12g} "
            f"(rel. diff {gap / value:.3g} > {tol:g})", 'lambda_constant')

    # d(1/2I) = dI / (2 I^2)
    internal = max(err, cross_err) / (2.0 * integral ** 2)
    logger.debug("Lambda(N=%s, s=%g, p=%g) = %.15g [%s], cross %.15g [%s]",
                 frac.N, frac.s, frac.p, value, scheme, cross_value, other)
    return LambdaResult(frac, value, integral, scheme, max(gap, internal),
                        cross_value, other)


# Radial seminorm

def _tau_breakpoints(points: Tuple[float, ...], R: float) -> List[float]:
    """Ratios where the tau integrand has kinks: b/b' and b/R."""
    ratios = {b / R for b in points}
    if len(points) <= MAX_RATIO_BREAKPOINTS:
        ratios |= {b / c for b in points for c in points if b < c}
    return sorted(t for t in ratios if 0 < t < 1)


def _tau_rule(frac: FracRegime, points: Tuple[float, ...], R: float,
              delta: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nodes tau in (0, 1 - delta) with their exact gaps 1 - tau and weights.

    [0, 1/2] is graded toward 0; [1/2, 1 - delta] is built in the gap
    variable, graded geometrically toward the excluded diagonal band.
    """
    depth = grading_depth(min(frac.sp, frac.N), ratio=4.0)
    left_edges = graded_edges(0.0, 0.5, depth)
    floor = left_edges[1]
    kinks = _tau_breakpoints(points, R)

    left = [t for t in kinks if floor < t < 0.5]
    left_edges = split_geometric(np.concatenate((left_edges[1:], left)))
    left_edges = np.concatenate(([0.0], left_edges))
    tau_l, w_l = composite_gauss(left_edges, RADIAL_NODES)

    gap_edges = [delta]
    while gap_edges[-1] < 0.5:
        gap_edges.append(min(2.0 * gap_edges[-1], 0.5))
    gap_edges.extend(1.0 - t for t in kinks if 0.5 < t < 1.0 - delta)
    gap_edges = np.unique(gap_edges)
    eps_r, w_r = composite_gauss(gap_edges, RADIAL_NODES)

    tau = np.concatenate((tau_l, 1.0 - eps_r))
    gaps = np.concatenate((1.0 - tau_l, eps_r))
    return tau, gaps, np.concatenate((w_l, w_r))


def _difference(f: RadialProfile, r: np.ndarray, tau: float, gap: float) -> np.ndarray:
    """f(r) - f(r tau), through the derivative at the midpoint for tiny gaps."""
    if gap < DIFFERENCE_SWITCH:
        return f.derivative(r * (1.0 - 0.5 * gap)) * r * gap
    return f.value(r) - f.value(r * tau)


def _inner_difference_integral(f: RadialProfile, frac: FracRegime, points: Tuple[float, ...],
                               tau: float, gap: float) -> float:
    """int_0^R |f(r) - f(r tau)|^p r^{N-1-sp} dr."""
    R = f.support
    marks = set(points) | {b / tau for b in points if b / tau < R} | {R * tau}
    edges = radial_edges(marks, frac.N - frac.sp)
    r, w = composite_gauss(edges, RADIAL_NODES)
    integrand = np.abs(_difference(f, r, tau, gap)) ** frac.p * r ** (frac.N - 1.0 - frac.sp)
    return float(np.dot(w, integrand))


def _tail_integrals(f: RadialProfile, frac: FracRegime, points: Tuple[float, ...],
                    lower: np.ndarray) -> np.ndarray:
    """F(x) = int_x^R |f|^p sigma^{N-1-sp} d sigma at every x in ``lower``."""
    R = f.support
    edges = radial_edges(points, frac.N - frac.sp, end_exponent=frac.p + 1.0)
    x, w = gauss_legendre(RADIAL_NODES)

    def density(sigma):
        return np.abs(f.value(sigma)) ** frac.p * sigma ** (frac.N - 1.0 - frac.sp)

    half = 0.5 * np.diff(edges)
    nodes = edges[:-1, None] + half[:, None] * (x[None, :] + 1.0)
    panels = half * (density(nodes) @ w)
    suffix = np.concatenate((np.cumsum(panels[::-1])[::-1], [0.0]))

    lower = np.clip(lower, 0.0, R)
    index = np.clip(np.searchsorted(edges, lower, side='right') - 1, 0, panels.size - 1)
    top = edges[index + 1]
    part_half = 0.5 * (top - lower)
    part_nodes = lower[:, None] + part_half[:, None] * (x[None, :] + 1.0)
    partial = part_half * (density(part_nodes) @ w)
    return suffix[index + 1] + partial


def _band_moment(frac: FracRegime, power: float, delta: float) -> float:
    """int_0^delta eps^power Psi(1 - eps) d eps."""
    eps, w = _graded_rule(power - frac.sp, delta, RADIAL_NODES)
    return float(np.dot(w, eps ** power * _psi_gaps(frac, eps)))


def _window_slope(f: RadialProfile, r: np.ndarray, delta: float,
                  points: Tuple[float, ...]) -> np.ndarray:
    """sup |f'| over [r (1 - delta), r], taken at the window ends and at any kink inside.

    Exact for profiles whose |f'| is monotone between breakpoints.
    """
    low = r * (1.0 - delta)
    below = np.nextafter(r, 0.0)
    slope = np.maximum(np.abs(f.derivative(below)), np.abs(f.derivative(low)))
    for b in points:
        inside = (low < b) & (b < r)
        if np.any(inside):
            sides = np.maximum(np.abs(f.derivative(np.nextafter(b, 0.0))),
                               np.abs(f.derivative(np.nextafter(b, np.inf))))
            slope = np.where(inside, np.maximum(slope, sides), slope)
    return slope


def _band_bound(f: RadialProfile, frac: FracRegime, delta: float) -> float:
    """Bound on the excluded diagonal band tau in (1 - delta, 1).

    Uses |f(r) - f(r tau)| <= r (1 - tau) sup |f'| over the window
    [r (1 - delta), r], and |f(s)| <= (R - s) sup |f'| near the support end.
    """
    N, sp, p = frac.N, frac.sp, frac.p
    points = tuple(sorted(set(f.breakpoints())))
    R = f.support

    marks = set(points) | {b / (1.0 - delta) for b in points if b / (1.0 - delta) < R}
    edges = radial_edges(marks, N - sp + p)
    r, w = composite_gauss(edges, RADIAL_NODES)
    slopes = _window_slope(f, r, delta, points)
    radial = float(np.dot(w, slopes ** p * r ** (p + N - 1.0 - sp)))
    near = radial * _band_moment(frac, p, delta)

    end_slope = float(_window_slope(f, np.array([R]), delta, points)[0])
    shell = max(1.0, (1.0 - delta) ** (N - 1.0 - sp))
    outer = end_slope ** p * shell * R ** (N - sp + p) / (p + 1.0) \
        * (1.0 - delta) ** (sp - 1.0) * _band_moment(frac, p + 1.0, delta)
    return 2.0 * surface_measure(N) * (near + outer)


def _seminorm_without_band(f: RadialProfile, frac: FracRegime, delta: float) -> Tuple[float, int]:
    points = tuple(sorted(set(f.breakpoints())))
    R = f.support
    tau, gaps, weights = _tau_rule(frac, points, R, delta)
    kernel = _psi_gaps(frac, gaps)

    inner = np.array([_inner_difference_integral(f, frac, points, t, e)
                      for t, e in zip(tau, gaps)])
    tails = _tail_integrals(f, frac, points, R * tau)

    near = np.dot(weights, tau ** (frac.N - 1.0) * kernel * inner)
    outer = np.dot(weights, tau ** (frac.sp - 1.0) * kernel * tails)
    return 2.0 * surface_measure(frac.N) * float(near + outer), tau.size


def seminorm_radial(f: RadialProfile, frac: FracRegime, tol: float = SEMINORM_TOL) -> SeminormResult:
    """Gagliardo seminorm of u(x) = f(|x|) with the diagonal band bounded.

    With rho = r tau the double integral becomes

        2 |S^{N-1}| int_0^1 Psi(tau) [tau^{N-1} int_0^R |f(r) - f(r tau)|^p r^{N-1-sp} dr
                                     + tau^{sp-1} int_{R tau}^R |f|^p s^{N-1-sp} ds] dtau.

    The band tau > 1 - delta is left out; delta starts at 1/16 and is halved
    until the Lipschitz bound on the band drops below 0.1 * tol of the value.
    """
    if not (math.isfinite(f.support) and f.support > 0):
        raise SupportRequired("profile needs a finite support radius", 'frac_seminorm_radial')
    if f.lipschitz() == 0:
        return SeminormResult(0.0, 0.0, 0.0)

    delta = 1.0 / 16.0
    estimate, _ = _seminorm_without_band(f, frac, delta)
    if estimate == 0:
        return SeminormResult(0.0, 0.0, delta)

    bound = _band_bound(f, frac, delta)
    halvings = 0
    while bound > 0.1 * tol * estimate:
        if halvings >= MAX_BAND_HALVINGS:
            raise QuadratureFailure(
                f"diagonal band bound {bound:.3g} still above {0.1 * tol * estimate:.3g} "
                f"after {halvings} halvings", 'frac_seminorm_radial')
        delta *= 0.5
        halvings += 1
        bound = _band_bound(f, frac, delta)

    value, count = _seminorm_without_band(f, frac, delta)
    logger.debug("seminorm %s: %.12g (delta=%.3g, band<=%.3g, %d tau nodes)",
                 f.describe(), value, delta, bound, count)
    return SeminormResult(value, bound, delta, count)


def frac_seminorm_radial(f: RadialProfile, frac: FracRegime, tol: float = SEMINORM_TOL) -> float:
    """int int |u(x) - u(y)|^p / |x - y|^{N+sp} dx dy for u(x) = f(|x|)."""
    return seminorm_radial(f, frac, tol).value


def angular_mass(g: SphericalWeight, N: int, quad: SphereQuadrature = DEFAULT_QUADRATURE) -> float:
    """int_{S^{N-1}} g; for N = 1 the sphere is the two points phi = 0, pi."""
    if N == 1:
        return float(g(0.0) + g(math.pi))
    return integrate_zonal(g, N, quad)


def angular_norm(g: SphericalWeight, q: float, N: int,
                 quad: SphereQuadrature = DEFAULT_QUADRATURE) -> float:
    """||g||_{L^q(S^{N-1})}, counting measure on S^0 when N = 1."""
    if N == 1:
        return float((abs(g(0.0)) ** q + abs(g(math.pi)) ** q) ** (1.0 / q))
    return lq_norm(g, q, N, quad)


def frac_lhs_radial(f: RadialProfile, g: SphericalWeight, frac: FracRegime,
                    quad: SphereQuadrature = DEFAULT_QUADRATURE) -> float:
    """int g(x/|x|) |u|^p / |x|^{sp} dx for u(x) = f(|x|)."""
    require_nonneg(g, 'frac_lhs_radial')
    return angular_mass(g, frac.N, quad) * f.moment(frac.N - frac.sp, frac.p)
