"""Monte-Carlo oracles for the quadrature-based routines.

Each oracle returns an importance-sampled estimate with its standard error;
the selftest command compares against the deterministic value at three
standard errors.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from config.settings import MC_SAMPLES, SEED
from core.errors import ConfigError, SupportRequired
from core.profiles import RadialProfile
from core.rearrangement import HomogeneousWeight
from core.regimes import FracRegime
from core.sphere import SphericalWeight, surface_measure

logger = logging.getLogger(__name__)

SIGMAS = 3.0


@dataclass(frozen=True)
class MCEstimate:
    value: float
    stderr: float
    samples: int

    def agrees(self, exact: float, sigmas: float = SIGMAS) -> bool:
        """|exact - value| within ``sigmas`` standard errors (plus rounding slack)."""
        return abs(exact - self.value) <= sigmas * self.stderr + 1e-12 * abs(exact)

    def z_score(self, exact: float) -> float:
        if self.stderr == 0:
            return 0.0 if exact == self.value else math.inf
        return (self.value - exact) / self.stderr


def _rng(seed: Optional[int]) -> np.random.Generator:
    return np.random.default_rng(SEED if seed is None else seed)


def _estimate(values: np.ndarray) -> MCEstimate:
    n = values.size
    if n < 2:
        raise ConfigError(f"need at least 2 samples (got {n})", 'oracle')
    return MCEstimate(float(values.mean()), float(values.std(ddof=1) / math.sqrt(n)), n)


def sphere_directions(rng: np.random.Generator, N: int, n: int) -> np.ndarray:
    """Uniform points on S^{N-1}: normalised standard Gaussians."""
    x = rng.standard_normal((n, N))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def polar_angle(directions: np.ndarray) -> np.ndarray:
    """Angle from the first coordinate axis."""
    return np.arccos(np.clip(directions[:, 0], -1.0, 1.0))


def ball_points(rng: np.random.Generator, N: int, radius: float, n: int) -> np.ndarray:
    return sphere_directions(rng, N, n) * (radius * rng.random(n) ** (1.0 / N))[:, None]


def sphere_power_integral_mc(g: SphericalWeight, q: float, N: int,
                             samples: int = MC_SAMPLES, seed: Optional[int] = None) -> MCEstimate:
    """int_{S^{N-1}} |g|^q from uniform directions."""
    directions = sphere_directions(_rng(seed), N, samples)
    return _estimate(surface_measure(N) * np.abs(g(polar_angle(directions))) ** q)


def lq_norm_mc(g: SphericalWeight, q: float, N: int, samples: int = MC_SAMPLES,
               seed: Optional[int] = None) -> MCEstimate:
    """||g||_q with the standard error carried through x -> x^{1/q}."""
    power = sphere_power_integral_mc(g, q, N, samples, seed)
    value = power.value ** (1.0 / q)
    stderr = value / (q * power.value) * power.stderr if power.value > 0 else 0.0
    return MCEstimate(value, stderr, samples)


def superlevel_volume_mc(w: HomogeneousWeight, t: float, N: int, samples: int = MC_SAMPLES,
                         seed: Optional[int] = None) -> MCEstimate:
    """|{g(y/|y|)/|y|^d > t}| by hit-or-miss in the ball of radius (sup g / t)^{1/d}."""
    w.require_dimension(N, 'superlevel_volume_mc')
    radius = (w.g.sup() / t) ** (1.0 / w.degree)
    y = ball_points(_rng(seed), N, radius, samples)
    r = np.linalg.norm(y, axis=1)
    inside = w.g(polar_angle(y / r[:, None])) > t * r ** w.degree
    ball = surface_measure(N) / N * radius ** N
    return _estimate(ball * inside.astype(float))


def weighted_moment_mc(f: RadialProfile, g: SphericalWeight, N: int, degree: float, p: float,
                       samples: int = MC_SAMPLES, seed: Optional[int] = None) -> MCEstimate:
    """int g(x/|x|) |f(|x|)|^p / |x|^degree dx over R^N for degree < N.

    Radii are drawn with density proportional to rho^{N-degree-1} on [0, R],
    which absorbs the singular weight.
    """
    R = f.support
    if not math.isfinite(R):
        raise SupportRequired("profile needs a finite support radius", 'weighted_moment_mc')
    rng = _rng(seed)
    exponent = N - degree
    directions = sphere_directions(rng, N, samples)
    rho = R * rng.random(samples) ** (1.0 / exponent)
    scale = surface_measure(N) * R ** exponent / exponent
    return _estimate(scale * g(polar_angle(directions)) * np.abs(f.value(rho)) ** p)


def seminorm_mc(f: RadialProfile, frac: FracRegime, samples: int = MC_SAMPLES,
                seed: Optional[int] = None) -> MCEstimate:
    """int int |u(x) - u(y)|^p / |x - y|^{N+sp} dx dy for u(x) = f(|x|).

    x is uniform in the support ball B_R and y = x + rho sigma, with sigma
    uniform on the sphere and rho drawn from the mixture

        1/2 a rho^{a-1} / c^a on (0, c],   1/2 b c^b rho^{-1-b} on (c, inf)

    with a = p - sp, b = sp, c = R. Both tails of the integrand are matched,
    so the weights stay bounded. Pairs with y outside B_R stand for their
    mirror images as well and count twice.
    """
    R = f.support
    if not math.isfinite(R):
        raise SupportRequired("profile needs a finite support radius", 'seminorm_mc')
    N, sp, p = frac.N, frac.sp, frac.p
    a, b, c = p - sp, sp, R
    rng = _rng(seed)

    x = ball_points(rng, N, R, samples)
    near = rng.random(samples) < 0.5
    u = rng.random(samples)
    # 1 - u keeps the outer draw away from u = 0
    rho = np.where(near, c * u ** (1.0 / a), c * (1.0 - u) ** (-1.0 / b))
    y = x + rho[:, None] * sphere_directions(rng, N, samples)

    density = np.where(rho <= c, 0.5 * a * rho ** (a - 1.0) / c ** a,
                       0.5 * b * c ** b * rho ** (-1.0 - b))
    ry = np.linalg.norm(y, axis=1)
    difference = np.abs(f.value(np.linalg.norm(x, axis=1)) - f.value(ry)) ** p
    mirror = np.where(ry >= R, 2.0, 1.0)
    ball = surface_measure(N) / N * R ** N
    values = ball * surface_measure(N) * mirror * difference * rho ** (-1.0 - sp) / density
    estimate = _estimate(values)
    logger.debug("seminorm_mc %s: %.6g +- %.2g (%d samples)", f.describe(), estimate.value,
                 estimate.stderr, samples)
    return estimate
