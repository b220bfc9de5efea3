"""Zonal angular weights on the unit sphere S^{N-1}.

A zonal weight depends only on the polar angle phi in [0, pi] measured from
a fixed axis, so every sphere integral reduces to

    int_{S^{N-1}} g = |S^{N-2}| int_0^pi g(phi) sin^{N-2}(phi) dphi.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Iterable, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.special import gamma

from config.settings import ANGULAR_NODES, SPHERE_TOL, MAX_BISECTIONS
from core.errors import (
    ConfigError, ExponentOutOfRange, MuUndefined, NonnegRequired,
    RegimeViolation, require_finite,
)
from core.quadrature import adaptive_gauss

logger = logging.getLogger(__name__)

WEIGHT_KINDS = ('constant', 'cap', 'zonal_power', 'sampled')


@dataclass(frozen=True)
class SphereQuadrature:
    """Gauss nodes per angular panel and the adaptive refinement target."""

    angular_nodes: int = ANGULAR_NODES
    tolerance: float = SPHERE_TOL

    def __post_init__(self):
        if int(self.angular_nodes) < 8:
            raise ConfigError(f"angular_nodes must be >= 8 (got {self.angular_nodes})",
                              'SphereQuadrature')
        if not self.tolerance > 0:
            raise ConfigError(f"tolerance must be > 0 (got {self.tolerance})",
                              'SphereQuadrature')


DEFAULT_QUADRATURE = SphereQuadrature()


@dataclass(frozen=True)
class SphericalWeight:
    """Zonal weight g(phi) on S^{N-1}.

    Kinds:
        constant     g = scale
        cap          g = scale on {phi < phi0}, 0 elsewhere
        zonal_power  g = scale * |cos phi|^k
        sampled      linear interpolation of a table on [0, pi], times scale
    """

    kind: str
    scale: float = 1.0
    phi0: Optional[float] = None
    k: Optional[float] = None
    angles: Tuple[float, ...] = ()
    values: Tuple[float, ...] = ()
    nonneg: bool = field(default=None)

    def __post_init__(self):
        if self.kind not in WEIGHT_KINDS:
            raise ConfigError(f"unknown weight kind: {self.kind}", 'SphericalWeight')
        require_finite('SphericalWeight', scale=self.scale)
        if self.kind == 'cap':
            if self.phi0 is None or not 0 < self.phi0 <= math.pi:
                raise ConfigError(f"cap angle must lie in (0, pi] (got {self.phi0})",
                                  'SphericalWeight')
        if self.kind == 'zonal_power':
            if self.k is None or not self.k >= 0:
                raise ConfigError(f"zonal power must be >= 0 (got {self.k})",
                                  'SphericalWeight')
        if self.kind == 'sampled':
            self._check_table()

        actual = self._is_nonneg()
        if self.nonneg is None:
            object.__setattr__(self, 'nonneg', actual)
        elif self.nonneg and not actual:
            raise NonnegRequired("weight flagged nonneg has negative values",
                                 'SphericalWeight')

    def _check_table(self):
        angles = np.asarray(self.angles, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if angles.size < 2 or angles.shape != values.shape:
            raise ConfigError("sampled weight needs matching angle/value columns",
                              'SphericalWeight')
        if not (np.all(np.isfinite(angles)) and np.all(np.isfinite(values))):
            raise ConfigError("sampled weight has non-finite entries", 'SphericalWeight')
        if np.any(np.diff(angles) <= 0):
            raise ConfigError("sampled angles must be strictly increasing",
                              'SphericalWeight')
        if not (math.isclose(angles[0], 0.0, abs_tol=1e-12)
                and math.isclose(angles[-1], math.pi, rel_tol=1e-12)):
            raise ConfigError("sampled angles must cover [0, pi]", 'SphericalWeight')

    def _is_nonneg(self) -> bool:
        if self.kind == 'sampled':
            return self.scale >= 0 and min(self.values) >= 0 or \
                self.scale <= 0 and max(self.values) <= 0
        return self.scale >= 0

    # Constructors

    @classmethod
    def constant(cls, c: float = 1.0) -> 'SphericalWeight':
        return cls('constant', scale=float(c))

    @classmethod
    def cap(cls, phi0: float, height: float = 1.0) -> 'SphericalWeight':
        return cls('cap', scale=float(height), phi0=float(phi0))

    @classmethod
    def zonal_power(cls, k: float, c: float = 1.0) -> 'SphericalWeight':
        return cls('zonal_power', scale=float(c), k=float(k))

    @classmethod
    def sampled(cls, angles: Iterable[float], values: Iterable[float]) -> 'SphericalWeight':
        return cls('sampled', angles=tuple(float(a) for a in angles),
                   values=tuple(float(v) for v in values))

    @classmethod
    def from_function(cls, func: Callable[[np.ndarray], np.ndarray],
                      samples: int = 257) -> 'SphericalWeight':
        """Tabulate a zonal function on a uniform angle grid."""
        angles = np.linspace(0.0, math.pi, samples)
        return cls.sampled(angles, func(angles))

    # Evaluation

    def __call__(self, phi) -> np.ndarray:
        phi = np.asarray(phi, dtype=float)
        if self.kind == 'constant':
            return np.full_like(phi, self.scale)
        if self.kind == 'cap':
            return np.where(phi < self.phi0, self.scale, 0.0)
        if self.kind == 'zonal_power':
            return self.scale * np.abs(np.cos(phi)) ** self.k
        return self.scale * np.interp(phi, self.angles, self.values)

    def scaled(self, c: float) -> 'SphericalWeight':
        """The weight c * g."""
        return SphericalWeight(self.kind, scale=self.scale * c, phi0=self.phi0, k=self.k,
                               angles=self.angles, values=self.values)

    def breakpoints(self) -> Tuple[float, ...]:
        """Angles where g or |g|^q may fail to be smooth."""
        if self.kind == 'cap':
            return (self.phi0,)
        if self.kind == 'zonal_power':
            return (0.5 * math.pi,)
        if self.kind == 'sampled':
            return tuple(self.angles[1:-1])
        return ()

    def sup(self) -> float:
        """Essential supremum of |g|."""
        if self.kind == 'sampled':
            return abs(self.scale) * float(np.max(np.abs(self.values)))
        return abs(self.scale)

    def describe(self) -> str:
        if self.kind == 'constant':
            return f"const({self.scale:g})"
        prefix = '' if self.scale == 1.0 else f"{self.scale:g}*"
        if self.kind == 'cap':
            return f"{prefix}cap({self.phi0:.6g})"
        if self.kind == 'zonal_power':
            return f"{prefix}|cos|^{self.k:g}"
        return f"{prefix}sampled[{len(self.angles)}]"

    def to_dict(self) -> Dict:
        data = {'kind': self.kind, 'scale': self.scale}
        if self.kind == 'cap':
            data['phi0'] = self.phi0
        elif self.kind == 'zonal_power':
            data['k'] = self.k
        elif self.kind == 'sampled':
            data['angles'] = list(self.angles)
            data['values'] = list(self.values)
        return data


def require_nonneg(g: SphericalWeight, operation: str) -> None:
    if not g.nonneg:
        raise NonnegRequired(f"weight {g.describe()} must satisfy g >= 0", operation)


def load_sampled_weight(path) -> SphericalWeight:
    """Read a two-column CSV (angle in radians, value) into a sampled weight."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"File not found: {path}")
    frame = pd.read_csv(path, header=None, comment='#')
    frame = frame.apply(pd.to_numeric, errors='coerce').dropna()
    if frame.shape[1] < 2:
        raise ConfigError(f"{path} needs two columns (angle, value)", 'load_sampled_weight')
    return SphericalWeight.sampled(frame.iloc[:, 0].to_numpy(), frame.iloc[:, 1].to_numpy())


def surface_measure(N: int) -> float:
    """|S^{N-1}| = 2 pi^{N/2} / Gamma(N/2)."""
    if int(N) != N or N <= 0:
        raise RegimeViolation(f"N must be a positive integer (got {N})", 'surface_measure')
    return float(2.0 * math.pi ** (N / 2.0) / gamma(N / 2.0))


def integrate_angle(func: Callable[[np.ndarray], np.ndarray], N: int,
                    quad: SphereQuadrature = DEFAULT_QUADRATURE,
                    breakpoints: Iterable[float] = (),
                    operation: str = 'integrate_angle') -> float:
    """|S^{N-2}| int_0^pi func(phi) sin^{N-2}(phi) dphi for a zonal ``func``."""
    if N < 2:
        raise RegimeViolation(f"N >= 2 required for sphere integrals (got {N})", operation)
    power = N - 2

    def integrand(phi):
        return func(phi) * np.sin(phi) ** power

    value, _ = adaptive_gauss(integrand, 0.0, math.pi, quad.angular_nodes, quad.tolerance,
                              breakpoints=breakpoints, max_depth=MAX_BISECTIONS,
                              operation=operation)
    return surface_measure(N - 1) * value


def integrate_zonal(g: SphericalWeight, N: int,
                    quad: SphereQuadrature = DEFAULT_QUADRATURE) -> float:
    """int_{S^{N-1}} g."""
    if N < 2:
        raise RegimeViolation(f"N >= 2 required (got {N})", 'integrate_zonal')
    if g.kind == 'constant':
        return g.scale * surface_measure(N)
    return integrate_angle(g, N, quad, g.breakpoints(), 'integrate_zonal')


def power_integral(g: SphericalWeight, q: float, N: int,
                   quad: SphereQuadrature = DEFAULT_QUADRATURE) -> float:
    """int_{S^{N-1}} |g|^q."""
    require_finite('lq_norm', q=q)
    if not q > 0:
        raise RegimeViolation(f"exponent must be > 0 (got {q})", 'lq_norm')
    if N < 2:
        raise RegimeViolation(f"N >= 2 required (got {N})", 'lq_norm')
    if g.kind == 'constant':
        return abs(g.scale) ** q * surface_measure(N)
    return integrate_angle(lambda phi: np.abs(g(phi)) ** q, N, quad, g.breakpoints(),
                           'lq_norm')


def lq_norm(g: SphericalWeight, q: float, N: int,
            quad: SphereQuadrature = DEFAULT_QUADRATURE) -> float:
    """||g||_{L^q(S^{N-1})} for q >= 1."""
    require_finite('lq_norm', q=q)
    if q < 1:
        raise RegimeViolation(f"q >= 1 required (got {q})", 'lq_norm')
    if g.kind == 'constant':
        return abs(g.scale) * surface_measure(N) ** (1.0 / q)
    return power_integral(g, q, N, quad) ** (1.0 / q)


def critical_gn_exponent(N: int) -> float:
    """Upper end of the admissible t range: 2(N-1)/(N-3) for N > 3, else infinity."""
    return 2.0 * (N - 1) / (N - 3) if N > 3 else math.inf


def mu_gn(beta: float, N: int, t: float) -> float:
    """Concave increasing function of the Gagliardo-Nirenberg inequality on S^{N-1}.

    Known in closed form on [0, (N-1)/(t-2)] for subcritical t, and for all
    beta at the critical exponent t = 2(N-1)/(N-3), where it is capped at
    (N-1)(N-3)/4.
    """
    require_finite('mu_gn', beta=beta, t=t)
    if N < 2:
        raise RegimeViolation(f"N >= 2 required (got {N})", 'mu_gn')
    critical = critical_gn_exponent(N)
    at_critical = N > 3 and math.isclose(t, critical, rel_tol=1e-12)
    if not t > 2 or (t >= critical and not at_critical):
        bound = f"2(N-1)/(N-3) = {critical:g}" if N > 3 else "infinity"
        raise ExponentOutOfRange(f"t = {t:g} outside (2, {bound}]", 'mu_gn')
    if beta < 0:
        raise MuUndefined(f"beta = {beta:g} < 0", 'mu_gn')

    cap = (N - 1) / (t - 2)
    if at_critical:
        return min(beta, cap)
    if beta > cap * (1.0 + 1e-12):
        raise MuUndefined(
            f"beta = {beta:g} beyond (N-1)/(t-2) = {cap:g}, where mu is not explicit",
            'mu_gn')
    return float(beta)


# Weights exercised by the verify command when none is named
WEIGHT_CATALOG: Dict[str, SphericalWeight] = {
    'one': SphericalWeight.constant(1.0),
    'two': SphericalWeight.constant(2.0),
    'hemisphere': SphericalWeight.cap(0.5 * math.pi),
    'polar-cap': SphericalWeight.cap(math.pi / 3.0),
    'cos2': SphericalWeight.zonal_power(2.0),
    'abs-cos': SphericalWeight.zonal_power(1.0),
    'tilted': SphericalWeight.from_function(lambda phi: 1.0 + 0.5 * np.cos(phi)),
}
