"""Radial profiles, zonal angular factors and separated test functions u = f(r) h(phi)."""

import copy
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, Tuple

import numpy as np

from config.settings import RADIAL_NODES
from core.errors import ConfigError, FamilyInvalid, SupportRequired, require_finite
from core.quadrature import composite_gauss, radial_edges


class RadialProfile:
    """Base class for compactly supported radial profiles.

    A profile is stored in its own coordinates; ``scale`` and ``dilation``
    turn it into scale * f(dilation * r), so dilations are exact.
    """

    kind = 'profile'

    def __init__(self, scale: float = 1.0, dilation: float = 1.0):
        require_finite(self.kind, scale=scale, dilation=dilation)
        if not dilation > 0:
            raise ConfigError(f"dilation must be > 0 (got {dilation})", self.kind)
        self.scale = float(scale)
        self.dilation = float(dilation)

    # Subclass hooks, in the profile's own coordinates

    def _value(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _derivative(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _breakpoints(self) -> Tuple[float, ...]:
        raise NotImplementedError

    def _lipschitz(self) -> float:
        raise NotImplementedError

    def _support(self) -> float:
        raise NotImplementedError

    def _params(self) -> Dict:
        raise NotImplementedError

    # Public interface

    def value(self, r) -> np.ndarray:
        x = self.dilation * np.asarray(r, dtype=float)
        inside = x < self._support()
        return np.where(inside, self.scale * self._value(np.where(inside, x, 0.0)), 0.0)

    def __call__(self, r) -> np.ndarray:
        return self.value(r)

    def derivative(self, r) -> np.ndarray:
        x = self.dilation * np.asarray(r, dtype=float)
        inside = x < self._support()
        slope = self._derivative(np.where(inside, x, 0.0))
        return np.where(inside, self.scale * self.dilation * slope, 0.0)

    def breakpoints(self) -> Tuple[float, ...]:
        """Radii where f is not smooth, the support radius included."""
        return tuple(b / self.dilation for b in self._breakpoints())

    def lipschitz(self) -> float:
        return abs(self.scale) * self.dilation * self._lipschitz()

    @property
    def support(self) -> float:
        """Radius R with f = 0 on [R, infinity)."""
        return self._support() / self.dilation

    def moment(self, exponent: float, p: float, derivative: bool = False) -> float:
        """int_0^R |f|^p r^(exponent-1) dr, or |f'|^p with ``derivative``."""
        if not exponent > 0:
            raise ConfigError(f"moment exponent must be > 0 (got {exponent:g})", 'moment')
        # f vanishes like (R - r) at the support edge, f' does not
        end = None if derivative else p + 1.0
        edges = radial_edges(self.breakpoints(), exponent, end_exponent=end)
        r, w = composite_gauss(edges, RADIAL_NODES)
        values = self.derivative(r) if derivative else self.value(r)
        return float(np.dot(w, np.abs(values) ** p * r ** (exponent - 1.0)))

    def dilate(self, lam: float) -> 'RadialProfile':
        """The profile r -> f(lam * r)."""
        if not lam > 0:
            raise ConfigError(f"dilation factor must be > 0 (got {lam})", 'dilate')
        other = copy.copy(self)
        other.dilation = self.dilation * lam
        return other

    def scaled(self, c: float) -> 'RadialProfile':
        other = copy.copy(self)
        other.scale = self.scale * c
        return other

    def describe(self) -> str:
        args = ', '.join(f"{k}={v:g}" for k, v in self._params().items()
                         if isinstance(v, (int, float)))
        text = f"{self.kind}({args})"
        if self.dilation != 1.0:
            text += f"@{self.dilation:g}"
        if self.scale != 1.0:
            text = f"{self.scale:g}*{text}"
        return text

    def to_dict(self) -> Dict:
        data = {'kind': self.kind, **self._params()}
        if self.scale != 1.0:
            data['scale'] = self.scale
        if self.dilation != 1.0:
            data['dilation'] = self.dilation
        return data


class Tent(RadialProfile):
    """f(r) = max(0, 1 - r / R)."""

    kind = 'tent'

    def __init__(self, R: float = 1.0, **kwargs):
        super().__init__(**kwargs)
        require_finite('tent', R=R)
        if not R > 0:
            raise SupportRequired(f"support radius must be > 0 (got {R})", 'tent')
        self.R = float(R)

    def _value(self, r):
        return 1.0 - r / self.R

    def _derivative(self, r):
        return np.full_like(r, -1.0 / self.R)

    def _breakpoints(self):
        return (self.R,)

    def _lipschitz(self):
        return 1.0 / self.R

    def _support(self):
        return self.R

    def _params(self):
        return {'R': self.R}


class TruncatedPower(RadialProfile):
    """r^a on [r0, R - w], constant below r0, linear ramp to 0 on [R - w, R]."""

    kind = 'truncated_power'

    def __init__(self, a: float, r0: float, R: float, w: float, **kwargs):
        super().__init__(**kwargs)
        require_finite('truncated_power', a=a, r0=r0, R=R, w=w)
        if not (r0 > 0 and w > 0 and r0 < R - w):
            raise SupportRequired(f"0 < r0 < R - w violated (r0={r0}, R={R}, w={w})",
                                  'truncated_power')
        self.a, self.r0, self.R, self.w = float(a), float(r0), float(R), float(w)

    @property
    def _knee(self) -> float:
        return self.R - self.w

    def _value(self, r):
        m = self._knee
        core = np.clip(r, self.r0, m) ** self.a
        ramp = m ** self.a * (self.R - r) / self.w
        return np.where(r <= m, core, ramp)

    def _derivative(self, r):
        m = self._knee
        inner = self.a * np.clip(r, self.r0, m) ** (self.a - 1.0)
        return np.select([r < self.r0, r <= m], [0.0, inner], -m ** self.a / self.w)

    def _breakpoints(self):
        return (self.r0, self._knee, self.R)

    def _lipschitz(self):
        m = self._knee
        power = abs(self.a) * max(self.r0 ** (self.a - 1.0), m ** (self.a - 1.0))
        return max(power, m ** self.a / self.w)

    def _support(self):
        return self.R

    def _params(self):
        return {'a': self.a, 'r0': self.r0, 'R': self.R, 'w': self.w}


class ExpBump(RadialProfile):
    """f(r) = exp(-r / c) - exp(-R / c) on [0, R]."""

    kind = 'exp_bump'

    def __init__(self, c: float = 1.0, R: float = 20.0, **kwargs):
        super().__init__(**kwargs)
        require_finite('exp_bump', c=c, R=R)
        if not (c > 0 and R > 0):
            raise SupportRequired(f"c > 0 and R > 0 required (c={c}, R={R})", 'exp_bump')
        self.c, self.R = float(c), float(R)

    def _value(self, r):
        return np.exp(-r / self.c) - math.exp(-self.R / self.c)

    def _derivative(self, r):
        return -np.exp(-r / self.c) / self.c

    def _breakpoints(self):
        # Panel edges at c, 2c, 4c, ... resolve the decay scale
        marks = [self.c * 2.0 ** k for k in range(64) if self.c * 2.0 ** k < self.R]
        return (*marks, self.R)

    def _lipschitz(self):
        return 1.0 / self.c

    def _support(self):
        return self.R

    def _params(self):
        return {'c': self.c, 'R': self.R}


class SampledProfile(RadialProfile):
    """Linear interpolation of a table, constant below the first radius.

    The last value must be 0; the last radius is the support.
    """

    kind = 'sampled'

    def __init__(self, radii: Iterable[float], values: Iterable[float], **kwargs):
        super().__init__(**kwargs)
        radii = np.asarray(list(radii), dtype=float)
        values = np.asarray(list(values), dtype=float)
        if radii.size < 2 or radii.shape != values.shape:
            raise ConfigError("sampled profile needs matching radius/value columns", 'sampled')
        if not (np.all(np.isfinite(radii)) and np.all(np.isfinite(values))):
            raise ConfigError("sampled profile has non-finite entries", 'sampled')
        if radii[0] <= 0 or np.any(np.diff(radii) <= 0):
            raise ConfigError("radii must be positive and strictly increasing", 'sampled')
        if values[-1] != 0:
            raise SupportRequired(f"last sampled value must be 0 (got {values[-1]:g})",
                                  'sampled')
        radii.setflags(write=False)
        values.setflags(write=False)
        self.radii, self.values = radii, values
        self._slopes = np.diff(values) / np.diff(radii)

    @classmethod
    def log_spaced(cls, func: Callable[[np.ndarray], np.ndarray], r_min: float,
                   r_max: float, samples: int = 65, **kwargs) -> 'SampledProfile':
        """Tabulate ``func`` on a log-spaced grid; the last value is forced to 0."""
        radii = np.geomspace(r_min, r_max, samples)
        values = np.asarray(func(radii), dtype=float)
        values[-1] = 0.0
        return cls(radii, values, **kwargs)

    def _value(self, r):
        return np.interp(r, self.radii, self.values)

    def _derivative(self, r):
        index = np.searchsorted(self.radii, r, side='right') - 1
        inside = (index >= 0) & (index < self._slopes.size)
        return np.where(inside, self._slopes[np.clip(index, 0, self._slopes.size - 1)], 0.0)

    def _breakpoints(self):
        return tuple(self.radii.tolist())

    def _lipschitz(self):
        return float(np.max(np.abs(self._slopes)))

    def _support(self):
        return float(self.radii[-1])

    def _params(self):
        return {'radii': self.radii.tolist(), 'values': self.values.tolist()}

    def describe(self) -> str:
        text = f"sampled[{self.radii.size}]"
        if self.dilation != 1.0:
            text += f"@{self.dilation:g}"
        return text if self.scale == 1.0 else f"{self.scale:g}*{text}"


class DoublePower(RadialProfile):
    """min(r^(eps - kappa), r^(-eps - kappa)) on [r_min, r_max].

    Constant below r_min; ramps linearly to 0 on [r_max, r_max (1 + ramp)].
    As eps -> 0 with r_min -> 0 and r_max -> infinity it approaches the
    formal optimizer r^-kappa.
    """

    kind = 'double_power'

    def __init__(self, kappa: float, eps: float, r_min: float, r_max: float,
                 ramp: float = 1.0, **kwargs):
        super().__init__(**kwargs)
        require_finite('double_power', kappa=kappa, eps=eps, r_min=r_min, r_max=r_max,
                       ramp=ramp)
        if not (0 < r_min <= 1.0 <= r_max and eps >= 0 and ramp > 0):
            raise FamilyInvalid(
                f"0 < r_min <= 1 <= r_max, eps >= 0, ramp > 0 violated "
                f"(r_min={r_min:g}, r_max={r_max:g}, eps={eps:g}, ramp={ramp:g})",
                'double_power')
        self.kappa, self.eps = float(kappa), float(eps)
        self.r_min, self.r_max, self.ramp = float(r_min), float(r_max), float(ramp)

    @property
    def _outer(self) -> float:
        return self.r_max * (1.0 + self.ramp)

    def _exponent(self, r):
        return np.where(r <= 1.0, self.eps - self.kappa, -self.eps - self.kappa)

    def _power(self, r):
        r = np.clip(r, self.r_min, self.r_max)
        return np.exp(self._exponent(r) * np.log(r))

    def _edge_value(self) -> float:
        return math.exp((-self.eps - self.kappa) * math.log(self.r_max))

    def _value(self, r):
        ramp = self._edge_value() * (self._outer - r) / (self._outer - self.r_max)
        return np.where(r <= self.r_max, self._power(r), ramp)

    def _derivative(self, r):
        x = np.clip(r, self.r_min, self.r_max)
        power = self._exponent(x) * self._power(x) / x
        slope = -self._edge_value() / (self._outer - self.r_max)
        return np.select([r < self.r_min, r <= self.r_max], [0.0, power], slope)

    def _breakpoints(self):
        return tuple(sorted({self.r_min, 1.0, self.r_max, self._outer}))

    def _lipschitz(self):
        inner = self.eps - self.kappa
        outer = -self.eps - self.kappa
        candidates = [
            abs(inner) * self.r_min ** (inner - 1.0),
            abs(inner),
            abs(outer),
            abs(outer) * self.r_max ** (outer - 1.0),
            self._edge_value() / (self._outer - self.r_max),
        ]
        return max(candidates)

    def _support(self):
        return self._outer

    def _params(self):
        return {'kappa': self.kappa, 'eps': self.eps, 'r_min': self.r_min,
                'r_max': self.r_max, 'ramp': self.ramp}


PROFILE_KINDS = {cls.kind: cls for cls in (Tent, TruncatedPower, ExpBump, SampledProfile,
                                           DoublePower)}


def sweep_profile(kappa: float, step: int, p: float, cap: float = 300.0) -> DoublePower:
    """Member ``step`` of the one-parameter family approaching r^-kappa.

    eps_k = kappa 2^{-(k+1)/2}; the profile spans [e^{-L}, e^{L}] with
    L = min(8 / (p eps_k), cap) so the truncation error stays below e^{-8}.
    """
    if not kappa > 0:
        raise FamilyInvalid(f"optimizer decay must be > 0 (got {kappa:g})", 'sweep_profile')
    if step < 0:
        raise FamilyInvalid(f"step must be >= 0 (got {step})", 'sweep_profile')
    eps = kappa * 2.0 ** (-(step + 1) / 2.0)
    span = min(8.0 / (p * eps), cap)
    return DoublePower(kappa, eps, math.exp(-span), math.exp(span))


class AngularFactor:
    """Zonal factor h(phi) of a test function."""

    kind = 'angular'

    def value(self, phi) -> np.ndarray:
        raise NotImplementedError

    def derivative(self, phi) -> np.ndarray:
        raise NotImplementedError

    def breakpoints(self) -> Tuple[float, ...]:
        return ()

    @property
    def is_constant(self) -> bool:
        return False

    def describe(self) -> str:
        return self.kind

    def to_dict(self) -> Dict:
        return {'kind': self.kind}


class One(AngularFactor):
    kind = 'one'

    def value(self, phi):
        return np.ones_like(np.asarray(phi, dtype=float))

    def derivative(self, phi):
        return np.zeros_like(np.asarray(phi, dtype=float))

    @property
    def is_constant(self) -> bool:
        return True


class Cos(AngularFactor):
    kind = 'cos'

    def value(self, phi):
        return np.cos(phi)

    def derivative(self, phi):
        return -np.sin(phi)


class CapSmooth(AngularFactor):
    """1 on [0, phi0], linear down to 0 on [phi0, phi0 + ramp], 0 beyond."""

    kind = 'cap_smooth'

    def __init__(self, phi0: float = math.pi / 3.0, ramp: float = math.pi / 6.0):
        require_finite('cap_smooth', phi0=phi0, ramp=ramp)
        if not (phi0 > 0 and ramp > 0 and phi0 + ramp <= math.pi):
            raise ConfigError(f"0 < phi0, 0 < ramp, phi0 + ramp <= pi violated "
                              f"(phi0={phi0:g}, ramp={ramp:g})", 'cap_smooth')
        self.phi0, self.ramp = float(phi0), float(ramp)

    def value(self, phi):
        return np.clip((self.phi0 + self.ramp - np.asarray(phi, dtype=float)) / self.ramp,
                       0.0, 1.0)

    def derivative(self, phi):
        phi = np.asarray(phi, dtype=float)
        on_ramp = (phi > self.phi0) & (phi < self.phi0 + self.ramp)
        return np.where(on_ramp, -1.0 / self.ramp, 0.0)

    def breakpoints(self):
        return (self.phi0, self.phi0 + self.ramp)

    def describe(self) -> str:
        return f"cap_smooth({self.phi0:.4g}, {self.ramp:.4g})"

    def to_dict(self) -> Dict:
        return {'kind': self.kind, 'phi0': self.phi0, 'ramp': self.ramp}


ANGULAR_KINDS = {cls.kind: cls for cls in (One, Cos, CapSmooth)}


@dataclass(frozen=True)
class TestFunction:
    """u(r, phi) = f(r) h(phi)."""

    __test__ = False

    radial: RadialProfile
    angular: AngularFactor = field(default_factory=One)
    name: str = ''

    def value(self, r, phi) -> np.ndarray:
        return self.radial.value(r) * self.angular.value(phi)

    def dilate(self, lam: float) -> 'TestFunction':
        return TestFunction(self.radial.dilate(lam), self.angular, self.name)

    def scaled(self, c: float) -> 'TestFunction':
        return TestFunction(self.radial.scaled(c), self.angular, self.name)

    def describe(self) -> str:
        if self.name:
            return self.name
        if self.angular.is_constant:
            return self.radial.describe()
        return f"{self.radial.describe()}*{self.angular.describe()}"

    def to_dict(self) -> Dict:
        return {'radial': self.radial.to_dict(), 'angular': self.angular.to_dict(),
                'name': self.name}


def profile_from_dict(data: Dict) -> RadialProfile:
    """Build a profile from ``{'kind': ..., **params}``."""
    data = dict(data)
    kind = data.pop('kind', None)
    if kind not in PROFILE_KINDS:
        raise ConfigError(f"unknown profile kind: {kind}", 'profile_from_dict')
    try:
        return PROFILE_KINDS[kind](**data)
    except TypeError as e:
        raise ConfigError(f"bad parameters for {kind}: {e}", 'profile_from_dict')


def angular_from_dict(data: Dict) -> AngularFactor:
    data = dict(data)
    kind = data.pop('kind', None)
    if kind not in ANGULAR_KINDS:
        raise ConfigError(f"unknown angular factor: {kind}", 'angular_from_dict')
    try:
        return ANGULAR_KINDS[kind](**data)
    except TypeError as e:
        raise ConfigError(f"bad parameters for {kind}: {e}", 'angular_from_dict')


def testfunction_from_dict(data) -> TestFunction:
    """Resolve a catalog name or a ``{'radial': ..., 'angular': ...}`` mapping."""
    if isinstance(data, str):
        if data not in TEST_CATALOG:
            raise ConfigError(f"unknown test function: {data}", 'testfunction_from_dict')
        return TEST_CATALOG[data]
    if 'radial' not in data:
        raise ConfigError("test function needs a 'radial' entry", 'testfunction_from_dict')
    radial = data['radial']
    if isinstance(radial, str):
        if radial not in PROFILE_CATALOG:
            raise ConfigError(f"unknown radial profile: {radial}", 'testfunction_from_dict')
        radial = PROFILE_CATALOG[radial]
    else:
        radial = profile_from_dict(radial)
    angular = angular_from_dict(data.get('angular', {'kind': 'one'}))
    return TestFunction(radial, angular, data.get('name', ''))


def _smooth_bump(r):
    return np.exp(-r * r)


PROFILE_CATALOG: Dict[str, RadialProfile] = {
    'tent': Tent(1.0),
    'tent-wide': Tent(3.0),
    'exp-bump': ExpBump(0.5, 10.0),
    'power-decay': TruncatedPower(-0.5, 0.1, 2.0, 0.5),
    'power-rise': TruncatedPower(1.0, 0.2, 1.5, 0.5),
    'sampled-gauss': SampledProfile.log_spaced(_smooth_bump, 0.01, 4.0),
    'double-power': DoublePower(0.5, 0.25, 0.1, 10.0),
}

ANGULAR_CATALOG: Dict[str, AngularFactor] = {
    'one': One(),
    'cos': Cos(),
    'cap-smooth': CapSmooth(),
}

TEST_CATALOG: Dict[str, TestFunction] = {
    'tent': TestFunction(PROFILE_CATALOG['tent'], One(), 'tent'),
    'tent-wide': TestFunction(PROFILE_CATALOG['tent-wide'], One(), 'tent-wide'),
    'exp-bump': TestFunction(PROFILE_CATALOG['exp-bump'], One(), 'exp-bump'),
    'power-decay': TestFunction(PROFILE_CATALOG['power-decay'], One(), 'power-decay'),
    'power-rise': TestFunction(PROFILE_CATALOG['power-rise'], One(), 'power-rise'),
    'sampled-gauss': TestFunction(PROFILE_CATALOG['sampled-gauss'], One(), 'sampled-gauss'),
    'double-power': TestFunction(PROFILE_CATALOG['double-power'], One(), 'double-power'),
    'tent-cos': TestFunction(PROFILE_CATALOG['tent'], Cos(), 'tent-cos'),
    'tent-cap': TestFunction(PROFILE_CATALOG['tent'], CapSmooth(), 'tent-cap'),
    'exp-cap': TestFunction(PROFILE_CATALOG['exp-bump'], CapSmooth(), 'exp-cap'),
}
