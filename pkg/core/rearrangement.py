"""Symmetric decreasing rearrangement: closed forms for homogeneous weights and grid versions."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, Optional

import numpy as np
import pandas as pd

from core.errors import (
    ConfigError, InvalidLevel, NonnegRequired, RegimeViolation, ShapeMismatch,
    require_finite,
)
from core.profiles import RadialProfile, SampledProfile
from core.sphere import (
    DEFAULT_QUADRATURE, SphereQuadrature, SphericalWeight, power_integral,
    require_nonneg, surface_measure,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HomogeneousWeight:
    """g(x/|x|) / |x|^d with g >= 0 and d > 0."""

    g: SphericalWeight
    degree: float

    def __post_init__(self):
        require_finite('HomogeneousWeight', degree=self.degree)
        if not self.degree > 0:
            raise RegimeViolation(f"degree > 0 violated (d = {self.degree:g})",
                                  'HomogeneousWeight')
        require_nonneg(self.g, 'HomogeneousWeight')

    def require_dimension(self, N: int, operation: str) -> None:
        if N < 2:
            raise RegimeViolation(f"N >= 2 required (got {N})", operation)
        if not N > self.degree:
            raise RegimeViolation(f"N > d violated ({N} <= {self.degree:g})", operation)

    def describe(self) -> str:
        return f"{self.g.describe()}/|x|^{self.degree:g}"


@dataclass(frozen=True, eq=False)
class SampledField:
    """Nonnegative values on cells of given measure."""

    values: np.ndarray
    measures: Optional[np.ndarray] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).ravel()
        measures = np.ones_like(values) if self.measures is None \
            else np.asarray(self.measures, dtype=float).ravel()
        if values.shape != measures.shape:
            raise ShapeMismatch(f"{values.size} values vs {measures.size} cell measures",
                                'SampledField')
        if not (np.all(np.isfinite(values)) and np.all(np.isfinite(measures))):
            raise ConfigError("sampled field has non-finite entries", 'SampledField')
        if np.any(values < 0):
            raise NonnegRequired("sampled field values must be >= 0", 'SampledField')
        if np.any(measures <= 0):
            raise ConfigError("cell measures must be > 0", 'SampledField')
        values.setflags(write=False)
        measures.setflags(write=False)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'measures', measures)

    def __len__(self) -> int:
        return self.values.size

    def superlevel(self, t: float) -> float:
        """Total measure of the cells with value > t."""
        return float(self.measures[self.values > t].sum())

    def lq_sum(self, q: float) -> float:
        return float(np.dot(self.values ** q, self.measures))


def load_sampled_field(path) -> SampledField:
    """Read a single-column CSV of values (optional second column: cell measures)."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"File not found: {path}")
    frame = pd.read_csv(path, header=None, comment='#')
    frame = frame.apply(pd.to_numeric, errors='coerce').dropna()
    if frame.empty:
        raise ConfigError(f"{path} holds no numeric rows", 'load_sampled_field')
    measures = frame.iloc[:, 1].to_numpy() if frame.shape[1] > 1 else None
    return SampledField(frame.iloc[:, 0].to_numpy(), measures)


def superlevel_measure(w: HomogeneousWeight, t: float, N: int,
                       quad: SphereQuadrature = DEFAULT_QUADRATURE) -> float:
    """|{y : g(y/|y|)/|y|^d > t}| = t^{-N/d} / N * int g^{N/d}."""
    require_finite('superlevel_measure', t=t)
    if not t > 0:
        raise InvalidLevel(f"level t must be > 0 (got {t:g})", 'superlevel_measure')
    w.require_dimension(N, 'superlevel_measure')
    exponent = N / w.degree
    return t ** -exponent / N * power_integral(w.g, exponent, N, quad)


def rearranged_coefficient(w: HomogeneousWeight, N: int,
                           quad: SphereQuadrature = DEFAULT_QUADRATURE) -> float:
    """A with (g(x/|x|)/|x|^d)^* = A / |x|^d."""
    w.require_dimension(N, 'rearranged_coefficient')
    exponent = N / w.degree
    total = power_integral(w.g, exponent, N, quad)
    return (total / surface_measure(N)) ** (1.0 / exponent)


def radial_superlevel_measure(A: float, degree: float, t: float, N: int) -> float:
    """|{A/|x|^d > t}|, the ball of radius (A/t)^{1/d}."""
    if not t > 0:
        raise InvalidLevel(f"level t must be > 0 (got {t:g})", 'radial_superlevel_measure')
    return surface_measure(N) / N * (A / t) ** (N / degree)


def equimeasurability_check(w: HomogeneousWeight, N: int, levels: Iterable[float] = (0.5, 1.0, 2.0),
                            quad: SphereQuadrature = DEFAULT_QUADRATURE) -> Dict[float, Dict]:
    """Superlevel measures of the weight and of its rearrangement at each level."""
    A = rearranged_coefficient(w, N, quad)
    out = {}
    for t in levels:
        original = superlevel_measure(w, t, N, quad)
        rearranged = radial_superlevel_measure(A, w.degree, t, N)
        scale = max(abs(original), abs(rearranged), 1e-300)
        out[t] = {'original': original, 'rearranged': rearranged,
                  'rel_diff': abs(original - rearranged) / scale}
    return out


def decreasing_rearrangement(f: SampledField) -> SampledField:
    """Values in non-increasing order, each carrying its cell measure."""
    order = np.argsort(-f.values, kind='stable')
    return SampledField(f.values[order], f.measures[order])


def _step_profile(field: SampledField, edges: np.ndarray) -> np.ndarray:
    """Value of the rearranged step function on each segment of the measure axis."""
    rearranged = decreasing_rearrangement(field)
    ends = np.cumsum(rearranged.measures)
    mids = 0.5 * (edges[:-1] + edges[1:])
    index = np.minimum(np.searchsorted(ends, mids, side='right'), ends.size - 1)
    return rearranged.values[index]


def hardy_littlewood_gap(u: SampledField, v: SampledField) -> float:
    """int u* v* - int u v, which is >= 0.

    Both rearrangements are step functions on the measure axis [0, |cells|];
    their product is integrated exactly on the common refinement.
    """
    if len(u) != len(v) or not np.array_equal(u.measures, v.measures):
        raise ShapeMismatch(f"cell structures differ ({len(u)} vs {len(v)} cells)",
                            'hardy_littlewood_gap')
    plain = float(np.sum(u.values * v.values * u.measures))
    edges = np.unique(np.concatenate((
        [0.0],
        np.cumsum(decreasing_rearrangement(u).measures),
        np.cumsum(decreasing_rearrangement(v).measures),
    )))
    widths = np.diff(edges)
    keep = widths > 0
    product = _step_profile(u, edges) * _step_profile(v, edges)
    rearranged = float(np.sum(product[keep] * widths[keep]))
    return rearranged - plain


def radial_rearrangement(profile: RadialProfile, N: int, cells: int = 4096) -> SampledProfile:
    """Symmetric decreasing rearrangement of |f| for a radial profile on R^N.

    The profile is sampled on shells of volume |B_1| (r_{i+1}^N - r_i^N); the
    sorted shells are restacked from the origin and read back as radii.
    """
    if N < 1:
        raise RegimeViolation(f"N >= 1 required (got {N})", 'radial_rearrangement')
    ball = surface_measure(N) / N
    radii = np.linspace(0.0, profile.support, cells + 1)
    shells = ball * np.diff(radii ** N)
    mids = 0.5 * (radii[:-1] + radii[1:])
    field = SampledField(np.abs(profile.value(mids)), shells)
    sorted_field = decreasing_rearrangement(field)
    volume = np.cumsum(sorted_field.measures) - 0.5 * sorted_field.measures
    new_radii = (volume / ball) ** (1.0 / N)
    values = sorted_field.values.copy()
    values[-1] = 0.0
    logger.debug("radial_rearrangement: %d shells, support %.6g", cells, profile.support)
    return SampledProfile(new_radii, values)
