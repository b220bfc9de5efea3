"""Quadrature rules shared by the sphere, fractional and quotient modules.

All rules are vectorised: integrands receive numpy arrays of nodes and must
return arrays of the same shape.
"""

import logging
import math
from functools import lru_cache
from typing import Callable, Iterable, Optional, Tuple

import numpy as np

from core.errors import QuadratureFailure

logger = logging.getLogger(__name__)

# Largest ratio between the ends of a geometrically graded panel
GRADING_RATIO = 4.0

# Relative size below which the innermost graded panel is dropped
GRADING_FLOOR = 1e-16


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def composite_gauss(edges: np.ndarray, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of an n-point Gauss rule on every panel of ``edges``."""
    edges = np.asarray(edges, dtype=float)
    x, w = gauss_legendre(n)
    left = edges[:-1, None]
    half = 0.5 * np.diff(edges)[:, None]
    nodes = left + half * (x[None, :] + 1.0)
    weights = half * w[None, :]
    return nodes.ravel(), weights.ravel()


def grading_depth(exponent: float, floor: float = GRADING_FLOOR,
                  ratio: float = GRADING_RATIO, cap: int = 4000) -> int:
    """Panels needed so that an r^(exponent-1) endpoint tail drops below ``floor``."""
    if exponent <= 0:
        raise QuadratureFailure(f"endpoint exponent must be > 0 (got {exponent})",
                                'grading_depth')
    depth = math.ceil(math.log(1.0 / floor) / (exponent * math.log(ratio))) + 1
    return min(depth, cap)


def graded_edges(a: float, b: float, depth: int,
                 ratio: float = GRADING_RATIO) -> np.ndarray:
    """Panel edges on [a, b] refined geometrically toward ``a``.

    The innermost panel is [a, a + (b - a) / ratio**depth].
    """
    length = b - a
    offsets = length * ratio ** -np.arange(depth, -1, -1, dtype=float)
    return np.concatenate(([a], a + offsets))


def split_geometric(edges: Iterable[float], ratio: float = GRADING_RATIO) -> np.ndarray:
    """Split panels [a, b] with a > 0 and b / a > ratio into geometric pieces."""
    edges = sorted(set(float(e) for e in edges))
    out = [edges[0]]
    for a, b in zip(edges[:-1], edges[1:]):
        if a > 0 and b / a > ratio:
            count = math.ceil(math.log(b / a) / math.log(ratio))
            inner = a * (b / a) ** (np.arange(1, count) / count)
            out.extend(inner.tolist())
        out.append(b)
    return np.asarray(out)


def radial_edges(breakpoints: Iterable[float], exponent: float,
                 ratio: float = GRADING_RATIO,
                 end_exponent: Optional[float] = None) -> np.ndarray:
    """Edges on [0, max(breakpoints)] for an integrand ~ r^(exponent-1) at 0.

    The first interval is graded toward the origin, every later interval is
    split so that no panel spans more than ``ratio`` in scale. With
    ``end_exponent`` the last interval is also graded toward the outer end,
    for integrands ~ (R - r)^(end_exponent-1) there.
    """
    points = sorted(set(float(b) for b in breakpoints if b > 0))
    if not points:
        raise QuadratureFailure("radial mesh needs a positive breakpoint", 'radial_edges')
    first = graded_edges(0.0, points[0], grading_depth(exponent, ratio=ratio), ratio)
    rest = split_geometric(points, ratio)
    edges = np.concatenate((first, rest[1:]))
    if end_exponent is None:
        return edges
    a, b = edges[-2], edges[-1]
    tail = graded_edges(0.0, b - a, grading_depth(end_exponent, ratio=ratio), ratio)
    return np.concatenate((edges[:-2], b - tail[::-1]))


def adaptive_gauss(func: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                   n: int, tol: float, breakpoints: Iterable[float] = (),
                   max_depth: int = 40, operation: str = 'adaptive_gauss') -> Tuple[float, float]:
    """Integrate ``func`` on [a, b] by panel bisection.

    Each panel compares its n-point Gauss value with the sum over its two
    halves and is bisected until the difference meets its share of ``tol``
    (relative to the running total, with ``tol`` as absolute floor).

    Returns:
        Tuple of (value, error estimate)
    """
    if b <= a:
        return 0.0, 0.0

    edges = sorted({a, b} | {float(p) for p in breakpoints if a < p < b})
    x, w = gauss_legendre(n)

    def panel(lo, hi):
        half = 0.5 * (hi - lo)
        return half * float(np.dot(w, func(lo + half * (x + 1.0))))

    stack = [(lo, hi, panel(lo, hi), 0) for lo, hi in zip(edges[:-1], edges[1:])]
    total = sum(item[2] for item in stack)
    value = 0.0
    error = 0.0

    while stack:
        lo, hi, coarse, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left, right = panel(lo, mid), panel(mid, hi)
        fine = left + right
        diff = abs(fine - coarse)
        share = tol * max(abs(total), 1.0) * (hi - lo) / (b - a)
        if diff <= share or diff <= 1e-15 * abs(fine):
            value += fine
            error += diff
            continue
        if depth >= max_depth:
            raise QuadratureFailure(
                f"no convergence on [{lo:.6g}, {hi:.6g}] after {depth} bisections",
                operation)
        stack.append((lo, mid, left, depth + 1))
        stack.append((mid, hi, right, depth + 1))

    logger.debug("adaptive_gauss on [%g, %g]: value=%.16g err=%.3g", a, b, value, error)
    return value, error


def tanh_sinh_rule(a: float, b: float, h: float,
                   min_gap: float = 1e-80) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Tanh-sinh (double exponential) nodes on [a, b].

    Besides nodes and weights, returns each node's exact distance to ``a`` and
    to ``b`` so that integrands singular at an endpoint never form ``x - a``
    by cancellation. Nodes closer than ``min_gap`` (relative) to an endpoint
    are dropped.

    Returns:
        Tuple of (nodes, weights, distance_to_a, distance_to_b)
    """
    # u = (pi/2) sinh(t) reaches -log(min_gap)/2 at the truncation point
    u_max = 0.5 * math.log(1.0 / min_gap)
    t_max = math.asinh(u_max / (0.5 * math.pi))
    k = np.arange(-math.floor(t_max / h), math.floor(t_max / h) + 1)
    t = k * h
    u = 0.5 * math.pi * np.sinh(t)
    cosh_u = np.cosh(u)
    length = b - a
    # 1 + tanh(u) = e^u / cosh(u), 1 - tanh(u) = e^-u / cosh(u)
    to_a = 0.5 * length * np.exp(u) / cosh_u
    to_b = 0.5 * length * np.exp(-u) / cosh_u
    weights = 0.5 * length * h * 0.5 * math.pi * np.cosh(t) / cosh_u ** 2
    keep = (to_a > min_gap * length) & (to_b > min_gap * length) & (weights > 0)
    nodes = np.where(to_a <= to_b, a + to_a, b - to_b)
    return nodes[keep], weights[keep], to_a[keep], to_b[keep]


def tanh_sinh(func: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray],
              a: float, b: float, tol: float = 1e-13, levels: int = 8,
              h0: float = 0.5, operation: str = 'tanh_sinh') -> Tuple[float, float]:
    """Integrate ``func(x, x - a, b - x)`` by tanh-sinh with step halving.

    Returns:
        Tuple of (value, error estimate from the last halving)
    """
    previous: Optional[float] = None
    h = h0
    for level in range(levels):
        x, w, da, db = tanh_sinh_rule(a, b, h)
        value = float(np.dot(w, func(x, da, db)))
        if previous is not None:
            error = abs(value - previous)
            logger.debug("tanh_sinh level %d h=%g value=%.16g diff=%.3g",
                         level, h, value, error)
            if error <= tol * abs(value):
                return value, error
        previous = value
        h *= 0.5
    raise QuadratureFailure(f"tanh-sinh did not reach rel. tol {tol:g} in {levels} levels",
                            operation)
