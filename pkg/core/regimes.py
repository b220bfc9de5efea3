"""Parameter packs, exponent rules and the closed-form sharp constants."""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

from core.errors import (
    DimensionTooSmall, QRequired, RegimeViolation, require_finite,
)
from core.sphere import mu_gn, surface_measure

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Regime:
    """Local inequality parameters (N, p, alpha).

    ``local=True`` enforces p > 1 and N > p + alpha on construction.
    """

    N: int
    p: float
    alpha: float = 0.0
    local: bool = True

    def __post_init__(self):
        require_finite('Regime', N=self.N, p=self.p, alpha=self.alpha)
        if int(self.N) != self.N or self.N < 1:
            raise RegimeViolation(f"N must be an integer >= 1 (got {self.N})", 'Regime')
        object.__setattr__(self, 'N', int(self.N))
        if self.local:
            if not self.p > 1:
                raise RegimeViolation(f"p > 1 violated (p = {self.p:g})", 'Regime')
            if not self.N > self.p + self.alpha:
                raise RegimeViolation(
                    f"N > p + alpha violated ({self.N} <= {self.p + self.alpha:g})", 'Regime')

    @property
    def degree(self) -> float:
        """Homogeneity degree p + alpha of the left weight."""
        return self.p + self.alpha

    @property
    def beta(self) -> float:
        """Exponent N - alpha - 1 of the one-dimensional Hardy step."""
        return self.N - self.alpha - 1

    @property
    def kappa(self) -> float:
        """Decay (N - p - alpha) / p of the formal optimizer r^-kappa."""
        return (self.N - self.p - self.alpha) / self.p

    def require_sphere(self, operation: str) -> None:
        if self.N < 2:
            raise RegimeViolation(f"N >= 2 required (got {self.N})", operation)

    def require_positive_degree(self, operation: str) -> None:
        if not self.degree > 0:
            raise RegimeViolation(f"p + alpha > 0 violated (p + alpha = {self.degree:g})",
                                  operation)


@dataclass(frozen=True)
class FracRegime:
    """Fractional parameters (N, s, p) with 0 < s < 1, p >= 1 and N > sp."""

    N: int
    s: float
    p: float

    def __post_init__(self):
        require_finite('FracRegime', N=self.N, s=self.s, p=self.p)
        if int(self.N) != self.N or self.N < 1:
            raise RegimeViolation(f"N must be an integer >= 1 (got {self.N})", 'FracRegime')
        object.__setattr__(self, 'N', int(self.N))
        if not 0 < self.s < 1:
            raise RegimeViolation(f"0 < s < 1 violated (s = {self.s:g})", 'FracRegime')
        if not self.p >= 1:
            raise RegimeViolation(f"p >= 1 violated (p = {self.p:g})", 'FracRegime')
        if not self.N > self.sp:
            raise RegimeViolation(f"N > s*p violated ({self.N} <= {self.sp:g})", 'FracRegime')

    @property
    def sp(self) -> float:
        return self.s * self.p

    @property
    def kappa(self) -> float:
        """Decay (N - sp) / p of the formal optimizer r^-kappa."""
        return (self.N - self.sp) / self.p


class CaseId(str, Enum):
    CASE1 = 'Case1'
    CASE2 = 'Case2'
    CASE3 = 'Case3'


@dataclass(frozen=True)
class Case13:
    """Classification of (N, alpha) for the p = 2 sharp weighted inequality."""

    case_id: CaseId
    q: float
    N: int
    alpha: float
    threshold_lhs: float
    threshold_rhs: float
    gamma0: Optional[float] = None
    also: Tuple['Case13', ...] = field(default=(), compare=False)
    statement_case: Optional[CaseId] = None

    @property
    def t(self) -> float:
        """Sphere Lebesgue exponent t = 2q/(q-1) paired with q by Hoelder."""
        return 2.0 * self.q / (self.q - 1.0)

    @property
    def beta(self) -> float:
        """The beta used in the proof for this case."""
        if self.case_id is CaseId.CASE2:
            return (self.N - 1) * (self.N - 3) / 4.0
        return (self.N - self.alpha - 2) ** 2 / 4.0

    def mu_at_beta(self) -> float:
        """mu(beta) at the proof's beta; equals beta in every admissible case."""
        return mu_gn(self.beta, self.N, self.t)

    def applicable(self) -> List['Case13']:
        return [self, *self.also]

    def describe(self) -> Dict:
        return {
            'case': self.case_id.value,
            'q': self.q,
            'gamma0': self.gamma0,
            'threshold_lhs': self.threshold_lhs,
            'threshold_rhs': self.threshold_rhs,
            'statement_threshold_rhs': (1 + self.alpha) ** 2,
            'statement_case': self.statement_case.value if self.statement_case else None,
            'also': [c.case_id.value for c in self.also],
            'beta': self.beta,
        }


def admissible_q(N: int, p: float, user_q: Optional[float] = None) -> float:
    """Lebesgue exponent of g for the q(N, p) rule.

    (N-1)/p below the threshold p = N-1, 1 above it; at p = N-1 any q > 1
    works and the caller must choose.
    """
    require_finite('admissible_q', N=N, p=p, user_q=user_q)
    if N < 2:
        raise RegimeViolation(f"N >= 2 required (got {N})", 'admissible_q')
    if not p > 1:
        raise RegimeViolation(f"p > 1 violated (p = {p:g})", 'admissible_q')
    if math.isclose(p, N - 1, rel_tol=1e-12):
        if user_q is None or not user_q > 1:
            raise QRequired(f"p = N - 1 = {N - 1} needs an explicit q > 1 (got {user_q})",
                            'admissible_q')
        return float(user_q)
    if p < N - 1:
        return (N - 1) / p
    return 1.0


def sphere_sobolev_exponent(N: int, p: float, r0: Optional[float] = None) -> float:
    """Target exponent of the Sobolev embedding on S^{N-1} for H^p_1."""
    if p < N - 1 and not math.isclose(p, N - 1, rel_tol=1e-12):
        return (N - 1) * p / (N - p - 1)
    if math.isclose(p, N - 1, rel_tol=1e-12):
        if r0 is None or not r0 > 1:
            raise QRequired(f"p = N - 1 needs an explicit r0 > 1 (got {r0})",
                            'sphere_sobolev_exponent')
        return float(r0)
    return math.inf


def hoelder_exponent(N: int, p: float, q: float) -> float:
    """Exponent r with int g|u|^p <= ||g||_q ||u||_r^p: r = p q/(q-1), or infinity at q = 1."""
    if q <= 1:
        return math.inf
    return p * q / (q - 1.0)


def ckn_sharp_constant(regime: Regime) -> float:
    """(p / (N - p - alpha))^p."""
    N, p, alpha = regime.N, regime.p, regime.alpha
    if not N > p + alpha:
        raise RegimeViolation(f"N > p + alpha violated ({N} <= {p + alpha:g})",
                              'ckn_sharp_constant')
    return (p / (N - p - alpha)) ** p


def _case13_thresholds(N: int, alpha: float) -> Tuple[float, float]:
    return 2.0 * N * alpha, (N - alpha - 2.0) ** 2


def _build_case(case_id: CaseId, N: int, alpha: float) -> Case13:
    lhs, rhs = _case13_thresholds(N, alpha)
    if case_id is CaseId.CASE1:
        q = rhs / (2.0 * (N - 1)) + 1.0
        g0 = None
    else:
        q = (N - 1) / 2.0
        g0 = gamma0(N, alpha) if case_id is CaseId.CASE2 else None
    return Case13(case_id, q, N, alpha, lhs, rhs, gamma0=g0)


def _statement_case(N: int, alpha: float) -> Optional[CaseId]:
    """Case under the threshold 2N alpha < (1 + alpha)^2 written in the theorem statement."""
    below = 2.0 * N * alpha < (1.0 + alpha) ** 2
    if below:
        return CaseId.CASE1
    return CaseId.CASE3 if N > 3 else None


def classify_case13(N: int, alpha: float, requested: Optional[CaseId] = None) -> Case13:
    """Classify (N, alpha) with the threshold 2N alpha vs (N - alpha - 2)^2.

    Case1 is primary whenever it applies; Case2 is then listed under ``also``
    when N > 3. With ``requested`` the named case is returned or the reason it
    does not apply is raised.
    """
    require_finite('classify_case13', N=N, alpha=alpha)
    if N < 2:
        raise RegimeViolation(f"N >= 2 required (got {N})", 'classify_case13')
    if not N > 2 + alpha:
        raise RegimeViolation(f"N > 2 + alpha violated ({N} <= {2 + alpha:g})",
                              'classify_case13')

    lhs, rhs = _case13_thresholds(N, alpha)
    below = lhs < rhs
    statement = _statement_case(N, alpha)

    if below:
        cases = [_build_case(CaseId.CASE1, N, alpha)]
        if N > 3:
            cases.append(_build_case(CaseId.CASE2, N, alpha))
    else:
        if N <= 3:
            raise DimensionTooSmall(
                f"2N alpha >= (N - alpha - 2)^2 needs N > 3 (got N = {N})", 'classify_case13')
        cases = [_build_case(CaseId.CASE3, N, alpha)]

    if statement is not cases[0].case_id:
        logger.warning("p = 2 thresholds disagree at N=%s alpha=%g: 2N alpha vs (1 + alpha)^2 "
                       "gives %s, vs (N - alpha - 2)^2 gives %s", N, alpha,
                       statement.value if statement else 'none', cases[0].case_id.value)

    if requested is not None:
        requested = CaseId(requested)
        for case in cases:
            if case.case_id is requested:
                return Case13(case.case_id, case.q, N, alpha, lhs, rhs, case.gamma0,
                              statement_case=statement)
        if requested in (CaseId.CASE2, CaseId.CASE3) and N <= 3:
            raise DimensionTooSmall(f"{requested.value} needs N > 3 (got N = {N})",
                                    'classify_case13')
        relation = '<' if below else '>='
        raise RegimeViolation(
            f"{requested.value} does not apply: 2N alpha = {lhs:g} {relation} "
            f"(N - alpha - 2)^2 = {rhs:g}", 'classify_case13')

    primary = cases[0]
    return Case13(primary.case_id, primary.q, N, alpha, lhs, rhs, primary.gamma0,
                  also=tuple(cases[1:]), statement_case=statement)


def gamma0(N: int, alpha: float) -> float:
    """(N - alpha - 2)^2 / ((N - 1)(N - 3)).

    The combined p = 2 inequality holds for any positive gamma0; it is a
    strengthening only when gamma0 > 1, which needs (N - alpha - 2)^2 above
    (N - 1)(N - 3) and not merely above 2N alpha.
    """
    require_finite('gamma0', N=N, alpha=alpha)
    if N <= 3:
        raise DimensionTooSmall(f"N > 3 required (got N = {N})", 'gamma0')
    lhs, rhs = _case13_thresholds(N, alpha)
    if not lhs < rhs:
        raise RegimeViolation(f"2N alpha < (N - alpha - 2)^2 violated ({lhs:g} >= {rhs:g})",
                              'gamma0')
    value = rhs / ((N - 1) * (N - 3))
    if value <= 1:
        logger.warning("gamma0 = %.6g <= 1 at N=%s alpha=%g", value, N, alpha)
    return value


def thm13_beta(case: Case13) -> float:
    """beta used for ``case`` in the p = 2 argument, checked against mu(beta) = beta."""
    beta = case.beta
    mu = case.mu_at_beta()
    if not math.isclose(mu, beta, rel_tol=1e-12, abs_tol=1e-15):
        raise RegimeViolation(f"mu(beta) = {mu:g} differs from beta = {beta:g}", 'thm13_beta')
    return beta


def thm13_constant(N: int, alpha: float, g_norm: float, q: float) -> float:
    """4 ||g||_q / ((N - alpha - 2)^2 |S^{N-1}|^{1/q})."""
    require_finite('thm13_constant', g_norm=g_norm, q=q)
    if not N > 2 + alpha:
        raise RegimeViolation(f"N > 2 + alpha violated ({N} <= {2 + alpha:g})",
                              'thm13_constant')
    if g_norm < 0:
        raise RegimeViolation(f"g_norm >= 0 violated ({g_norm:g})", 'thm13_constant')
    return 4.0 * g_norm / ((N - alpha - 2.0) ** 2 * surface_measure(N) ** (1.0 / q))


def thm11_q(N: int) -> float:
    """q = (N - 2)^2 / (2(N - 1)) + 1 of the alpha = 0 sharp inequality."""
    return (N - 2.0) ** 2 / (2.0 * (N - 1)) + 1.0


def thm11_constant(N: int, g_norm: float) -> float:
    """The alpha = 0 form 4 ||g||_q / ((N - 2)^2 |S^{N-1}|^{1/q}), N >= 3."""
    if N < 3:
        raise DimensionTooSmall(f"N >= 3 required (got N = {N})", 'thm11_constant')
    return thm13_constant(N, 0.0, g_norm, thm11_q(N))


def thm31_constant(regime: Regime, g_norm: float) -> float:
    """(p/(N-p-alpha))^p ||g||_{N/(p+alpha)} / |S^{N-1}|^{(p+alpha)/N}."""
    require_finite('thm31_constant', g_norm=g_norm)
    regime.require_positive_degree('thm31_constant')
    if g_norm < 0:
        raise RegimeViolation(f"g_norm >= 0 violated ({g_norm:g})", 'thm31_constant')
    exponent = regime.degree / regime.N
    return ckn_sharp_constant(regime) * g_norm / surface_measure(regime.N) ** exponent


def thm31_q(regime: Regime) -> float:
    return regime.N / regime.degree


def frac_constant(frac: FracRegime, g_norm: float, lam: float) -> float:
    """Lambda_{N,s,p} ||g||_{N/sp} / |S^{N-1}|^{sp/N}."""
    require_finite('frac_constant', g_norm=g_norm, lam=lam)
    if g_norm < 0:
        raise RegimeViolation(f"g_norm >= 0 violated ({g_norm:g})", 'frac_constant')
    if not lam > 0:
        raise RegimeViolation(f"Lambda must be > 0 (got {lam:g})", 'frac_constant')
    return lam * g_norm / surface_measure(frac.N) ** (frac.sp / frac.N)


def frac_q(frac: FracRegime) -> float:
    return frac.N / frac.sp
