"""Error kinds raised by hardylab.

Every error carries a stable ``kind`` string (used in reports and by the CLI)
and the name of the operation that raised it.
"""

import math
from typing import Optional


class HardyLabError(ValueError):
    """Base class for all hardylab errors."""

    kind = 'error'

    def __init__(self, message: str, operation: Optional[str] = None):
        self.operation = operation
        prefix = f"{operation}: " if operation else ""
        super().__init__(f"{prefix}{message}")


class RegimeViolation(HardyLabError):
    kind = 'regime-violation'


class QRequired(HardyLabError):
    kind = 'q-required'


class DimensionTooSmall(HardyLabError):
    kind = 'dimension-too-small'


class MuUndefined(HardyLabError):
    kind = 'mu-undefined'


class ExponentOutOfRange(HardyLabError):
    kind = 'exponent-out-of-range'


class QuadratureFailure(HardyLabError):
    kind = 'quadrature-failure'


class QuadratureInconsistent(HardyLabError):
    kind = 'quadrature-inconsistent'


class KernelSingularity(HardyLabError):
    kind = 'kernel-singularity'


class InvalidLevel(HardyLabError):
    kind = 'invalid-level'


class NonnegRequired(HardyLabError):
    kind = 'nonneg-required'


class ShapeMismatch(HardyLabError):
    kind = 'shape-mismatch'


class SupportRequired(HardyLabError):
    kind = 'support-required'


class FamilyInvalid(HardyLabError):
    kind = 'family-invalid'


class ConfigError(HardyLabError):
    kind = 'config-error'


def require_finite(operation: str, **values: float) -> None:
    """Reject NaN and infinite arguments, naming the first offender."""
    for name, value in values.items():
        if value is None:
            continue
        if not math.isfinite(float(value)):
            raise RegimeViolation(f"{name} must be finite (got {value})", operation)
