"""
Working precision for every numerical operation.

STANDARD runs on mpmath's float context (binary64), EXTENDED on a private
multiprecision context with at least 128 significand bits. Both contexts
expose the same API (mpf, mpc, cos, sin, sqrt, pi, arg), so numerical code is
written once against `precision.ctx`.
"""
from enum import Enum
import logging

import mpmath
from mpmath.ctx_mp import MPContext

from config import settings

logger = logging.getLogger(__name__)

# Private instance so callers changing mpmath.mp.prec never affect us
_EXTENDED_CTX = MPContext()
_EXTENDED_CTX.prec = settings.EXTENDED_PRECISION_BITS


class Precision(str, Enum):
    """Arithmetic mode: binary64 or extended (>= 128-bit significand)."""
    STANDARD = 'std'
    EXTENDED = 'ext'

    @property
    def ctx(self):
        """mpmath context implementing this precision."""
        return mpmath.fp if self is Precision.STANDARD else _EXTENDED_CTX

    @property
    def bits(self) -> int:
        return 53 if self is Precision.STANDARD else _EXTENDED_CTX.prec

    @property
    def unit_roundoff(self) -> float:
        """u = 2^-p for a p-bit significand."""
        return 2.0 ** (-self.bits)

    @classmethod
    def default(cls) -> 'Precision':
        return cls(settings.PRECISION)

    @classmethod
    def coerce(cls, value) -> 'Precision':
        """Accept None (settings default), a Precision or its string value."""
        if value is None:
            return cls.default()
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


def promote(*precisions: Precision) -> Precision:
    """The finest of the given precisions."""
    if any(p is Precision.EXTENDED for p in precisions):
        return Precision.EXTENDED
    return Precision.STANDARD

