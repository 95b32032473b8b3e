"""
Moebius map algebra on unimodular 2x2 matrices.

A map z -> (a z + b) / (c z + d) is stored as its matrix ((a, b), (c, d)).
Products of the perturbed maps f_eps(z) = z/(1 - z) + eps^2 are never
rescaled; determinant drift is logged, not corrected.

The entry names follow the usual (numerator; denominator) rows: an F_k written
elsewhere as (A_k, C_k; B_k, D_k) is stored here as a=A_k, b=C_k, c=B_k, d=D_k.
"""
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple
import logging
import math

import numpy as np

from config import settings
from dynamics.errors import PoleError
from dynamics.precision import Precision, promote

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MoebiusMap:
    """Matrix ((a, b), (c, d)) acting as z -> (a z + b) / (c z + d)."""
    a: object
    b: object
    c: object
    d: object
    precision: Precision = Precision.STANDARD

    def __post_init__(self):
        if all(entry == 0 for entry in self.entries()):
            raise ValueError("Moebius matrix cannot be identically zero")

    @classmethod
    def identity(cls, precision: Precision = None) -> 'MoebiusMap':
        precision = Precision.coerce(precision)
        one, zero = precision.ctx.mpf(1), precision.ctx.mpf(0)
        return cls(one, zero, zero, one, precision)

    @classmethod
    def minus_identity(cls, precision: Precision = None) -> 'MoebiusMap':
        precision = Precision.coerce(precision)
        one, zero = precision.ctx.mpf(1), precision.ctx.mpf(0)
        return cls(-one, zero, zero, -one, precision)

    def entries(self) -> Tuple:
        return (self.a, self.b, self.c, self.d)

    def determinant(self):
        return self.a * self.d - self.b * self.c

    def trace(self):
        return self.a + self.d

    def norm(self) -> float:
        """Largest entry modulus."""
        return max(float(abs(e)) for e in self.entries())

    def with_precision(self, precision: Precision) -> 'MoebiusMap':
        ctx = precision.ctx
        return MoebiusMap(*(ctx.convert(e) for e in self.entries()), precision)

    def scaled(self, factor) -> 'MoebiusMap':
        """Same map, matrix multiplied by a nonzero scalar."""
        ctx = self.precision.ctx
        factor = ctx.convert(factor)
        return MoebiusMap(*(factor * e for e in self.entries()), self.precision)

    def __call__(self, z):
        return apply(self, z)

    def __matmul__(self, other: 'MoebiusMap') -> 'MoebiusMap':
        return compose(self, other)


def from_epsilon(eps, precision: Precision = None) -> MoebiusMap:
    """
    Matrix of f_eps(z) = z/(1 - z) + eps^2.

    Args:
        eps: Perturbation size, eps >= 0 (eps = 0 gives z/(1 - z))
        precision: Working precision, defaults to settings

    Returns:
        MoebiusMap ((1 - eps^2, eps^2), (-1, 1)), determinant exactly 1
    """
    precision = Precision.coerce(precision)
    if not math.isfinite(float(eps)):
        raise ValueError(f"eps must be finite, got {eps!r}")
    if eps < 0:
        raise ValueError(f"eps must be nonnegative, got {eps!r}")
    ctx = precision.ctx
    eps2 = ctx.mpf(eps) ** 2
    one = ctx.mpf(1)
    return MoebiusMap(one - eps2, eps2, -one, one, precision)


def compose(g: MoebiusMap, f: MoebiusMap) -> MoebiusMap:
    """Matrix product g . f, i.e. the map z -> g(f(z))."""
    precision = promote(g.precision, f.precision)
    if g.precision is not precision:
        g = g.with_precision(precision)
    if f.precision is not precision:
        f = f.with_precision(precision)
    return MoebiusMap(
        g.a * f.a + g.b * f.c,
        g.a * f.b + g.b * f.d,
        g.c * f.a + g.d * f.c,
        g.c * f.b + g.d * f.d,
        precision,
    )


def apply(m: MoebiusMap, z):
    """
    Evaluate (a z + b) / (c z + d).

    Raises:
        PoleError: if |c z + d| < POLE_RTOL * (|c z| + |d| + 1)
    """
    ctx = m.precision.ctx
    z = ctx.mpc(z)
    cz = m.c * z
    denominator = cz + m.d
    if abs(denominator) < settings.POLE_RTOL * (abs(cz) + abs(m.d) + 1):
        raise PoleError(z, denominator)
    return (m.a * z + m.b) / denominator


def inverse(m: MoebiusMap) -> MoebiusMap:
    """Adjugate ((d, -b), (-c, a)); equals the inverse for unimodular m."""
    return MoebiusMap(m.d, -m.b, -m.c, m.a, m.precision)


def map_distance_to_identity(m: MoebiusMap, grid: Iterable) -> float:
    """
    Sup-norm distance of the map from z -> z over a finite grid.

    Raises:
        ValueError: if the grid is empty
        PoleError: with the offending grid point
    """
    worst = None
    for z in grid:
        err = float(abs(apply(m, z) - m.precision.ctx.mpc(z)))
        worst = err if worst is None else max(worst, err)
    if worst is None:
        raise ValueError("grid must contain at least one point")
    return worst


def map_distance(m: MoebiusMap, other: MoebiusMap, grid: Iterable) -> float:
    """Sup-norm distance between two maps over a grid."""
    worst = None
    for z in grid:
        err = float(abs(apply(m, z) - apply(other, z)))
        worst = err if worst is None else max(worst, err)
    if worst is None:
        raise ValueError("grid must contain at least one point")
    return worst


def entrywise_distance(m: MoebiusMap, other: MoebiusMap) -> float:
    """Max |m_ij - other_ij| over the four matrix entries."""
    return max(float(abs(x - y)) for x, y in zip(m.entries(), other.entries()))


def acts_as_identity(m: MoebiusMap, rtol: float = None) -> bool:
    """
    Projective identity test: m is a scalar multiple of I.

    b and c must vanish and a must equal d, all relative to the largest entry.
    """
    if rtol is None:
        rtol = 64 * m.precision.unit_roundoff
    scale = m.norm()
    return (float(abs(m.b)) <= rtol * scale
            and float(abs(m.c)) <= rtol * scale
            and float(abs(m.a - m.d)) <= rtol * scale)


def product(factors: Sequence[MoebiusMap], pairwise: bool = False) -> MoebiusMap:
    """
    Compose factors in application order: factors[0] is applied first.

    Args:
        factors: Nonempty list f_1, ..., f_n
        pairwise: Multiply as a balanced tree instead of a left fold

    Returns:
        Matrix of f_n o ... o f_1
    """
    if not factors:
        raise ValueError("product of an empty factor list")
    if pairwise:
        result = _tree_product(list(factors))
    else:
        result = factors[0]
        for f in factors[1:]:
            result = compose(f, result)
    _check_determinant(result, len(factors))
    return result


def _tree_product(factors: List[MoebiusMap]) -> MoebiusMap:
    if len(factors) == 1:
        return factors[0]
    middle = len(factors) // 2
    return compose(_tree_product(factors[middle:]), _tree_product(factors[:middle]))


def power(m: MoebiusMap, n: int) -> MoebiusMap:
    """n-fold composition of m with itself by repeated squaring."""
    if n < 0:
        raise ValueError(f"power must be nonnegative, got {n}")
    result = MoebiusMap.identity(m.precision)
    base = m
    while n:
        if n & 1:
            result = compose(base, result)
        base = compose(base, base)
        n >>= 1
    return result


def _check_determinant(m: MoebiusMap, n_factors: int):
    drift = float(abs(m.determinant() - 1))
    tolerance = n_factors * m.precision.unit_roundoff * 10 * max(1.0, m.norm() ** 2)
    if drift > tolerance:
        logger.warning(f"Determinant drift {drift:.3e} exceeds {tolerance:.3e} after {n_factors} factors")


def default_grid(center: complex = 0j, radius: float = 0.5, points_per_side: int = 10) -> Tuple[complex, ...]:
    """
    Uniform points_per_side x points_per_side grid on the bounding square of the
    closed disk |z - center| <= radius, intersected with the disk.
    """
    if radius <= 0 or points_per_side < 1:
        raise ValueError("grid needs radius > 0 and points_per_side >= 1")
    center = complex(center)
    if points_per_side == 1:
        return (center,)
    axis = np.linspace(-radius, radius, points_per_side)
    xs, ys = np.meshgrid(axis, axis, indexing='xy')
    points = (xs + 1j * ys).ravel()
    inside = points[np.abs(points) <= radius * (1 + 1e-12)]
    if inside.size == 0:
        raise ValueError("grid is empty")
    return tuple(complex(center + p) for p in inside)
