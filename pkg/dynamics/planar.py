"""
Skew products (z, w) -> (z/(1 - z) + coupling * w, g(w)) with g(w) = w - w^2 + w^3.

H uses coupling pi^2/4, L uses pi^2/8. Along a w-orbit in the parabolic basin
of g the fiber maps are f_eps with eps^2 = coupling * w_k, so the z-dynamics
is a non-autonomous composition of the perturbed maps.
"""
from dataclasses import dataclass
from enum import Enum
from typing import List, Sequence, Tuple
import cmath
import logging
import math

from config import settings
from dynamics.errors import BasinError, DivergenceError, Indeterminate
from dynamics.moebius import MoebiusMap, apply
from dynamics.precision import Precision
from dynamics.sequences import generate
from reports.schemas import Family, FamilyParams, PlanarOrbitReport

logger = logging.getLogger(__name__)

DEFAULT_MAX_ITER = 10_000


class BasinStatus(str, Enum):
    INTERIOR = 'interior'
    BOUNDARY = 'boundary'
    OUTSIDE = 'outside'


@dataclass(frozen=True)
class PlanarMap:
    """(z, w) -> (h_w(z), g(w)) with h_w(z) = z/(1 - z) + coupling * w."""
    name: str
    coupling: float
    precision: Precision = Precision.STANDARD

    @classmethod
    def H(cls, precision: Precision = None) -> 'PlanarMap':
        return cls('H', math.pi ** 2 / 4, Precision.coerce(precision))

    @classmethod
    def L(cls, precision: Precision = None) -> 'PlanarMap':
        return cls('L', math.pi ** 2 / 8, Precision.coerce(precision))

    @classmethod
    def by_name(cls, name: str, precision: Precision = None) -> 'PlanarMap':
        factories = {'H': cls.H, 'L': cls.L}
        if name not in factories:
            raise ValueError(f"planar map must be H or L, got {name!r}")
        return factories[name](precision)

    @property
    def multiplier(self) -> int:
        """Iterate-count multiplier in the matching corollary (1 for H, 2 for L)."""
        return 1 if self.name == 'H' else 2

    def fiber(self, w) -> MoebiusMap:
        """Matrix of h_w; equals from_epsilon(sqrt(coupling * w)) for real w > 0."""
        ctx = self.precision.ctx
        s = ctx.mpf(self.coupling) * ctx.mpc(w)
        one = ctx.mpf(1)
        return MoebiusMap(one - s, s, -one, one, self.precision)


def g(w):
    return w - w * w + w * w * w


def g_iterate(w, k: int):
    """
    k-fold iterate of g.

    Raises:
        DivergenceError: if some |w_j| exceeds DIVERGENCE_RADIUS
    """
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    w = complex(w)
    for step in range(1, k + 1):
        w = g(w)
        if abs(w) > settings.DIVERGENCE_RADIUS:
            raise DivergenceError(w, step)
    return w


def planar_apply(planar_map: PlanarMap, z, w) -> Tuple[complex, complex]:
    """
    One application of the skew product.

    Raises:
        PoleError: if z is the fiber pole
    """
    return complex(apply(planar_map.fiber(w), z)), g(complex(w))


def basin_status(w, max_iter: int = DEFAULT_MAX_ITER) -> BasinStatus:
    """
    Classify w against the parabolic basin of g.

    INTERIOR once |w_j| < BASIN_RADIUS with Re(1/w_j) > 0, OUTSIDE once the
    orbit leaves DIVERGENCE_RADIUS, BOUNDARY for the fixed point w = 0.

    Raises:
        Indeterminate: if neither happens within max_iter steps
    """
    if max_iter < 100:
        raise ValueError(f"max_iter must be at least 100, got {max_iter}")
    w0 = complex(w)
    if w0 == 0:
        return BasinStatus.BOUNDARY
    current = w0
    for step in range(max_iter + 1):
        if current == 0:
            return BasinStatus.BOUNDARY
        if abs(current) < settings.BASIN_RADIUS and (1 / current).real > 0:
            logger.debug(f"w = {w0!r} entered the attracting petal at step {step}")
            return BasinStatus.INTERIOR
        current = g(current)
        if abs(current) > settings.DIVERGENCE_RADIUS:
            return BasinStatus.OUTSIDE
    raise Indeterminate(w0, current, max_iter)


def basin_test(w, max_iter: int = DEFAULT_MAX_ITER) -> bool:
    """True for interior points and the boundary fixed point w = 0."""
    return basin_status(w, max_iter) in (BasinStatus.INTERIOR, BasinStatus.BOUNDARY)


def corollary_experiment(planar_map: PlanarMap, z, w, n_values: Sequence[int],
                         multiplier: int = None) -> PlanarOrbitReport:
    """
    Deviation of map^(multiplier*(2n+1))(z, g^(multiplier*n^2)(w)) from (z, 0).

    multiplier = 1 gives the H schedule (2n+1 after n^2), 2 the L schedule
    (4n+2 after 2n^2).

    Raises:
        BasinError: if w is not in the parabolic basin
    """
    multiplier = multiplier or planar_map.multiplier
    try:
        status = basin_status(w)
    except Indeterminate as e:
        raise BasinError(w, str(e)) from e
    if status is BasinStatus.OUTSIDE:
        raise BasinError(w, "orbit escapes")

    z0 = complex(z)
    ns = sorted(n_values)
    pre_counts, lengths, dev_z, dev_w, deviations = [], [], [], [], []
    current_w, done = complex(w), 0
    for n in ns:
        pre = multiplier * n * n
        current_w = g_iterate(current_w, pre - done)
        done = pre
        length = multiplier * (2 * n + 1)
        zz, ww = z0, current_w
        for _ in range(length):
            zz, ww = planar_apply(planar_map, zz, ww)
        pre_counts.append(pre)
        lengths.append(length)
        dev_z.append(abs(zz - z0))
        dev_w.append(abs(ww))
        deviations.append(max(dev_z[-1], dev_w[-1]))
        logger.debug(f"{planar_map.name} n={n}: deviation {deviations[-1]:.6e}")

    logger.info(f"{planar_map.name} orbit from ({z0}, {complex(w)}): deviations {deviations}")
    return PlanarOrbitReport(
        map_name=planar_map.name, coupling=planar_map.coupling, z=z0, w=complex(w),
        multiplier=multiplier, basin_flag=status is not BasinStatus.OUTSIDE,
        basin_status=status.value, n_values=ns, pre_iterates=pre_counts,
        orbit_lengths=lengths, dev_z=dev_z, dev_w=dev_w, deviations=deviations,
    )


def orbit_epsilons(planar_map: PlanarMap, w, count: int) -> List[complex]:
    """Fiber perturbation sizes sqrt(coupling * w_k) for k = 0..count-1."""
    values = []
    current = complex(w)
    for _ in range(count):
        values.append(cmath.sqrt(planar_map.coupling * current))
        current = g(current)
    return values


def fiber_identification_error(planar_map: PlanarMap, n: int) -> float:
    """
    max_k |eps_k(orbit) - eps_k(example)| for the orbit started at 1/w = n^2 (H)
    or 1/w = 2n^2 (L), compared with Example 1 or Example 2 at m = n.
    """
    if planar_map.name == 'H':
        w0, family = 1.0 / (n * n), Family.EXAMPLE1
    else:
        w0, family = 1.0 / (2 * n * n), Family.EXAMPLE2
    example = generate(family, FamilyParams(m=n))
    orbit = orbit_epsilons(planar_map, w0, example.N)
    return max(abs(o - float(e)) for o, e in zip(orbit, example.eps))
