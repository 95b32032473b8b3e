"""
Generators for every eps-sequence family and the N*S / band condition checker.

A sequence eps_1..eps_N drives the maps f_k(z) = z/(1 - z) + eps_k^2. The
checker measures the two sufficient conditions

    N * |sum_k a_k U_k^2| <= A        and        max_k N^3 |a_k| <= A

with a_k = 2 - eps_k^2 - 2cos(pi/N) and U_k = sin(k pi/N) / sin(pi/N).
"""
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple
import logging

import numpy as np

from config import settings
from dynamics.errors import IncompatibleN, UnsupportedFamily
from dynamics.precision import Precision, promote
from dynamics.recurrences import TraceSequence
from dynamics.summation import CompensatedSum
from reports.schemas import ConditionReport, Family, FamilyParams, ReductionReport

logger = logging.getLogger(__name__)

# Families with eps_k = pi/N + alpha(k)/N^2 + O(1/N^3) and bounded alpha
ALPHA_FAMILIES = frozenset({
    Family.CONSTANT, Family.ALPHA_FORM, Family.EXAMPLE1, Family.EXAMPLE2,
    Family.THEOREM5_LINEAR, Family.COUNTEREXAMPLE,
})

# Used when neither the caller nor settings give a threshold
DEFAULT_A_THRESHOLD = 50.0


@dataclass(frozen=True)
class EpsilonSequence:
    """eps_1..eps_N (eps[k - 1] holds eps_k) tagged with its family."""
    N: int
    eps: Tuple
    family: Family
    params: FamilyParams
    precision: Precision = Precision.STANDARD

    def __post_init__(self):
        if len(self.eps) != self.N:
            raise ValueError(f"expected {self.N} values, got {len(self.eps)}")
        for k, e in enumerate(self.eps, start=1):
            if not 0 < e < 1:
                raise ValueError(f"eps_{k} = {float(e)!r} outside (0, 1)")


def _require_m(family: Family, params: FamilyParams, N: Optional[int], period: int, offset: int) -> Tuple[int, int]:
    """Resolve (m, N) for families defined on N = period*m + offset."""
    constraint = f"N = {period}m+{offset}"
    if params.m is not None:
        expected = period * params.m + offset
        if N is not None and N != expected:
            raise IncompatibleN(family.value, N, f"{constraint} with m = {params.m}")
        return params.m, expected
    if N is None:
        raise IncompatibleN(family.value, 0, f"{constraint} (give m or N)")
    if N < offset or (N - offset) % period:
        raise IncompatibleN(family.value, N, constraint)
    return (N - offset) // period, N


def generate(family, params: FamilyParams = None, N: int = None, precision: Precision = None) -> EpsilonSequence:
    """
    Build the sequence defined by a family's closed-form formula.

    Args:
        family: Family or its name
        params: Family parameters
        N: Sequence length (may be derived from m for Example1/Example2)
        precision: Working precision

    Returns:
        EpsilonSequence

    Raises:
        IncompatibleN: if N violates the family's size or parity constraint
        ValueError: if required parameters are missing
    """
    family = Family(family)
    params = params or FamilyParams()
    precision = Precision.coerce(precision)
    ctx = precision.ctx
    pi = ctx.pi

    if family is Family.EXAMPLE1:
        m, N = _require_m(family, params, N, 2, 1)
        eps = [pi / (2 * ctx.sqrt(m * m + k)) for k in range(1, N + 1)]
    elif family is Family.EXAMPLE2:
        m, N = _require_m(family, params, N, 4, 2)
        eps = [pi / (2 * ctx.sqrt(4 * m * m + 2 * k)) for k in range(1, N + 1)]
    elif family is Family.CUSTOM:
        if not params.values:
            raise ValueError("Custom family needs explicit values")
        if N is not None and N != len(params.values):
            raise IncompatibleN(family.value, N, f"N = len(values) = {len(params.values)}")
        N = len(params.values)
        eps = [ctx.mpf(v) for v in params.values]
    else:
        if N is None or N < 1:
            raise IncompatibleN(family.value, N or 0, "N >= 1")
        eps = _closed_form(family, params, N, precision)

    if any(not 0 < e < 1 for e in eps):
        raise IncompatibleN(family.value, N, "N large enough that every eps_k lies in (0, 1)")

    logger.debug(f"Generated {family.value} sequence with N={N}")
    return EpsilonSequence(N, tuple(eps), family, params, precision)


def _closed_form(family: Family, params: FamilyParams, N: int, precision: Precision) -> List:
    ctx = precision.ctx
    pi = ctx.pi
    base = pi / N
    ks = range(1, N + 1)

    if family is Family.CONSTANT:
        return [base] * N
    if family is Family.COUNTEREXAMPLE:
        # eps^2 = 2 - 2cos(pi/(N+1)) written without cancellation
        return [2 * ctx.sin(pi / (2 * (N + 1)))] * N
    if family is Family.EXAMPLE3:
        third = ctx.mpf(1) / 3
        return [pi / ctx.mpf(N ** 3 + k) ** third for k in ks]
    if family is Family.THEOREM5_LINEAR:
        if params.A is None:
            raise ValueError("Theorem5Linear needs parameter A")
        A = ctx.mpf(params.A)
        return [base + A * (ctx.mpf(-1) / N ** 2 + ctx.mpf(2 * k) / N ** 3) for k in ks]
    if family is Family.ALPHA_FORM:
        coeffs = [ctx.mpf(c) for c in (params.alpha_coeffs or [0.0])]
        tail = ctx.mpf(params.tail)
        return [base + _alpha_polynomial(coeffs, ctx.mpf(2 * k) / N - 1) / N ** 2 + tail / N ** 3 for k in ks]
    if family is Family.THEOREM7_BAND:
        if params.seed is None:
            raise ValueError("Theorem7Band needs a seed")
        C = params.C if params.C is not None else 1.0
        rng = np.random.default_rng(params.seed)
        draws = rng.uniform(-1.0, 1.0, size=N)
        half_width = ctx.mpf(C) / N ** 3
        return [base + ctx.mpf(float(u)) * half_width for u in draws]
    raise ValueError(f"no closed form for {family.value}")


def _alpha_polynomial(coeffs: Sequence, s):
    value = 0 * s
    for c in reversed(coeffs):
        value = value * s + c
    return value


def _calculation_precision(seq: EpsilonSequence) -> Precision:
    if seq.N > settings.EXTENDED_THRESHOLD_N:
        return Precision.EXTENDED
    return seq.precision


def promoted(seq: EpsilonSequence, precision: Precision) -> EpsilonSequence:
    """
    seq at the finer of its own precision and `precision`.

    Binary64 values convert exactly, so the copy describes the same maps.
    """
    target = promote(seq.precision, precision)
    if target is seq.precision:
        return seq
    ctx = target.ctx
    return replace(seq, eps=tuple(ctx.convert(e) for e in seq.eps), precision=target)


def at_calculation_precision(seq: EpsilonSequence) -> EpsilonSequence:
    """seq itself, or its exact extended-precision copy when N > EXTENDED_THRESHOLD_N."""
    return promoted(seq, _calculation_precision(seq))


def a_coefficients(seq: EpsilonSequence) -> TraceSequence:
    """
    Traces t_k = 2 - eps_k^2 and deviations a_k = t_k - 2cos(pi/N).

    a_k is evaluated as (2 sin(theta/2) - eps_k)(2 sin(theta/2) + eps_k), which
    equals 2 - 2cos(theta) - eps_k^2, at extended precision for
    N > EXTENDED_THRESHOLD_N, then rounded to the sequence's precision.
    """
    calc = _calculation_precision(seq)
    cctx, wctx = calc.ctx, seq.precision.ctx
    N = seq.N
    theta = cctx.pi / N
    chord = 2 * cctx.sin(theta / 2)
    x = 2 * cctx.cos(theta)

    t, a = [], []
    for e in seq.eps:
        e = cctx.mpf(e)
        t.append(wctx.mpf(2 - e * e))
        a.append(wctx.mpf((chord - e) * (chord + e)))
    return TraceSequence(N, tuple(t), wctx.mpf(x), wctx.mpf(theta), tuple(a), seq.precision)


def chebyshev_squares(N: int, precision: Precision) -> List:
    """U_k^2 = sin(k pi/N)^2 / sin(pi/N)^2 for k = 1..N."""
    ctx = precision.ctx
    theta = ctx.pi / N
    s1 = ctx.sin(theta)
    return [(ctx.sin(k * theta) / s1) ** 2 for k in range(1, N + 1)]


def resolve_threshold(A_threshold: Optional[float]) -> float:
    if A_threshold is not None:
        return float(A_threshold)
    configured = settings.a_threshold()
    return configured if configured is not None else DEFAULT_A_THRESHOLD


def check_conditions(seq: EpsilonSequence, A_threshold: float = None) -> ConditionReport:
    """
    Evaluate the N*S and band conditions.

    S is the a_k form; S_angle uses pi^2/N^2 - eps_k^2. Verdicts use the a_k form.
    """
    A = resolve_threshold(A_threshold)
    calc = promote(_calculation_precision(seq), seq.precision)
    ctx = calc.ctx
    N = seq.N
    ts = a_coefficients(seq)
    squares = chebyshev_squares(N, calc)
    base2 = (ctx.pi / N) ** 2

    s_sum = CompensatedSum(ctx.mpf(0))
    angle_sum = CompensatedSum(ctx.mpf(0))
    band = band_angle = 0.0
    for k in range(N):
        ak = ctx.mpf(ts.a[k])
        e = ctx.mpf(seq.eps[k])
        angle_term = base2 - e * e
        s_sum.add(ak * squares[k])
        angle_sum.add(angle_term * squares[k])
        band = max(band, float(N ** 3 * abs(ak)))
        band_angle = max(band_angle, float(N ** 3 * abs(angle_term)))

    S = float(abs(s_sum.value))
    S_angle = float(abs(angle_sum.value))
    pairing = alpha_pairing(seq) if seq.family in ALPHA_FAMILIES else None

    report = ConditionReport(
        family=seq.family, N=N, precision=seq.precision,
        S=S, S_angle=S_angle, S_difference=S - S_angle, S_scaled=N * S,
        band=band, band_angle=band_angle, alpha_pairing=pairing,
        A_threshold=A, verdict_S=N * S <= A, verdict_band=band <= A,
    )
    logger.info(
        f"{seq.family.value} N={N}: N*S={report.S_scaled:.6g} band={band:.6g} "
        f"verdict_S={'PASS' if report.verdict_S else 'FAIL'} "
        f"verdict_band={'PASS' if report.verdict_band else 'FAIL'}"
    )
    return report


def alpha_values(seq: EpsilonSequence) -> List:
    """alpha(k) = N^2 (eps_k - pi/N), at extended precision."""
    ctx = Precision.EXTENDED.ctx
    N = seq.N
    base = ctx.pi / N
    return [N * N * (ctx.mpf(e) - base) for e in seq.eps]


def alpha_pairing(seq: EpsilonSequence) -> float:
    """
    max_{1<=k<=N-1} N |alpha(k) + alpha(N-k)|.

    Raises:
        UnsupportedFamily: for families without an alpha-form
    """
    if seq.family not in ALPHA_FAMILIES:
        raise UnsupportedFamily(seq.family.value, "alpha_pairing")
    alpha = alpha_values(seq)
    N = seq.N
    worst = 0.0
    for k in range(1, N):
        worst = max(worst, float(N * abs(alpha[k - 1] + alpha[N - k - 1])))
    return worst


def theorem1_reduction(family, params: FamilyParams, Ns: Sequence[int],
                       precision: Precision = None, A_threshold: float = None) -> ReductionReport:
    """
    Check that both conditions hold with one A across a schedule.
    """
    family = Family(family)
    params = params or FamilyParams()
    A = resolve_threshold(A_threshold)
    reports = [check_conditions(generate(family, params, N, precision), A) for N in sorted(Ns)]
    scaled = [r.S_scaled for r in reports]
    smallest = min(scaled)
    ratio = max(scaled) / smallest if smallest > 0 else float('inf')
    return ReductionReport(
        family=family, params=params, Ns=[r.N for r in reports],
        S_scaled=scaled, band=[r.band for r in reports],
        alpha_pairing=[r.alpha_pairing for r in reports],
        A_threshold=A, max_S_scaled=max(scaled), max_band=max(r.band for r in reports),
        S_scaled_ratio=ratio,
        passes=all(r.verdict_S and r.verdict_band for r in reports),
    )
