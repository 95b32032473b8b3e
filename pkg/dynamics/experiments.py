"""
End-to-end compositions F_N = f_N o ... o f_1 and their convergence to the identity.
"""
from concurrent.futures import ThreadPoolExecutor
from typing import List, NamedTuple, Optional, Sequence
import logging

import numpy as np

from config import settings
from dynamics.errors import ConsistencyError
from dynamics.moebius import (
    MoebiusMap, default_grid, entrywise_distance, from_epsilon, inverse,
    map_distance, map_distance_to_identity, power, product,
)
from dynamics.precision import Precision
from dynamics.recurrences import (
    ROUNDOFF_ALLOWANCE, lemma1_contract, lemma1_matrix, lemma4_check, lemma5_check,
    matrix_entries_check, nevai_sweep, proposition_bounds, run_recurrences,
    shift_identity_residual, wronskian_residual,
)
from dynamics.sequences import (
    EpsilonSequence, a_coefficients, at_calculation_precision, check_conditions, generate, promoted,
)
from reports.schemas import (
    CompositionReport, ConvergenceReport, CounterexampleReport, Family, FamilyParams,
    GridSpec, IdentityReport,
)

logger = logging.getLogger(__name__)

IDENTITY_RTOL = 1e-12
# Per-factor entrywise drift allowed in the binary64 periodicity check
PERIODICITY_RTOL = 1e-14


class PeriodicityCheck(NamedTuple):
    N: int
    matrix_dev: float
    map_dev: float
    tolerance: float


def grid_points(grid: GridSpec = None):
    grid = grid or GridSpec()
    return default_grid(grid.center, grid.radius, grid.points_per_side)


def _product(seq: EpsilonSequence) -> MoebiusMap:
    return product([from_epsilon(e, seq.precision) for e in seq.eps])


def compose_sequence(seq: EpsilonSequence, cross_check: bool = False) -> MoebiusMap:
    """
    Left-fold product of from_epsilon(eps_k) in ascending k.

    Args:
        seq: The sequence
        cross_check: Compare against the recurrence entry formulas; above
            EXTENDED_THRESHOLD_N both sides of the comparison run at extended precision

    Raises:
        ConsistencyError: if the cross-check deviation exceeds its contract
    """
    F = _product(seq)
    if cross_check:
        calc = at_calculation_precision(seq)
        checked = F if calc is seq else _product(calc)
        run = run_recurrences(a_coefficients(calc))
        deviation = entrywise_distance(checked, lemma1_matrix(run, seq.N))
        contract = lemma1_contract(run)
        if deviation > contract:
            raise ConsistencyError(
                f"matrix product and recurrence entries differ by {deviation:.3e} (contract {contract:.3e})"
            )
        logger.debug(f"Cross-check deviation {deviation:.3e} within {contract:.3e}")
    return F


def two_path_deviation(seq: EpsilonSequence) -> float:
    """
    Relative entrywise gap between the matrix product and the recurrence formulas.

    Both paths run at extended precision when N > EXTENDED_THRESHOLD_N.
    """
    seq = at_calculation_precision(seq)
    F = _product(seq)
    run = run_recurrences(a_coefficients(seq))
    return entrywise_distance(F, lemma1_matrix(run, seq.N)) / max(1.0, F.norm())


def matrix_distance_to_minus_identity(m: MoebiusMap) -> float:
    return entrywise_distance(m, MoebiusMap.minus_identity(m.precision))


def composition_report(seq: EpsilonSequence, grid: GridSpec = None) -> CompositionReport:
    """Compose with the recurrence cross-check and record the distances of F_N."""
    F = compose_sequence(seq, cross_check=True)
    report = CompositionReport(
        family=seq.family, N=seq.N, precision=seq.precision,
        a=float(F.a), b=float(F.b), c=float(F.c), d=float(F.d),
        determinant_drift=float(abs(F.determinant() - 1)),
        map_error=map_distance_to_identity(F, grid_points(grid)),
        matrix_error=matrix_distance_to_minus_identity(F),
        two_path_deviation=two_path_deviation(seq),
    )
    logger.info(f"{seq.family.value} N={seq.N}: map error {report.map_error:.6e}, |F + I| = {report.matrix_error:.6e}")
    return report


def _fit_slope(Ns: Sequence[int], errs: Sequence[float]) -> Optional[float]:
    """Unweighted least-squares slope of log err against log N."""
    if len(Ns) < 2 or any(e <= 0 for e in errs):
        return None
    slope, _ = np.polyfit(np.log(np.asarray(Ns, dtype=float)), np.log(np.asarray(errs, dtype=float)), 1)
    return float(slope)


def _measure(seq: EpsilonSequence, points) -> tuple:
    F = compose_sequence(seq)
    err = map_distance_to_identity(F, points)
    logger.debug(f"{seq.family.value} N={seq.N}: sup-grid error {err:.6e}")
    return seq.N, err, matrix_distance_to_minus_identity(F)


def _assemble(family: Family, params: FamilyParams, precision: Precision,
              grid: GridSpec, rows: List[tuple]) -> ConvergenceReport:
    rows = sorted(rows)
    Ns = [r[0] for r in rows]
    errs = [r[1] for r in rows]
    scaled = [N * e for N, e in zip(Ns, errs)]
    running = [_fit_slope(Ns[:i + 1], errs[:i + 1]) for i in range(len(Ns))]
    smallest = min(scaled)
    return ConvergenceReport(
        family=family, params=params, precision=precision, grid=grid,
        Ns=Ns, errs=errs, scaled=scaled, running_slope=running,
        matrix_errs=[r[2] for r in rows],
        fit_slope=_fit_slope(Ns, errs), fit_C=max(scaled),
        C_ratio=max(scaled) / smallest if smallest > 0 else float('inf'),
    )


def convergence_experiment(family, params: FamilyParams, Ns: Sequence[int], grid: GridSpec = None,
                           precision: Precision = None, workers: int = None) -> ConvergenceReport:
    """
    Measure sup_K |F_N(z) - z| for each N and fit the O(1/N) rate.

    Independent N values may run on a thread pool; the report is always
    assembled in ascending N.

    Raises:
        PoleError: if a grid point hits a pole (never expected on the default grid)
    """
    family = Family(family)
    params = params or FamilyParams()
    precision = Precision.coerce(precision)
    grid = grid or GridSpec()
    points = grid_points(grid)
    workers = workers or settings.WORKERS

    sequences = [generate(family, params, N, precision) for N in Ns]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda s: _measure(s, points), sequences))
    else:
        rows = [_measure(s, points) for s in sequences]

    report = _assemble(family, params, precision, grid, rows)
    logger.info(
        f"{family.value} Ns={report.Ns}: fit_C={report.fit_C:.6g} "
        f"slope={report.fit_slope if report.fit_slope is None else round(report.fit_slope, 4)}"
    )
    return report


def baseline_sequence(N: int, offset: float = 0.0, form: str = 'angle',
                      precision: Precision = None) -> EpsilonSequence:
    """
    Constant sequence for the autonomous case.

    'angle' uses eps = pi/(N + offset); 'chord' uses eps^2 = 2 - 2cos(pi/(N + offset)).
    """
    precision = Precision.coerce(precision)
    if N < 2:
        raise ValueError(f"baseline needs N >= 2, got {N}")
    if abs(offset) > 1:
        raise ValueError(f"offset must lie in [-1, 1], got {offset}")
    if form not in ('angle', 'chord'):
        raise ValueError(f"form must be 'angle' or 'chord', got {form!r}")
    ctx = precision.ctx
    angle = ctx.pi / (N + ctx.mpf(offset))
    eps = angle if form == 'angle' else 2 * ctx.sin(angle / 2)

    if offset == 0 and form == 'angle':
        family, params = Family.CONSTANT, FamilyParams()
    elif offset == 1 and form == 'chord':
        family, params = Family.COUNTEREXAMPLE, FamilyParams()
    else:
        family, params = Family.CUSTOM, FamilyParams(values=[float(eps)] * N)
    return EpsilonSequence(N, (eps,) * N, family, params, precision)


def autonomous_baseline(N: int, offset: float = 0.0, form: str = 'angle', grid: GridSpec = None,
                        precision: Precision = None) -> ConvergenceReport:
    """Single-N report for all eps_k equal; offset = 0 is the Constant family."""
    grid = grid or GridSpec()
    seq = baseline_sequence(N, offset, form, precision)
    row = _measure(seq, grid_points(grid))
    report = _assemble(seq.family, seq.params, seq.precision, grid, [row])
    logger.info(f"Baseline N={N} offset={offset} form={form}: err={report.errs[0]:.6e}")
    return report


def periodicity_tolerance(N: int, precision: Precision) -> float:
    """Entrywise bound (N+1) * 1e-14 in binary64, (N+1) * 10u at extended precision."""
    if precision is Precision.STANDARD:
        return (N + 1) * PERIODICITY_RTOL
    return (N + 1) * 10 * precision.unit_roundoff


def periodicity_check(N: int, precision: Precision = None, grid: GridSpec = None) -> PeriodicityCheck:
    """
    (N+1)-fold product of f_eps with eps^2 = 2 - 2cos(pi/(N+1)) against -I.
    """
    precision = Precision.coerce(precision)
    seq = generate(Family.COUNTEREXAMPLE, FamilyParams(), N, precision)
    factor = from_epsilon(seq.eps[0], precision)
    F = power(factor, N + 1)
    matrix_dev = matrix_distance_to_minus_identity(F)
    map_dev = map_distance_to_identity(F, grid_points(grid))
    logger.info(f"Periodicity N={N}: |F + I| = {matrix_dev:.3e}, map error {map_dev:.3e}")
    return PeriodicityCheck(N, matrix_dev, map_dev, periodicity_tolerance(N, precision))


def counterexample_limit(precision: Precision = None) -> MoebiusMap:
    """z/(1 + z), the inverse of f_0."""
    return inverse(from_epsilon(0, precision))


def counterexample_experiment(Ns: Sequence[int], grid: GridSpec = None, precision: Precision = None,
                              A_threshold: float = None) -> CounterexampleReport:
    """
    F_N for eps^2 = 2 - 2cos(pi/(N+1)) stays away from the identity and
    approaches z/(1 + z) instead.
    """
    precision = Precision.coerce(precision)
    grid = grid or GridSpec()
    points = grid_points(grid)
    limit = counterexample_limit(precision)

    identity_errs, limit_errs, conditions = [], [], []
    Ns = sorted(Ns)
    for N in Ns:
        seq = generate(Family.COUNTEREXAMPLE, FamilyParams(), N, precision)
        F = compose_sequence(seq)
        identity_errs.append(map_distance_to_identity(F, points))
        limit_errs.append(map_distance(F, limit, points))
        conditions.append(check_conditions(seq, A_threshold))

    scaled = [N * e for N, e in zip(Ns, limit_errs)]
    limit_C = max(scaled)
    # |z - z/(1+z)| = |z^2/(1+z)|
    gap = max(abs(z * z / (1 + z)) for z in points)
    report = CounterexampleReport(
        precision=precision, grid=grid, Ns=list(Ns),
        identity_errs=identity_errs, limit_errs=limit_errs, limit_scaled=scaled,
        limit_C=limit_C,
        limit_C_ratio=limit_C / min(scaled) if min(scaled) > 0 else float('inf'),
        identity_lower_bound=gap - limit_C / Ns[-1],
        condition_reports=conditions,
    )
    logger.info(f"Counterexample Ns={Ns}: identity errors {identity_errs}, limit_C={limit_C:.6g}")
    return report


def identity_tolerance(N: int, precision: Precision) -> float:
    """Relative bound for the shift and Wronskian identities."""
    return max(IDENTITY_RTOL, ROUNDOFF_ALLOWANCE * (N + 1) * precision.unit_roundoff)


def identity_suite(seq: EpsilonSequence) -> IdentityReport:
    """
    Run every structural identity of the recurrences on one sequence.

    A failed identity is reported through `passed`, never raised. The
    recurrences and explicit products always run at extended precision; the
    report keeps the sequence's precision and float values.
    """
    requested = seq.precision
    seq = promoted(seq, Precision.EXTENDED)
    ts = a_coefficients(seq)
    run = run_recurrences(ts)
    entries_deviation = matrix_entries_check(run, seq)
    entries_tolerance = lemma1_contract(run)
    shift = shift_identity_residual(run)
    wronskian = wronskian_residual(run)
    nevai_ratio, nevai_n = nevai_sweep(run, ts)
    l4 = lemma4_check(run, ts)
    l5 = lemma5_check(run, ts)
    bounds = proposition_bounds(run)

    tolerance = identity_tolerance(seq.N, seq.precision)
    passed = (entries_deviation <= entries_tolerance and shift <= tolerance
              and wronskian <= tolerance and nevai_ratio <= 1 and l4.holds and l5.holds)
    if not passed:
        logger.warning(f"{seq.family.value} N={seq.N}: identity suite failed")
    logger.info(f"{seq.family.value} N={seq.N}: identities {'PASS' if passed else 'FAIL'}")
    return IdentityReport(
        family=seq.family, N=seq.N, precision=requested,
        entries_deviation=entries_deviation, entries_tolerance=entries_tolerance,
        shift_residual=shift, wronskian_residual=wronskian,
        nevai_ratio=nevai_ratio, nevai_worst_n=nevai_n,
        lemma4_C=l4.C, lemma4_max_dev=l4.max_dev, lemma4_holds=l4.holds,
        lemma5_eps=l5.eps, lemma5_max_dev=l5.max_dev, lemma5_holds=l5.holds,
        **bounds._asdict(), passed=passed,
    )
