"""
Generalized Chebyshev three-term recurrences.

For traces t_k = 2 - eps_k^2 the composition F_n = f_n o ... o f_1 has matrix

    ((p_{n+1} - p_n, q_n - q_{n+1}), (-p_n, q_n))

where p and q solve p_{k+1} = t_k p_k - p_{k-1} with (p_0, p_1) = (0, 1) and
(q_0, q_1) = (1, 1). The shifted solution ptilde uses t_{k+1} and ties the two
together through q_k = p_k - ptilde_{k-1}. U_k is the classical Chebyshev
polynomial of the second kind at x = 2 cos(theta), theta = pi/N.
"""
from dataclasses import dataclass
from typing import NamedTuple, Tuple
import logging
import math

from dynamics.moebius import MoebiusMap, compose, entrywise_distance, from_epsilon
from dynamics.precision import Precision
from dynamics.summation import CompensatedSum, ComplexCompensatedSum

logger = logging.getLogger(__name__)

# Calibration constants, frozen after extended-precision runs
NEVAI_TOL_FACTOR = 1e3
ENTRIES_TOL_FACTOR = 1e2
ROUNDOFF_ALLOWANCE = 10.0


@dataclass(frozen=True)
class TraceSequence:
    """
    Traces t_1..t_N and their deviations a_k = t_k - x from x = 2 cos(pi/N).

    Tuples are 0-based: t[k - 1] holds t_k.
    """
    N: int
    t: Tuple
    x: object
    theta: object
    a: Tuple
    precision: Precision = Precision.STANDARD

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"N must be positive, got {self.N}")
        if len(self.t) != self.N or len(self.a) != self.N:
            raise ValueError(f"expected {self.N} traces and deviations, got {len(self.t)} and {len(self.a)}")
        if not 0 < self.theta < math.pi:
            raise ValueError(f"theta must lie in (0, pi), got {self.theta}")

    @classmethod
    def from_traces(cls, traces, precision: Precision = None) -> 'TraceSequence':
        """Build from traces alone, computing a_k = t_k - 2cos(pi/N) directly."""
        precision = Precision.coerce(precision)
        ctx = precision.ctx
        t = tuple(ctx.mpf(v) for v in traces)
        N = len(t)
        theta = ctx.pi / N
        x = 2 * ctx.cos(theta)
        return cls(N, t, x, theta, tuple(tk - x for tk in t), precision)

    @classmethod
    def unperturbed(cls, N: int, precision: Precision = None) -> 'TraceSequence':
        """Classical case t_k = x, a_k = 0 exactly."""
        precision = Precision.coerce(precision)
        ctx = precision.ctx
        theta = ctx.pi / N
        x = 2 * ctx.cos(theta)
        return cls(N, (x,) * N, x, theta, (ctx.mpf(0),) * N, precision)


@dataclass(frozen=True)
class RecurrenceRun:
    """
    Solutions of the recurrences for one trace sequence.

    p, q, U are indexed 0..N+1, ptilde 0..N. phi[n - 1] holds phi_n for
    n = 1..N+1 and delta[n - 2] holds delta_n for n = 2..N+1.
    """
    N: int
    p: Tuple
    q: Tuple
    ptilde: Tuple
    U: Tuple
    phi: Tuple
    delta: Tuple
    theta: object
    precision: Precision = Precision.STANDARD

    def phi_at(self, n: int):
        return self.phi[n - 1]

    def delta_at(self, n: int):
        if n == 1:
            return self.precision.ctx.mpc(0)
        return self.delta[n - 2]


class PropositionBounds(NamedTuple):
    pN_abs: float
    pN1_plus1_abs: float
    ptildeN_abs: float
    ptildeN1_minus1_abs: float

    def max(self) -> float:
        return max(self)


class Lemma4Check(NamedTuple):
    C: float
    applies: bool
    max_dev: float
    bound: float
    holds: bool


class Lemma5Check(NamedTuple):
    m: int
    eps: float
    max_dev: float
    holds: bool


def run_recurrences(ts: TraceSequence) -> RecurrenceRun:
    """
    Forward recurrences for p, q, ptilde, U and the phi/delta representation.

    delta_n = sum_{j<n} a_j p_j e^{i j theta} is accumulated in ascending j
    with compensated summation.
    """
    ctx = ts.precision.ctx
    N, t, x = ts.N, ts.t, ts.x
    zero, one = ctx.mpf(0), ctx.mpf(1)

    p = [zero, one]
    q = [one, one]
    U = [zero, one]
    for k in range(1, N + 1):
        tk = t[k - 1]
        p.append(tk * p[k] - p[k - 1])
        q.append(tk * q[k] - q[k - 1])
        U.append(x * U[k] - U[k - 1])

    ptilde = [zero, one]
    for k in range(1, N):
        ptilde.append(t[k] * ptilde[k] - ptilde[k - 1])

    acc = ComplexCompensatedSum(zero)
    phi = [ctx.mpc(1)]
    delta = []
    for j in range(1, N + 1):
        angle = j * ts.theta
        acc.add(ts.a[j - 1] * p[j] * ctx.mpc(ctx.cos(angle), ctx.sin(angle)))
        d = acc.total(ctx)
        delta.append(d)
        phi.append(1 + d)

    logger.debug(f"Recurrences done for N={N} at {ts.precision.value} precision")
    return RecurrenceRun(N, tuple(p), tuple(q), tuple(ptilde), tuple(U),
                         tuple(phi), tuple(delta), ts.theta, ts.precision)


def chebyshev_closed_form(k: int, theta, precision: Precision = None):
    """U_k(2 cos theta) = sin(k theta) / sin(theta)."""
    precision = Precision.coerce(precision)
    ctx = precision.ctx
    theta = ctx.mpf(theta)
    if k < 0 or not 0 < theta < ctx.pi:
        raise ValueError("need k >= 0 and 0 < theta < pi")
    return ctx.sin(k * theta) / ctx.sin(theta)


def nevai_tolerance(n: int, precision: Precision) -> float:
    return n * NEVAI_TOL_FACTOR * precision.unit_roundoff


def nevai_residual(run: RecurrenceRun, ts: TraceSequence, n: int) -> float:
    """
    |sin(theta) p_n - |phi_n| sin(n theta - arg(phi_n))|.

    Returns NaN when phi_n = 0 (its argument is undefined).
    """
    if not 1 <= n <= run.N + 1:
        raise ValueError(f"n must lie in 1..{run.N + 1}, got {n}")
    ctx = ts.precision.ctx
    phi = run.phi_at(n)
    if phi == 0:
        logger.warning(f"phi_{n} vanishes; residual undefined")
        return float('nan')
    lhs = ctx.sin(ts.theta) * run.p[n]
    rhs = abs(phi) * ctx.sin(n * ts.theta - ctx.arg(phi))
    return float(abs(lhs - rhs))


def nevai_sweep(run: RecurrenceRun, ts: TraceSequence) -> Tuple[float, int]:
    """
    Worst residual-to-tolerance ratio over n = 1..N+1.

    Returns:
        (ratio, n) for the worst n; ratio <= 1 means every residual is in contract
    """
    worst, worst_n = 0.0, 1
    for n in range(1, run.N + 2):
        residual = nevai_residual(run, ts, n)
        if math.isnan(residual):
            continue
        ratio = residual / nevai_tolerance(n, ts.precision)
        if ratio > worst:
            worst, worst_n = ratio, n
    return worst, worst_n


def lemma1_matrix(run: RecurrenceRun, n: int) -> MoebiusMap:
    """F_n from the entry formulas (p_{n+1} - p_n, q_n - q_{n+1}; -p_n, q_n)."""
    if not 1 <= n <= run.N:
        raise ValueError(f"n must lie in 1..{run.N}, got {n}")
    p, q = run.p, run.q
    return MoebiusMap(p[n + 1] - p[n], q[n] - q[n + 1], -p[n], q[n], run.precision)


def lemma1_contract(run: RecurrenceRun) -> float:
    """N * 100 * u * max_n ||F_n||."""
    max_norm = max(lemma1_matrix(run, n).norm() for n in range(1, run.N + 1))
    return run.N * ENTRIES_TOL_FACTOR * run.precision.unit_roundoff * max_norm


def matrix_entries_check(run: RecurrenceRun, eps_seq) -> float:
    """
    Max entrywise deviation between explicit products F_n and the entry formulas.

    Args:
        run: Recurrences built from eps_seq's traces
        eps_seq: The EpsilonSequence whose factors are multiplied

    Returns:
        max over n = 1..N of the entrywise distance
    """
    if len(eps_seq.eps) != run.N:
        raise ValueError(f"sequence has {len(eps_seq.eps)} terms, run has N = {run.N}")
    F = None
    worst = 0.0
    for n, eps in enumerate(eps_seq.eps, start=1):
        factor = from_epsilon(eps, run.precision)
        F = factor if F is None else compose(factor, F)
        worst = max(worst, entrywise_distance(F, lemma1_matrix(run, n)))
    logger.debug(f"Recurrence entries deviation {worst:.3e} over N={run.N}")
    return worst


def proposition_bounds(run: RecurrenceRun) -> PropositionBounds:
    """|p_N|, |p_{N+1} + 1|, |ptilde_N|, |ptilde_{N-1} - 1|."""
    N = run.N
    return PropositionBounds(
        float(abs(run.p[N])),
        float(abs(run.p[N + 1] + 1)),
        float(abs(run.ptilde[N])),
        float(abs(run.ptilde[N - 1] - 1)),
    )


def shift_identity_residual(run: RecurrenceRun) -> float:
    """Max relative |q_k - (p_k - ptilde_{k-1})| over k = 1..N+1."""
    worst = 0.0
    for k in range(1, run.N + 2):
        diff = run.q[k] - (run.p[k] - run.ptilde[k - 1])
        scale = max(1.0, float(abs(run.q[k])), float(abs(run.p[k])))
        worst = max(worst, float(abs(diff)) / scale)
    return worst


def wronskian_residual(run: RecurrenceRun) -> float:
    """Max relative |p_{k+1} q_k - p_k q_{k+1} - 1| over k = 0..N."""
    worst = 0.0
    p, q = run.p, run.q
    for k in range(run.N + 1):
        left, right = p[k + 1] * q[k], p[k] * q[k + 1]
        scale = max(1.0, float(abs(left)), float(abs(right)))
        worst = max(worst, float(abs(left - right - 1)) / scale)
    return worst


def _roundoff_allowance(run: RecurrenceRun) -> float:
    return ROUNDOFF_ALLOWANCE * (run.N + 1) ** 2 * run.precision.unit_roundoff


def lemma4_check(run: RecurrenceRun, ts: TraceSequence) -> Lemma4Check:
    """
    If max|a_k| <= C/N^3 <= 1/(2N^2) then max_{i<=N+1} |p_i - U_i| <= 2C.

    C is measured as N^3 max|a_k|.
    """
    N = ts.N
    C = N ** 3 * max(float(abs(a)) for a in ts.a)
    applies = C <= N / 2
    max_dev = max(float(abs(run.p[i] - run.U[i])) for i in range(1, N + 2))
    bound = 2 * C
    holds = (not applies) or max_dev <= bound + _roundoff_allowance(run)
    return Lemma4Check(C, applies, max_dev, bound, holds)


def lemma5_check(run: RecurrenceRun, ts: TraceSequence, m: int = None) -> Lemma5Check:
    """
    If sum_{j<m} |a_j p_j| <= eps sin(theta) then |p_n - U_n| <= eps for n <= m.

    eps is taken from the left-hand side itself.
    """
    m = ts.N + 1 if m is None else m
    if not 1 <= m <= ts.N + 1:
        raise ValueError(f"m must lie in 1..{ts.N + 1}, got {m}")
    ctx = ts.precision.ctx
    acc = CompensatedSum(ctx.mpf(0))
    for j in range(1, m):
        acc.add(abs(ts.a[j - 1] * run.p[j]))
    eps = float(acc.value / ctx.sin(ts.theta))
    max_dev = max(float(abs(run.p[n] - run.U[n])) for n in range(1, m + 1))
    return Lemma5Check(m, eps, max_dev, max_dev <= eps + _roundoff_allowance(run))
