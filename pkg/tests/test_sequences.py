"""
Tests for sequence families and the convergence condition checker.
"""
import math

import pytest

from config import settings
from dynamics.errors import IncompatibleN, UnsupportedFamily
from dynamics.precision import Precision
from dynamics.sequences import (
    DEFAULT_A_THRESHOLD, EpsilonSequence, a_coefficients, alpha_pairing, alpha_values, at_calculation_precision,
    check_conditions, chebyshev_squares, generate, promoted, resolve_threshold, theorem1_reduction,
)
from reports.schemas import Family, FamilyParams


def test_example1_from_m():
    seq = generate(Family.EXAMPLE1, FamilyParams(m=50))
    assert seq.N == 101
    assert seq.eps[0] == pytest.approx(math.pi / (2 * math.sqrt(2501)))
    assert seq.eps[-1] == pytest.approx(math.pi / (2 * math.sqrt(2500 + 101)))


def test_example1_from_N():
    seq = generate('Example1', N=21)
    assert seq.params.m is None
    assert seq.eps[0] == pytest.approx(math.pi / (2 * math.sqrt(100 + 1)))


def test_example1_rejects_even_N():
    with pytest.raises(IncompatibleN) as excinfo:
        generate(Family.EXAMPLE1, N=100)
    assert "Example1 requires N = 2m+1" in str(excinfo.value)
    assert excinfo.value.N == 100


def test_example2_parity():
    seq = generate(Family.EXAMPLE2, N=102)
    assert seq.eps[0] == pytest.approx(math.pi / (2 * math.sqrt(4 * 625 + 2)))
    with pytest.raises(IncompatibleN) as excinfo:
        generate(Family.EXAMPLE2, N=100)
    assert "N = 4m+2" in str(excinfo.value)


def test_m_and_N_must_agree():
    with pytest.raises(IncompatibleN):
        generate(Family.EXAMPLE1, FamilyParams(m=10), N=23)


def test_constant_family():
    seq = generate(Family.CONSTANT, N=100)
    assert seq.N == 100
    assert all(e == pytest.approx(math.pi / 100) for e in seq.eps)


def test_eps_must_stay_below_one():
    # pi/3 > 1
    with pytest.raises(IncompatibleN):
        generate(Family.CONSTANT, N=3)
    with pytest.raises(IncompatibleN):
        generate(Family.CUSTOM, FamilyParams(values=[0.5, 1.5]))


def test_counterexample_uses_chord():
    N = 200
    seq = generate(Family.COUNTEREXAMPLE, N=N)
    assert seq.eps[0] ** 2 == pytest.approx(2 - 2 * math.cos(math.pi / (N + 1)), rel=1e-10)
    assert len(set(seq.eps)) == 1


def test_example3_formula():
    seq = generate(Family.EXAMPLE3, N=50)
    assert seq.eps[4] == pytest.approx(math.pi / (50 ** 3 + 5) ** (1 / 3))


def test_theorem5_linear_needs_A():
    with pytest.raises(ValueError):
        generate(Family.THEOREM5_LINEAR, N=100)
    seq = generate(Family.THEOREM5_LINEAR, FamilyParams(A=2.0), N=100)
    k = 30
    assert seq.eps[k - 1] == pytest.approx(math.pi / 100 + 2.0 * (-1 / 100 ** 2 + 2 * k / 100 ** 3))


def test_theorem7_band_is_seeded():
    with pytest.raises(ValueError):
        generate(Family.THEOREM7_BAND, N=100)
    first = generate(Family.THEOREM7_BAND, FamilyParams(seed=11, C=2.0), N=100)
    again = generate(Family.THEOREM7_BAND, FamilyParams(seed=11, C=2.0), N=100)
    other = generate(Family.THEOREM7_BAND, FamilyParams(seed=12, C=2.0), N=100)
    assert first.eps == again.eps
    assert first.eps != other.eps
    assert all(abs(e - math.pi / 100) <= 2.0 / 100 ** 3 for e in first.eps)


@pytest.mark.parametrize('precision', list(Precision))
@pytest.mark.parametrize('family,params,N', [
    (Family.CONSTANT, FamilyParams(), 100),
    (Family.ALPHA_FORM, FamilyParams(alpha_coeffs=[0.2, -1.0], tail=0.5), 100),
    (Family.EXAMPLE1, FamilyParams(m=50), None),
    (Family.EXAMPLE2, FamilyParams(m=25), None),
    (Family.EXAMPLE3, FamilyParams(), 100),
    (Family.THEOREM5_LINEAR, FamilyParams(A=1.5), 100),
    (Family.THEOREM7_BAND, FamilyParams(seed=4), 100),
    (Family.COUNTEREXAMPLE, FamilyParams(), 100),
    (Family.CUSTOM, FamilyParams(values=[0.03, 0.031, 0.0305]), None),
])
def test_generators_are_bit_identical_on_rerun(family, params, N, precision):
    first = generate(family, params, N, precision)
    again = generate(family, params, N, precision)
    assert first.eps == again.eps
    assert [repr(e) for e in first.eps] == [repr(e) for e in again.eps]


def test_alpha_form_polynomial():
    N = 80
    seq = generate(Family.ALPHA_FORM, FamilyParams(alpha_coeffs=[0.5, 1.0], tail=3.0), N=N)
    for k in (1, 40, 80):
        expected = math.pi / N + (0.5 + (2 * k / N - 1)) / N ** 2 + 3.0 / N ** 3
        assert seq.eps[k - 1] == pytest.approx(expected, rel=1e-14)


def test_custom_family_and_length_check():
    seq = generate(Family.CUSTOM, FamilyParams(values=[0.1, 0.2, 0.3]))
    assert seq.N == 3
    with pytest.raises(IncompatibleN):
        generate(Family.CUSTOM, FamilyParams(values=[0.1, 0.2, 0.3]), N=4)
    with pytest.raises(ValueError):
        generate(Family.CUSTOM)


def test_epsilon_sequence_validates():
    with pytest.raises(ValueError):
        EpsilonSequence(2, (0.1,), Family.CUSTOM, FamilyParams())
    with pytest.raises(ValueError):
        EpsilonSequence(1, (0.0,), Family.CUSTOM, FamilyParams())


def test_a_coefficients_match_traces():
    seq = generate(Family.EXAMPLE1, FamilyParams(m=20))
    ts = a_coefficients(seq)
    x = 2 * math.cos(math.pi / seq.N)
    for e, t, a in zip(seq.eps, ts.t, ts.a):
        assert t == pytest.approx(2 - e * e, abs=1e-15)
        assert a == pytest.approx(t - x, abs=1e-14)


def test_a_coefficients_avoid_cancellation_for_large_N():
    N = 1000
    ts = a_coefficients(generate(Family.CONSTANT, N=N))
    theta = math.pi / N
    # 4 sin^2(theta/2) - theta^2 = -theta^4/12 + theta^6/360 - ...
    expected = -theta ** 4 / 12 + theta ** 6 / 360
    assert ts.a[0] == pytest.approx(expected, rel=1e-6)


def test_promoted_copy_is_exact(std, ext):
    seq = generate(Family.EXAMPLE3, N=40, precision=std)
    copy = promoted(seq, ext)
    assert copy.precision is ext
    assert all(a == b for a, b in zip(copy.eps, seq.eps))
    assert promoted(seq, std) is seq
    assert promoted(copy, std) is copy


def test_calculation_precision_follows_threshold(std, ext, monkeypatch):
    seq = generate(Family.CONSTANT, N=100, precision=std)
    assert at_calculation_precision(seq) is seq
    monkeypatch.setattr(settings, 'EXTENDED_THRESHOLD_N', 50)
    assert at_calculation_precision(seq).precision is ext


def test_chebyshev_squares(std):
    squares = chebyshev_squares(10, std)
    assert len(squares) == 10
    assert squares[0] == pytest.approx(1.0)
    assert squares[-1] == pytest.approx(0.0, abs=1e-25)


def test_resolve_threshold(monkeypatch):
    monkeypatch.setattr(settings, 'A_THRESHOLD', None)
    assert resolve_threshold(None) == DEFAULT_A_THRESHOLD
    assert resolve_threshold(7) == 7.0
    monkeypatch.setattr(settings, 'A_THRESHOLD', '12.5')
    assert resolve_threshold(None) == 12.5


def test_counterexample_fails_sum_but_passes_band():
    report = check_conditions(generate(Family.COUNTEREXAMPLE, N=200), A_threshold=50.0)
    # a_k is about 2 pi^2/N^3 for every k, so S is about 1 and the band about 2 pi^2
    assert report.S == pytest.approx(1.0, rel=0.05)
    assert report.S_scaled == pytest.approx(200 * report.S)
    assert report.band == pytest.approx(2 * math.pi ** 2, rel=0.05)
    assert not report.verdict_S
    assert report.verdict_band
    assert report.alpha_pairing is not None


def test_constant_family_passes_both():
    report = check_conditions(generate(Family.CONSTANT, N=101), A_threshold=50.0)
    assert report.verdict_S and report.verdict_band
    assert report.band < 1
    assert report.S_difference == pytest.approx(report.S - report.S_angle)


def test_example1_passes_both():
    report = check_conditions(generate(Family.EXAMPLE1, FamilyParams(m=50)), A_threshold=50.0)
    assert report.verdict_S
    assert report.verdict_band
    assert report.band == pytest.approx(2 * math.pi ** 2, rel=0.05)


def test_example3_has_no_alpha_pairing():
    seq = generate(Family.EXAMPLE3, N=101)
    assert check_conditions(seq).alpha_pairing is None
    with pytest.raises(UnsupportedFamily):
        alpha_pairing(seq)


def test_alpha_values_of_alpha_form():
    N = 64
    seq = generate(Family.ALPHA_FORM, FamilyParams(alpha_coeffs=[0.0, 1.0]), N=N)
    alpha = alpha_values(seq)
    assert float(alpha[N // 2 - 1]) == pytest.approx(2 * (N // 2) / N - 1, abs=1e-9)


def test_alpha_pairing_vanishes_for_linear_family():
    seq = generate(Family.THEOREM5_LINEAR, FamilyParams(A=3.0), N=200)
    assert alpha_pairing(seq) <= 1e-6


def test_alpha_pairing_grows_linearly_for_counterexample():
    for N in (100, 200, 400):
        pairing = alpha_pairing(generate(Family.COUNTEREXAMPLE, N=N))
        assert pairing == pytest.approx(2 * math.pi * N, rel=0.05)


def test_alpha_pairing_bounded_for_examples():
    for m in (50, 100, 200):
        assert alpha_pairing(generate(Family.EXAMPLE1, FamilyParams(m=m))) <= 40
        assert alpha_pairing(generate(Family.EXAMPLE2, FamilyParams(m=m))) <= 40


def test_reduction_passes_for_odd_alpha():
    report = theorem1_reduction(Family.ALPHA_FORM, FamilyParams(alpha_coeffs=[0.0, 1.5, 0.0, -0.5]),
                                [101, 201, 401], A_threshold=50.0)
    assert report.Ns == [101, 201, 401]
    assert report.passes
    assert report.max_band <= 50.0
    assert report.S_scaled_ratio >= 1


def test_reduction_fails_for_counterexample():
    report = theorem1_reduction(Family.COUNTEREXAMPLE, FamilyParams(), [200, 100], A_threshold=50.0)
    assert report.Ns == [100, 200]
    assert not report.passes
    assert report.max_S_scaled > 50.0
