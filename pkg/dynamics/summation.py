"""
Compensated (error-free transformation) summation.

Neumaier's variant of Kahan summation: the running carry picks up the
low-order bits lost by each addition. Works for floats and mpmath numbers;
terms are consumed strictly in the order given, so repeated sums are
bit-identical.
"""
from typing import Iterable


class CompensatedSum:
    """Running real sum with a Neumaier carry."""

    def __init__(self, zero=0.0):
        self._sum = zero
        self._carry = zero * 0

    def add(self, value):
        total = self._sum + value
        if abs(self._sum) >= abs(value):
            self._carry += (self._sum - total) + value
        else:
            self._carry += (value - total) + self._sum
        self._sum = total

    @property
    def value(self):
        return self._sum + self._carry


class ComplexCompensatedSum:
    """Compensated sum of complex terms; real and imaginary parts carried separately."""

    def __init__(self, zero=0.0):
        self._re = CompensatedSum(zero)
        self._im = CompensatedSum(zero)

    def add(self, value):
        self._re.add(value.real)
        self._im.add(value.imag)

    def total(self, ctx):
        return ctx.mpc(self._re.value, self._im.value)


def compensated_sum(values: Iterable, zero=0.0):
    """Sum `values` in the given order with compensation."""
    acc = CompensatedSum(zero)
    for v in values:
        acc.add(v)
    return acc.value
