"""
Exception hierarchy for the parabolic bifurcation toolkit.

NumericalError subclasses map to exit status 3 in the runner,
ValidationError subclasses to exit status 2.
"""


class ParabifurcError(Exception):
    """Base class for every error raised by this package."""


class NumericalError(ParabifurcError):
    """A computation hit a numerically meaningless state."""


class PoleError(NumericalError):
    """The point is (numerically) the pole of a Moebius map."""

    def __init__(self, z, denominator=None):
        self.z = z
        self.denominator = denominator
        super().__init__(f"z = {complex(z)!r} is a numerical pole (|cz + d| = {abs(denominator) if denominator is not None else 0:.3e})")


class DivergenceError(NumericalError):
    """An orbit of g left the disk where the basin can be tracked."""

    def __init__(self, w, step: int):
        self.w = w
        self.step = step
        super().__init__(f"orbit left the basin at step {step}: |w| = {abs(complex(w)):.6g}")


class ConsistencyError(NumericalError):
    """Two independent computations of the same quantity disagree."""


class ValidationError(ParabifurcError, ValueError):
    """Inputs violate a documented precondition."""


class IncompatibleN(ValidationError):
    """N does not satisfy the family's size or parity constraint."""

    def __init__(self, family: str, N: int, constraint: str):
        self.family = family
        self.N = N
        self.constraint = constraint
        super().__init__(f"{family} requires {constraint} (got N = {N})")


class UnsupportedFamily(ValidationError):
    """The family has no alpha(k) interpretation."""

    def __init__(self, family: str, operation: str):
        self.family = family
        super().__init__(f"{operation} is not defined for family {family}")


class BasinError(ValidationError):
    """The starting point is not in the parabolic basin of g."""

    def __init__(self, w, reason: str):
        self.w = w
        super().__init__(f"w = {complex(w)!r} is not in the parabolic basin: {reason}")


class Indeterminate(NumericalError):
    """The basin test reached max_iter without a decision."""

    def __init__(self, w, last, max_iter: int):
        self.w = w
        self.last = last
        self.max_iter = max_iter
        super().__init__(
            f"basin membership of w = {complex(w)!r} undecided after {max_iter} steps "
            f"(last |w_j| = {abs(complex(last)):.3e})"
        )
