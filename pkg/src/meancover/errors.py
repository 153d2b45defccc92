"""Exception taxonomy shared across the package.

Every error raised by a public operation derives from :class:`MeancoverError`
so callers can catch the package's failures with a single except clause while
still discriminating the cause.  Input-validation errors additionally derive
from the matching builtin (``ValueError``) so that defensive call sites using
stdlib idioms keep working.
"""

from __future__ import annotations


class MeancoverError(Exception):
    """Base class for all package-specific failures."""


class BadParameter(MeancoverError, ValueError):
    """A constructor or factory received an out-of-range argument."""


class PoleAtPoint(MeancoverError, ArithmeticError):
    """Evaluation was requested at (or numerically on top of) a pole."""

    def __init__(self, point: complex, message: str = ""):
        self.point = point
        super().__init__(message or f"evaluation hit a pole near z = {point}")


class ParseError(MeancoverError, ValueError):
    """Spec text does not conform to the grammar.

    Carries the character position and a short description of what was
    expected there so callers can produce a caret diagnostic.
    """

    def __init__(self, text: str, position: int, expected: str):
        self.text = text
        self.position = position
        self.expected = expected
        super().__init__(f"at position {position}: expected {expected}")


class ToleranceNotMet(MeancoverError, ArithmeticError):
    """An iterative refinement stalled before reaching the requested tolerance."""


class BudgetExceeded(MeancoverError, RuntimeError):
    """A refinement loop hit its configured cell/step budget."""


class ValueOnContour(MeancoverError, ArithmeticError):
    """The counting integrand is singular: the target value lies on the contour."""


class NonIntegerResult(MeancoverError, ArithmeticError):
    """A winding-number integral failed to converge to an integer."""


class ResolutionTooCoarse(MeancoverError, RuntimeError):
    """The scan grid is too coarse to resolve the region of interest."""


class NotUnivalent(MeancoverError, RuntimeError):
    """A univalence precondition failed: some value has two or more preimages."""


class StartOffCurve(MeancoverError, ValueError):
    """A lift was started from a point that is not on the requested circle."""


class CoverageGap(MeancoverError, RuntimeError):
    """Monotone intervals fail to cover the radius range within tolerance."""


class IncompleteLift(MeancoverError, RuntimeError):
    """A path length was requested for a lift that did not reach the boundary."""


class ZeroLength(MeancoverError, ArithmeticError):
    """A per-radius length is numerically zero; the mass integrand is singular."""


class DomainError(MeancoverError, ValueError):
    """A scalar argument lies outside the mathematical domain of the map."""


class SolverFailure(MeancoverError, RuntimeError):
    """The sparse harmonic solve did not converge or produced non-finite values."""


class SandwichViolation(MeancoverError, AssertionError):
    """A certified upper bound fell below a certified lower bound.

    This is a hard error: it means a numerical invariant that the rest of the
    pipeline relies on is broken, so it must never be swallowed.
    """


class ConfigError(MeancoverError, ValueError):
    """A run configuration file is malformed or inconsistent."""
