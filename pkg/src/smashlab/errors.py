"""Exception types shared across the package."""


class SmashlabError(Exception):
    """Base class for every error this package raises on purpose."""


class OrderCapExceeded(SmashlabError):
    """A group exceeded the enumeration order cap."""


class ElementNotInGroup(SmashlabError):
    """A permutation was used with a group that does not contain it."""


class AmbientMismatch(SmashlabError):
    """Two values that must share an ambient group do not."""


class NotASubgroup(SmashlabError):
    """A group reference could not be resolved as a subgroup of its parent."""


class NotAHomomorphism(SmashlabError):
    """Generator images do not extend to a homomorphism.

    ``witness`` holds a pair (a, b) with f(a*b) != f(a)*f(b) when one exists.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class TrivialSubgroup(SmashlabError):
    """The Tate oracle was asked about the trivial subgroup."""


class HomTargetMismatch(SmashlabError):
    """A pullback was applied to an expression outside the homomorphism's target."""


class SessionPrimeError(SmashlabError):
    """A construction is only available at a specific session prime."""


class DslSyntaxError(SmashlabError):
    """Parse failure, with position and the token set that would have been accepted."""

    def __init__(self, message, line, col, expected=()):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
        self.expected = tuple(sorted(expected))


class ShapeNotCovered(SmashlabError):
    """The expression does not match any shape the operation knows how to handle."""


class InvalidSequence(SmashlabError):
    """An ideal sequence violates the admissibility inequalities.

    ``position`` holds the first violated (i, j) when applicable.
    """

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class ClosureViolation(SmashlabError):
    """An indexing system fails one of its closure invariants."""


class MissingPremise(SmashlabError):
    """A propagation statement was requested without its certified premise."""


class InvariantViolation(SmashlabError):
    """An idempotent pair (or similar checked value) fails its defining invariant."""


class UnsupportedSupport(SmashlabError):
    """An operation restricted to family-type supports received level values."""
