"""Exception hierarchy shared by every module of the package."""


class RelStateError(Exception):
    """Base class for all errors raised by relstate."""


class ZeroVector(RelStateError, ValueError):
    """A zero vector was asked to be normalized."""


class NotNormalized(RelStateError, ValueError):
    """A vector that must be normalized has squared norm away from 1."""


class DimMismatch(RelStateError, ValueError):
    """Operands live in spaces of incompatible dimension."""


class RoleError(RelStateError, ValueError):
    """An operator does not satisfy the role it is required to play."""


class EmptyBranch(RelStateError):
    """The requested branch has (numerically) zero degree of reality."""


class EmptyPerspective(RelStateError):
    """The perspective's own experience branch is empty at t0."""


class SingularBranch(RelStateError, ArithmeticError):
    """Target branch vanishes while the truth-value numerator does not."""


class ContractViolation(RelStateError, ArithmeticError):
    """A numerical guarantee (e.g. a probability bound) was broken."""


class DeadEnd(RelStateError):
    """The sampler reached a step where every transition has weight zero."""


class RangeError(RelStateError, ValueError):
    """A time or parameter lies outside the range a model is defined on."""


class TooManyDisjuncts(RelStateError):
    """Refining a proposition into disjoint histories exceeded the limit."""


class RecordGap(RelStateError, KeyError):
    """A past-tense event refers to a time missing from the memory record."""


class ParseError(RelStateError, ValueError):
    """Malformed proposition or config text.

    Attributes:
        position: Zero-based character offset (propositions) or a
            ``line:col`` / key-path string (configs) locating the problem.
    """

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at {position})"
        super().__init__(message)


class IoFormat(RelStateError, ValueError):
    """A snapshot or data file could not be decoded."""
