"""Exception hierarchy shared by every module of the engine."""


class GroupError(ValueError):
    """Base class for all engine errors."""


class InvalidOrderError(GroupError):
    pass


class IllDefinedActionError(GroupError):
    """The proposed action of a cyclic group is not a homomorphism."""


class NotSubgroupError(GroupError):
    pass


class NotNormalError(GroupError):
    pass


class TooLargeError(GroupError):
    """A configured cap (table order, automorphism count, evaluation budget) was exceeded."""


class HypothesisError(GroupError):
    """Inputs violate a hypothesis required by the requested computation."""


class NotExtendableError(GroupError):
    pass


class VerificationError(GroupError):
    """A constructed object failed its own post-construction verification."""


class SpecError(GroupError):
    """Malformed group selector, spec file or word expression."""
