"""Exception hierarchy shared by every module."""


class MreoptError(Exception):
    """Base class for all library errors."""


class CycleDetected(MreoptError):
    pass


class InvalidConfig(MreoptError):
    pass


class UnknownFamily(InvalidConfig):
    pass


class InvalidParameters(InvalidConfig):
    pass


class UnboundedLtv(MreoptError):
    """A strategy survives every round with certainty while earning reward."""


class UnboundedModel(UnboundedLtv):
    pass


class BracketOverflow(MreoptError):
    """Bracket doubling ran past its cap; an unbounded model slipped through."""


class InvalidPolicy(MreoptError):
    pass


class TooManyPolicies(MreoptError):
    pass


class ModeMismatch(MreoptError):
    pass
