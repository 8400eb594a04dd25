"""Exception hierarchy for the engine."""


class BaodeError(Exception):
    """Base class for every error raised by this package."""


class SizeError(BaodeError):
    pass


class PropernessError(BaodeError):
    pass


class SignatureError(BaodeError):
    pass


class MorphismError(BaodeError):
    pass


class ContainmentError(BaodeError):
    pass


class ClosureError(BaodeError):
    pass


class MapError(BaodeError):
    pass


class DimensionBudgetError(BaodeError):
    pass


class WitnessIndexError(BaodeError):
    pass


class WitnessClaimError(BaodeError):
    """A quantifier-elimination claim failed on a constructed witness element."""


class WellDefinednessError(BaodeError):
    """Two admissible evaluations of a dilated cylindrifier disagree."""


class UnboundVariableError(BaodeError):
    pass


class IndexRangeError(BaodeError):
    pass


class ParseError(BaodeError):
    def __init__(self, message, position=None, source=None):
        self.position = position
        self.source = source
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
