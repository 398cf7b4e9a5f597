"""Exception hierarchy for the BAPO simulator."""


class BapoError(Exception):
    pass


class IndexOutOfRange(BapoError):
    pass


class BandwidthViolation(BapoError):
    pass


class NonTermination(BapoError):
    pass


class MalformedHalt(BapoError):
    pass


class BudgetExhausted(BapoError):
    """Raised when branch exploration exceeds its budget.

    Carries the best partial result so callers can still report it.
    """

    def __init__(self, msg, partial_max=None):
        super().__init__(msg)
        self.partial_max = partial_max


class MissingWitness(BapoError):
    pass


class InputNotBits(BapoError):
    pass


class TokenOutOfRange(BapoError):
    pass


class MalformedEncoding(BapoError):
    pass


class SpaceExceeded(BapoError):
    pass


class MalformedInput(BapoError):
    pass


class InputTooLong(BapoError):
    pass


class ValueOutOfRange(BapoError):
    pass


class NodeOutOfRange(BapoError):
    pass


class PreconditionViolated(BapoError):
    pass


class SearchExhausted(BapoError):
    pass


class NoCollision(BapoError):
    pass


class ScheduleInfeasible(BapoError):
    pass


class SchemaMismatch(BapoError):
    pass
