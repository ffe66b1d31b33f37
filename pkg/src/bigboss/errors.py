"""Exception hierarchy.

Everything derives from :class:`BigBossError` (itself a ``ValueError``) so
callers can catch one type at the boundary.
"""


class BigBossError(ValueError):
    pass


# game construction
class DuplicateCoalition(BigBossError):
    pass


class PlayerOutOfRange(BigBossError):
    pass


class NonzeroEmptyCoalition(BigBossError):
    pass


class NonFiniteWorth(BigBossError):
    pass


class CapacityExceeded(BigBossError):
    pass


# solution concepts
class AmbiguousBoss(BigBossError):
    pass


class NotBigBoss(BigBossError):
    pass


class DimensionMismatch(BigBossError):
    pass


class RhoOutOfRange(BigBossError):
    pass


class ZeroMarginalPrecondition(BigBossError):
    pass


# sampling
class RejectionBudgetExhausted(BigBossError):
    pass


# statistics
class EmptySample(BigBossError):
    pass


class NonPositiveSample(BigBossError):
    pass


class DegenerateHistogram(BigBossError):
    pass


class NoConvergence(BigBossError):
    pass


class NonPositiveThreshold(BigBossError):
    pass


class InsufficientPoints(BigBossError):
    pass


class WindowTooLarge(BigBossError):
    pass
