"""Exception types raised across the package."""


class OneStreetError(Exception):
    """Base class for every error raised by this package."""


class IllegalShowdown(OneStreetError):
    """Both players hold the same card at showdown."""


class ConfigMismatch(OneStreetError):
    """An array's shape disagrees with the GameConfig."""


class InvalidConfig(OneStreetError):
    pass


class InvalidDistribution(OneStreetError):
    """A pdf/cdf/joint distribution violates its invariants."""


class InvalidStrategy(OneStreetError):
    pass


class DegenerateDeal(OneStreetError):
    """All joint mass would sit on the diagonal (both players same card)."""


class ConvergenceFailure(OneStreetError):
    """The solver ran out of iterations before reaching the requested tolerance.

    The best profile seen so far is attached as ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class DimensionError(OneStreetError):
    pass


class RepresentationError(OneStreetError):
    pass


class SplitError(OneStreetError):
    pass


class EmptyModel(OneStreetError):
    pass


class EvalError(OneStreetError):
    pass


class NoProbes(OneStreetError):
    """No (game, card) pair satisfied a rule's precondition."""
