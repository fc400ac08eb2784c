"""Exception types shared across the package.

Most errors are precondition violations and subclass ValueError so that
callers who do not care about the fine-grained type can catch the usual
thing.  The numerical range errors (BeyondZRange & co.) carry enough
context to be converted into an Inconclusive limit classification.
"""


class NonPositiveRadius(ValueError):
    """Grid extent must be positive."""


class TooFewNodes(ValueError):
    """Grids need at least 16 cells to be worth trapezoiding over."""


class DimensionTooSmall(ValueError):
    """The radial reduction is only valid for space dimension >= 3."""


class NonPositiveExponent(ValueError):
    """Power-family exponents must be positive."""


class EmptyLattice(ValueError):
    """An audit lattice with no sample points proves nothing."""


class NegativeWeightValue(ValueError):
    """Weights are nonnegative by hypothesis; a negative sample is a bug."""


class ZeroDenominator(ValueError):
    """f1(t,t)+f2(t,t) vanished above the lower limit of the Z integral."""


class ZeroInnerIntegral(ValueError):
    """The inner integral of a KO table vanished where it must be positive."""


class NotStrictlyMonotone(ValueError):
    """Table inversion requires strictly increasing ordinates."""


class BeyondRange(ValueError):
    """A table was queried outside the interval it is defined on."""


class BeyondZRange(BeyondRange):
    """Z^-1 was asked for a value beyond the currently tabulated range.

    Recoverable: enlarging s_max may cover the query.
    """


class ZRangeExhausted(BeyondRange):
    """Z^-1 cannot cover the query even after enlarging s_max.

    Either Z(inf) is finite and the argument genuinely escapes, or the
    growth cap was hit.  Not recoverable by further doubling.
    """


class BeyondKORange(BeyondRange):
    """A KO inverse query lies at or beyond KO(inf); the bound degenerates."""


class MonotoneRadiusNotFound(ValueError):
    """No radius R with r^(2N-2) p(r) nondecreasing beyond R was detected."""


class Overflow(ArithmeticError):
    """An iterate or integration blew past 1e300 inside the domain.

    Attributes
    ----------
    radius : float
        First grid node at which the overflow was observed.
    """

    def __init__(self, message: str, radius: float):
        super().__init__(message)
        self.radius = radius


class GridMismatch(ValueError):
    """Two solutions can only be compared node-wise on the same grid."""


class ParseError(ValueError):
    """Config text could not be parsed.

    Attributes
    ----------
    line : int
        1-based line number of the offending input line.
    """

    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class ValidationError(ValueError):
    """A parsed config field violates a model precondition."""

    def __init__(self, field: str, reason: str):
        super().__init__(f"{field}: {reason}")
        self.field = field
        self.reason = reason
