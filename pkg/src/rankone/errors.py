"""Exception types shared across the package."""


class RankOneError(Exception):
    """Base class for all package-specific errors."""


class SpecError(RankOneError):
    """A parameter specification violates an invariant."""


class ParseError(SpecError):
    """Config text is malformed; carries line and column (1-based)."""

    def __init__(self, message, line, col):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class NormalizationError(SpecError):
    """The spacer rule class is not closed under normalization here."""

    def __init__(self, message, stage=None):
        super().__init__(message)
        self.stage = stage


class CapExceededError(RankOneError):
    """A word is too long to materialize; use lazy letter access."""


class UndefinedOrbitError(RankOneError):
    """Orbit evaluation exhausted its refinement budget.

    Only the measure-zero edge orbits need unbounded refinement; hitting
    this means the point is (numerically indistinguishable from) one of
    them.
    """


class NotCertifiedError(RankOneError):
    """An operation requires a partial-boundedness certificate."""


class AmbiguousContainmentError(RankOneError):
    """Two candidate image copies contain the same probe window."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index
