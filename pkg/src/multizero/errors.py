"""Exception hierarchy shared by every module."""


class MultizeroError(Exception):
    """Base class for all errors raised by this package."""


class RankDeficient(MultizeroError):
    pass


class NotPrincipal(MultizeroError):
    pass


class DimensionMismatch(MultizeroError):
    pass


class InputSyntaxError(MultizeroError):
    """Malformed network or matrix text, with 1-based line/column."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class UnknownSpecies(InputSyntaxError):
    pass


class DuplicateRateLabel(InputSyntaxError):
    pass


class BlowupLimit(MultizeroError):
    """Fourier-Motzkin elimination exceeded its row cap."""


class PrecisionExhausted(MultizeroError):
    """Strict margins fell below what the working precision can resolve."""


class NotForest(MultizeroError):
    pass


class WitnessVerificationError(MultizeroError):
    """A witness built on a forest-inducing matrix failed verification.

    This contradicts the constructive characterization and indicates a bug.
    """
