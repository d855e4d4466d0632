"""Exception hierarchy.

Every error carries the CLI exit code it maps to: 1 for bad input,
2 for size limits, 3 for degenerate data.
"""


class IRScalesError(Exception):
    exit_code = 1


class InputError(IRScalesError):
    """Malformed or inconsistent user input."""


class FormatError(InputError):
    """A run, qrels or config file line could not be parsed."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class StatementSyntaxError(InputError):
    pass


class MeasureError(InputError):
    pass


class MissingContextError(MeasureError):
    """A recall-base dependent measure was evaluated without a topic context."""


class RecallBaseError(MeasureError):
    """The SERP holds more relevant documents than the recall base allows."""


class StatisticError(InputError):
    """A statistic is undefined for its sample (empty, non-positive, ...)."""


class UnachievableScoreError(InputError):
    """A score is not one of the achievable points of the measure's scale."""


class UniverseTooLargeError(IRScalesError):
    exit_code = 2


class DegenerateDataError(IRScalesError):
    exit_code = 3


class DegenerateScaleError(DegenerateDataError):
    pass


class UndefinedNormalizationError(DegenerateDataError):
    """Normalization by the ideal ranking would divide by zero."""


class UndefinedRatioError(DegenerateDataError):
    pass


class InsufficientDataError(DegenerateDataError):
    pass
