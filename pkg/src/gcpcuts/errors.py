"""Exception hierarchy.

``InputError`` subclasses signal bad arguments or data (CLI exit code 2);
``NumericalFailure`` signals a breakdown inside the LP machinery (exit code 3).
"""


class GcpCutsError(Exception):
    pass


class InputError(GcpCutsError, ValueError):
    pass


class NumericalFailure(GcpCutsError, ArithmeticError):
    pass


# geometry
class WeightError(InputError):
    pass


class DegenerateCenter(InputError):
    pass


class DegenerateGamma(InputError):
    pass


class CenterNotInterior(InputError):
    pass


class OriginNotInterior(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class NotRegular(InputError):
    pass


# simplex
class NotOptimal(InputError):
    pass


# corner cuts
class NoFractionalRow(InputError):
    pass


class RowOutOfRange(InputError):
    pass


class NotSingleRow(InputError):
    pass


class RowsNotAllFractional(InputError):
    pass


class ColumnOutOfRange(InputError):
    pass


class NotUnimodular(InputError):
    pass


class TooManyPoints(InputError):
    pass


# instances
class ParseError(InputError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnsupportedFeature(InputError):
    pass


# harness
class NotEnoughFractionalRows(InputError):
    pass


class IpUnavailable(GcpCutsError):
    pass
