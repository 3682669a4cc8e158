"""Exception hierarchy.

Every concrete error carries a distinct ``exit_code`` so the command line can
map failures to documented process exit statuses.
"""


class FiscastError(Exception):
    exit_code = 1


class InvalidSeries(FiscastError):
    """Non-finite values, gaps, or an empty series."""

    exit_code = 10


class EmptyIntersection(FiscastError):
    exit_code = 11


class DuplicateName(FiscastError):
    exit_code = 12


class HoldoutTooLarge(FiscastError):
    exit_code = 13


class ZeroDenominator(FiscastError):
    def __init__(self, year):
        super().__init__(f"zero denominator at year {year}")
        self.year = year

    exit_code = 14


class LengthMismatch(FiscastError):
    exit_code = 15


class YearMismatch(FiscastError):
    exit_code = 16


class TooShort(FiscastError):
    exit_code = 17


class MissingAnchor(FiscastError):
    exit_code = 18


class NonPositiveValue(FiscastError):
    def __init__(self, year):
        super().__init__(f"non-positive value at year {year}")
        self.year = year

    exit_code = 19


class NonConvergence(FiscastError):
    exit_code = 20


class SingularRegression(FiscastError):
    exit_code = 21


class SingularMoment(FiscastError):
    exit_code = 22


class ZeroVariance(FiscastError):
    exit_code = 23


class AllTied(FiscastError):
    exit_code = 24


class AllZeroDifferences(FiscastError):
    exit_code = 25


class SparseCells(FiscastError):
    exit_code = 26


class RankDeficient(FiscastError):
    exit_code = 27


class TooFewObservations(FiscastError):
    exit_code = 28


class NonInvertible(FiscastError):
    exit_code = 29


class AiccUndefined(FiscastError):
    exit_code = 30


class MissingPredictorYears(FiscastError):
    exit_code = 31


class BothZero(FiscastError):
    exit_code = 32


class BothZeroSeries(FiscastError):
    exit_code = 33


class ZeroBaseline(FiscastError):
    exit_code = 34


class SampleMismatch(FiscastError):
    exit_code = 35


class InvariantViolation(FiscastError):
    exit_code = 36


class NoViableVariant(FiscastError):
    exit_code = 37


class MissingElasticity(FiscastError):
    exit_code = 38


class SpecError(FiscastError):
    """A model specification does not match its tax's equation."""

    exit_code = 39


class SchemaError(FiscastError):
    def __init__(self, line, reason):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason

    exit_code = 40


class GapError(FiscastError):
    def __init__(self, series, year):
        super().__init__(f"series {series!r} is missing year {year}")
        self.series = series
        self.year = year

    exit_code = 41


class NonNumeric(FiscastError):
    def __init__(self, line, text=""):
        super().__init__(f"line {line}: non-numeric field {text!r}")
        self.line = line

    exit_code = 42


class ConfigError(FiscastError):
    exit_code = 43


class InvalidArgument(FiscastError):
    """A precondition on a scalar argument failed."""

    exit_code = 44


def all_error_classes():
    out = []
    stack = [FiscastError]
    while stack:
        cls = stack.pop()
        out.append(cls)
        stack.extend(cls.__subclasses__())
    return out
