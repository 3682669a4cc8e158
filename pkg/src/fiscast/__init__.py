"""Annual tax-revenue forecasting: diagnostics, decompositions, RegARIMA models and scoring."""

from .errors import FiscastError
from .series import AnnualSeries, SeriesFrame, align, growth_rates, slice_train_test

__version__ = "0.1.0"

__all__ = [
    "AnnualSeries",
    "FiscastError",
    "SeriesFrame",
    "align",
    "growth_rates",
    "slice_train_test",
    "__version__",
]
