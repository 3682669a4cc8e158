from .johansen import JohansenReport, johansen_max_eigen
from .unitroot import TestReport, adf_test, dfgls_test, gls_detrend, kpss_test, newey_west, pp_test
from .verdict import StationarityVerdict, stationarity_verdict

__all__ = [
    "JohansenReport",
    "StationarityVerdict",
    "TestReport",
    "adf_test",
    "dfgls_test",
    "gls_detrend",
    "johansen_max_eigen",
    "kpss_test",
    "newey_west",
    "pp_test",
    "stationarity_verdict",
]
