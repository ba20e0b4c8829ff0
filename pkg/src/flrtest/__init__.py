"""Smoothing-spline likelihood ratio test for functional linear regression.

The package estimates the slope function of a scalar-on-function linear model
by penalized least squares, tests whether the slope is identically zero with
a normal-calibrated likelihood ratio statistic, selects the smoothing
parameter by a testing-optimal data-driven rule, and ships a Monte Carlo
size/power laboratory plus a CSV pipeline for real datasets.
"""

from .design import (DesignOperators, EigenSystem, FunctionalSample,
                     build_design, eig_qhat, eig_qraw, qplus_apply)
from .errors import (DataError, DegenerateDesignError, DegenerateResponseError,
                     FlrtestError, GridMismatchError, InvalidInputError,
                     NumericError)
from .estimator import SplineFit, fit, rss_pair
from .glrt import TestResult, null_moments, run_test, tau_statistic
from .grid import (Grid, GridFunction, fourier_basis, inner, integrate,
                   make_grid, t0_pow, t1_pow)
from .lambda_select import (LambdaSelection, select_lambda,
                            selection_objective)
from .simlab import (SimConfig, SizePowerRow, gen_setup1, gen_setup2,
                     power_curve, run_monte_carlo)

__version__ = "0.1.0"

__all__ = [
    "Grid", "GridFunction", "make_grid", "integrate", "inner",
    "t0_pow", "t1_pow", "fourier_basis",
    "FunctionalSample", "DesignOperators", "EigenSystem",
    "build_design", "eig_qhat", "eig_qraw", "qplus_apply",
    "SplineFit", "fit", "rss_pair",
    "TestResult", "tau_statistic", "null_moments", "run_test",
    "LambdaSelection", "select_lambda", "selection_objective",
    "SimConfig", "SizePowerRow", "gen_setup1", "gen_setup2",
    "run_monte_carlo", "power_curve",
    "FlrtestError", "InvalidInputError", "GridMismatchError",
    "DegenerateDesignError", "DegenerateResponseError", "DataError",
    "NumericError",
]
