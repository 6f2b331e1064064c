"""Sign-and-rank tests for residual randomness under skewed innovations."""

from .distributions import DENSITY_NAMES, InnovationDensity, make_density, parse_density
from .errors import (
    DataError,
    InfiniteMeanError,
    NumericalError,
    SignRankError,
    TiedResidualsError,
    ZeroResidualError,
)
from .nonserial import (
    RegressionDesign,
    exact_moments,
    location_statistic,
    median_regression_central_sequence,
    nonserial_statistic,
    nonserial_test_statistic,
    pseudo_uniform_ranks,
    standardize_unconditional,
)
from .scores import (
    ScoreGeneratingFunction,
    ScoreTable,
    approx_score,
    build_score_table,
    builtin_scores,
    exact_score,
    grid_score_function,
    score_function,
)
from .serial import (
    SerialKernel,
    SerialResult,
    kernel_moments,
    ordinary_autocorrelation,
    product_kernel,
    rank_autocorrelation,
    serial_statistic_approx,
    serial_statistic_exact,
    signrank_autocorrelation,
    standardize_serial,
)
from .signs_ranks import SignRankDecomposition, decompose, enumerate_null_invariant
from .simulation import MA1Config, PowerCurve, ma1_residuals, power_study, simulate_ma1
from .testing import TestResult, two_sided_test

__version__ = "0.1.0"
