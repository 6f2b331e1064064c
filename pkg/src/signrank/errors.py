"""Exception hierarchy.

The CLI maps these onto exit codes: `DataError` -> 2, `NumericalError` -> 3.
"""


class SignRankError(Exception):
    pass


class DataError(SignRankError, ValueError):
    """Input data violate the continuity assumptions (zeros, ties, bad shape)."""


class ZeroResidualError(DataError):
    pass


class TiedResidualsError(DataError):
    pass


class NumericalError(SignRankError, ArithmeticError):
    """A quadrature or root-finding step failed to reach its tolerance."""


class InfiniteMeanError(SignRankError, ValueError):
    pass
