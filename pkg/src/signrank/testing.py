"""Two-sided asymptotic normal tests."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DataError

__all__ = ["TestResult", "two_sided_test", "two_sided_pvalues", "DEFAULT_ALPHA"]

DEFAULT_ALPHA = 0.05


@dataclass(frozen=True)
class TestResult:
    statistic_name: str
    z: float
    p_value: float
    alpha: float
    reject: bool

    __test__ = False  # keep pytest from collecting this class

    def as_dict(self) -> dict:
        return {"name": self.statistic_name, "z": self.z, "p": self.p_value, "alpha": self.alpha, "reject": self.reject}

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=False)


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")


def two_sided_test(z: float, alpha: float = DEFAULT_ALPHA, name: str = "") -> TestResult:
    """``p = 2(1 - Phi(|z|))``, computed as ``erfc(|z| / sqrt 2)``; reject iff ``p < alpha``."""
    _check_alpha(alpha)
    z = float(z)
    if not math.isfinite(z):
        raise DataError(f"statistic is not finite: {z}")
    p = math.erfc(abs(z) / math.sqrt(2.0))
    return TestResult(name, z, p, alpha, p < alpha)


def two_sided_pvalues(z) -> np.ndarray:
    """Vectorized p-values; nonfinite inputs propagate as nan."""
    return special.erfc(np.abs(np.asarray(z, dtype=float)) / math.sqrt(2.0))
