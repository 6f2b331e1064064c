"""Linear nonserial sign-and-rank statistics.

``S_c = n^{-1} sum_i c_i a(N; R_i)`` for regression constants ``c`` and a
score table ``a``.  Under the null hypothesis (i.i.d. residuals with median
zero) the sign count ``N-`` is Binomial(n, 1/2) and, given ``N``, the rank
vector is a uniformly random permutation, which yields exact finite-sample
moments.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .distributions import InnovationDensity
from .errors import DataError
from .scores import ScoreTable, pseudo_uniform
from .signs_ranks import SignRankDecomposition, decompose, ranks_batch, sign_count_pmf

__all__ = [
    "RegressionDesign",
    "NonserialResult",
    "nonserial_statistic",
    "nonserial_statistic_batch",
    "exact_moments",
    "conditional_mean",
    "unconditional_std",
    "standardize_unconditional",
    "nonserial_test_statistic",
    "location_statistic",
    "pseudo_uniform_ranks",
    "median_regression_central_sequence",
    "representation_gap",
]


@dataclass(frozen=True, eq=False)
class RegressionDesign:
    """Regression constants ``c_1..c_n``."""

    c: np.ndarray

    def __post_init__(self):
        c = np.array(self.c, dtype=float).reshape(-1)
        if c.size == 0 or not np.all(np.isfinite(c)):
            raise DataError("design constants must be a nonempty finite vector")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @classmethod
    def constant(cls, n: int, value: float = 1.0) -> "RegressionDesign":
        return cls(np.full(n, float(value)))

    @classmethod
    def linear_trend(cls, n: int) -> "RegressionDesign":
        """``c_i = i / n``."""
        return cls(np.arange(1, n + 1) / n)

    @property
    def n(self) -> int:
        return self.c.size

    @property
    def c_bar(self) -> float:
        return float(self.c.mean())

    @property
    def ssq_centered(self) -> float:
        return float(np.sum((self.c - self.c.mean()) ** 2))

    @property
    def is_degenerate(self) -> bool:
        return self.ssq_centered == 0.0

    @property
    def noether_ratio(self) -> float:
        """``max_i (c_i - c_bar)^2 / sum_j (c_j - c_bar)^2``; nan for degenerate designs."""
        ss = self.ssq_centered
        if ss == 0.0:
            return math.nan
        return float(np.max((self.c - self.c.mean()) ** 2) / ss)


@dataclass(frozen=True)
class NonserialResult:
    value: float
    exact_mean: float
    exact_var: float
    uncond_std: float
    z: float


def _check_sizes(design: RegressionDesign, table: ScoreTable, n: int) -> None:
    if design.n != n or table.n != n:
        raise DataError(
            f"length mismatch: series {n}, design {design.n}, score table {table.n}"
        )


def nonserial_statistic(z, design: RegressionDesign, table: ScoreTable) -> float:
    d = z if isinstance(z, SignRankDecomposition) else decompose(z)
    _check_sizes(design, table, d.n)
    a = table.scores(d.n_minus)[d.ranks - 1]
    return float(np.dot(design.c, a) / d.n)


def nonserial_statistic_batch(z, design: RegressionDesign, table: ScoreTable) -> np.ndarray:
    """``S_c`` for each row of a 2-d array of residual series."""
    z = np.atleast_2d(np.asarray(z, dtype=float))
    ranks, n_minus = ranks_batch(z)
    _check_sizes(design, table, z.shape[1])
    a = np.stack([table.scores(v) for v in n_minus])
    a = np.take_along_axis(a, ranks - 1, axis=1)
    return a @ design.c / z.shape[1]


def conditional_mean(n_minus, design: RegressionDesign, table: ScoreTable):
    """``E[S_c | N] = c_bar * mean_j a(N; j)``."""
    means, _ = table.config_stats()
    return design.c_bar * means[np.asarray(n_minus)]


def exact_moments(design: RegressionDesign, table: ScoreTable) -> tuple[float, float]:
    """Exact null mean and variance of ``S_c``.

    ``Var = E_N[Var(S|N)] + Var_N(E[S|N])`` where, given ``N``, ``S`` is a
    simple linear rank statistic under a uniform permutation.
    """
    n = table.n
    _check_sizes(design, table, n)
    w = sign_count_pmf(n)
    means, ss = table.config_stats()
    abar = float(np.dot(w, means))
    mean = design.c_bar * abar
    between = design.c_bar**2 * float(np.dot(w, (means - abar) ** 2))
    if n == 1:
        warnings.warn("n = 1: the within-configuration variance is set to 0", stacklevel=2)
        within = 0.0
    else:
        within = design.ssq_centered * float(np.dot(w, ss)) / (n * n * (n - 1))
    return mean, within + between


def unconditional_std(design: RegressionDesign, table: ScoreTable) -> float:
    """Asymptotic standard deviation of ``sqrt(n)(S_c - E S_c)``."""
    phi = table.phi
    n = design.n
    var = phi.sigma2 * design.ssq_centered / n + (design.c_bar * (phi.mu_minus - phi.mu_plus)) ** 2
    return math.sqrt(var)


def standardize_unconditional(S, design: RegressionDesign, table: ScoreTable, mean: float | None = None):
    """``sqrt(n)(S - E S) / unconditional_std``; ``E S`` is the exact mean unless given."""
    sd = unconditional_std(design, table)
    if not sd > 0:
        raise DataError("zero standardizing constant: constant scores and degenerate design")
    if mean is None:
        mean, _ = exact_moments(design, table)
    return math.sqrt(design.n) * (np.asarray(S, dtype=float) - mean) / sd


def nonserial_test_statistic(z, design: RegressionDesign, table: ScoreTable) -> NonserialResult:
    S = nonserial_statistic(z, design, table)
    mean, var = exact_moments(design, table)
    sd = unconditional_std(design, table)
    zval = float(standardize_unconditional(S, design, table, mean=mean))
    return NonserialResult(S, mean, var, sd, zval)


def location_statistic(z, table: ScoreTable):
    """Standardized sign-and-rank location statistic (all constants equal to 1).

    Accepts one series or a 2-d array with one series per row.
    """
    phi = table.phi
    gap = abs(phi.mu_minus - phi.mu_plus)
    if not gap > 1e-12:
        raise DataError(f"score function {phi.name!r} carries no sign information")
    z = np.asarray(z, dtype=float)
    design = RegressionDesign.constant(z.shape[-1])
    S = nonserial_statistic_batch(z, design, table)
    mean, _ = exact_moments(design, table)
    out = math.sqrt(design.n) * (S - mean) / gap
    return float(out[0]) if z.ndim == 1 else out


def pseudo_uniform_ranks(d: SignRankDecomposition) -> np.ndarray:
    """Pseudo-uniform positions: negatives fill (0, 1/2), positives (1/2, 1)."""
    return pseudo_uniform(d.ranks, d.n_minus)


def median_regression_central_sequence(
    z, design: RegressionDesign, f: InnovationDensity, flavor: str = "oracle"
) -> tuple[float, float]:
    """Central sequences for intercept and slope in median regression.

    ``flavor="oracle"`` evaluates the location score at the residuals
    themselves (requires knowing ``f``); ``"sign-and-rank-approx"`` evaluates
    ``phi_f`` at the pseudo-uniform ranks instead.
    """
    d = decompose(z)
    n = d.n
    if design.n != n:
        raise DataError(f"length mismatch: series {n}, design {design.n}")
    sign_part = 2.0 * f.f0 * (d.n_plus - d.n_minus) / n
    if flavor == "oracle":
        scores = f.location_score(np.asarray(z, dtype=float))
    elif flavor in ("sign-and-rank-approx", "approx"):
        scores = f.phi_f(pseudo_uniform_ranks(d))
    else:
        raise ValueError(f"unknown flavor {flavor!r}")
    weighted = float(np.dot(design.c - design.c_bar, scores)) / n
    root = math.sqrt(n)
    return root * sign_part, root * (weighted + design.c_bar * sign_part)


def representation_gap(z, design: RegressionDesign, table: ScoreTable, f: InnovationDensity) -> np.ndarray:
    """``sqrt(n)`` times the remainder of the asymptotic representation of ``S_c - E S_c``.

    The leading term is ``n^{-1} sum (c_i - c_bar) phi(F(Z_i))`` plus
    ``c_bar (2 N-/n mu- + 2 N+/n mu+ - mu)``, evaluated with the true
    distribution function.  Rows of ``z`` are replications.
    """
    z = np.atleast_2d(np.asarray(z, dtype=float))
    n = z.shape[1]
    phi = table.phi
    S = nonserial_statistic_batch(z, design, table)
    mean, _ = exact_moments(design, table)
    n_minus = (z < 0).sum(axis=1)
    u = f.cdf(z)
    linear = phi(u) @ (design.c - design.c_bar) / n
    signs = design.c_bar * (2 * n_minus / n * phi.mu_minus + 2 * (n - n_minus) / n * phi.mu_plus - phi.mu)
    return math.sqrt(n) * (S - mean - linear - signs)
