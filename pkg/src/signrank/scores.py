"""Score-generating functions and sign-and-rank score tables.

A sign-and-rank score ``a(N; i)`` depends on the sign counts ``N = (N-, N+)``
and on the rank ``i``.  Negative residuals (ranks ``1..N-``) are scored on
``(0, 1/2)`` and positive ones on ``(1/2, 1)``:

* approximate scores evaluate ``phi`` at the expected uniform order
  statistic of the relevant half, ``i / (2(nu + 1))`` or
  ``1/2 + i / (2(nu + 1))``;
* exact scores are ``E[phi(U_(i))]`` for the ``i``-th of ``nu`` uniform order
  statistics on that half, computed by quadrature against a Beta density.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, special

from .distributions import GAMMA_LAPLACE, GAMMA_LOGISTIC, InnovationDensity
from .errors import NumericalError

__all__ = [
    "ScoreGeneratingFunction",
    "score_function",
    "grid_score_function",
    "builtin_scores",
    "BUILTIN_NAMES",
    "density_scores",
    "approx_score",
    "exact_score",
    "exact_branch_score",
    "beta_expectation",
    "half_map",
    "ScoreTable",
    "build_score_table",
    "pseudo_uniform",
]

EXACT_TOL = 1e-9
_MOMENT_TOL = 1e-11


@dataclass(frozen=True, eq=False)
class ScoreGeneratingFunction:
    """A function ``phi`` on (0, 1) together with its half-integrals.

    ``mu_minus`` and ``mu_plus`` integrate ``phi`` over ``(0, 1/2)`` and
    ``(1/2, 1)``; ``sigma2`` is its variance under a uniform argument.
    """

    name: str
    func: Callable = field(repr=False)
    mu_minus: float
    mu_plus: float
    sigma2: float
    monotone_decomposable: bool = True
    skew_symmetric: bool = False

    @property
    def mu(self) -> float:
        return self.mu_minus + self.mu_plus

    def __call__(self, u):
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.func(np.asarray(u, dtype=float))

    def scalar(self, u: float) -> float:
        return float(self(u))

    def __hash__(self):
        return hash((self.name, self.func))

    def __eq__(self, other):
        if not isinstance(other, ScoreGeneratingFunction):
            return NotImplemented
        return self.name == other.name and self.func == other.func


def _half_integrals(func: Callable) -> tuple[float, float, float]:
    def f(u):
        return float(func(np.float64(u)))

    def f2(u):
        return float(func(np.float64(u))) ** 2

    opts = dict(epsabs=_MOMENT_TOL, epsrel=_MOMENT_TOL, limit=400)
    with np.errstate(divide="ignore", invalid="ignore"):
        lo, _ = integrate.quad(f, 0.0, 0.5, **opts)
        hi, _ = integrate.quad(f, 0.5, 1.0, **opts)
        sq = integrate.quad(f2, 0.0, 0.5, **opts)[0] + integrate.quad(f2, 0.5, 1.0, **opts)[0]
    return lo, hi, sq


def score_function(
    name: str,
    func: Callable,
    *,
    monotone_decomposable: bool = True,
    skew_symmetric: bool = False,
) -> ScoreGeneratingFunction:
    """Wrap a vectorized callable, computing its moments by quadrature."""
    lo, hi, sq = _half_integrals(func)
    sigma2 = sq - (lo + hi) ** 2
    if not math.isfinite(sigma2):
        raise NumericalError(f"score function {name!r} is not square-integrable")
    return ScoreGeneratingFunction(
        name, func, lo, hi, max(sigma2, 0.0), monotone_decomposable, skew_symmetric
    )


class _GridInterp:
    def __init__(self, u, values):
        self.u = np.asarray(u, dtype=float)
        self.values = np.asarray(values, dtype=float)

    def __call__(self, x):
        return np.interp(x, self.u, self.values)


def grid_score_function(name: str, u, values) -> ScoreGeneratingFunction:
    """Score-generating function given by values on a grid (linear interpolation)."""
    u = np.asarray(u, dtype=float)
    if u.ndim != 1 or np.any(np.diff(u) <= 0) or u[0] < 0 or u[-1] > 1:
        raise ValueError("grid must be strictly increasing inside [0, 1]")
    values = np.asarray(values, dtype=float)
    mono = bool(np.all(np.diff(values) >= 0) or np.all(np.diff(values) <= 0))
    return score_function(name, _GridInterp(u, values), monotone_decomposable=mono)


# builtin generating functions ----------------------------------------------


def _vdw(u):
    return special.ndtri(u)


def _wilcoxon_phi(u):
    return 2.0 * u - 1.0


def _wilcoxon_psi(u):
    return special.logit(u)


def _laplace_phi(u):
    return np.sign(2.0 * u - 1.0)


def _laplace_psi(u):
    return np.where(u <= 0.5, np.log(2.0 * u), -np.log(2.0 * (1.0 - u)))


def _hybrid_w_phi(u):
    return np.where(u <= 0.5, (2.0 * u - 1.0) / GAMMA_LOGISTIC, special.ndtri(u))


def _hybrid_w_psi(u):
    return np.where(u <= 0.5, GAMMA_LOGISTIC * special.logit(u), special.ndtri(u))


def _hybrid_l_phi(u):
    return np.where(u <= 0.5, -1.0 / GAMMA_LAPLACE + 0.0 * u, special.ndtri(u))


def _hybrid_l_psi(u):
    return np.where(u <= 0.5, GAMMA_LAPLACE * np.log(2.0 * u), special.ndtri(u))


_BUILTINS = {
    "vdw": (_vdw, True),
    "wilcoxon-phi": (_wilcoxon_phi, True),
    "wilcoxon-psi": (_wilcoxon_psi, True),
    "laplace-phi": (_laplace_phi, True),
    "laplace-psi": (_laplace_psi, True),
    "hybrid-w/vdw-phi": (_hybrid_w_phi, False),
    "hybrid-w/vdw-psi": (_hybrid_w_psi, False),
    "hybrid-l/vdw-phi": (_hybrid_l_phi, False),
    "hybrid-l/vdw-psi": (_hybrid_l_psi, False),
}

BUILTIN_NAMES = tuple(_BUILTINS)


@functools.lru_cache(maxsize=None)
def _builtin(name: str) -> ScoreGeneratingFunction:
    func, skew = _BUILTINS[name]
    return score_function(name, func, monotone_decomposable=True, skew_symmetric=skew)


def builtin_scores(name: str) -> ScoreGeneratingFunction:
    """Look up a builtin score-generating function (case-insensitive).

    Names: ``vdw`` (normal quantile), ``wilcoxon-phi`` (``2u - 1``),
    ``wilcoxon-psi`` (logit), ``laplace-phi`` (``sign(2u - 1)``),
    ``laplace-psi``, and the hybrid scores ``hybrid-w/vdw-phi``,
    ``hybrid-w/vdw-psi``, ``hybrid-l/vdw-phi``, ``hybrid-l/vdw-psi``.
    """
    key = name.strip().lower()
    if key not in _BUILTINS:
        raise ValueError(f"unknown score function {name!r}; expected one of {BUILTIN_NAMES}")
    return _builtin(key)


class _DensityPhi:
    def __init__(self, d: InnovationDensity):
        self.d = d

    def __call__(self, u):
        return self.d.phi_f(u)

    def __eq__(self, other):
        return isinstance(other, _DensityPhi) and other.d == self.d

    def __hash__(self):
        return hash(("phi", self.d))


class _DensityPsi(_DensityPhi):
    def __call__(self, u):
        return self.d.quantile(u)

    def __hash__(self):
        return hash(("psi", self.d))


def density_scores(d: InnovationDensity) -> tuple[ScoreGeneratingFunction, ScoreGeneratingFunction]:
    """``(phi_f, psi_f)`` = (location score, quantile function) of ``d``.

    The two hybrid densities map onto their closed-form builtin scores.
    """
    if d.name == "hybrid-logistic-normal":
        return builtin_scores("hybrid-w/vdw-phi"), builtin_scores("hybrid-w/vdw-psi")
    if d.name == "hybrid-laplace-normal":
        return builtin_scores("hybrid-l/vdw-phi"), builtin_scores("hybrid-l/vdw-psi")
    if d.name == "normal":
        return builtin_scores("vdw"), builtin_scores("vdw")
    return (
        score_function(f"phi[{d.name}]", _DensityPhi(d), monotone_decomposable=False),
        score_function(f"psi[{d.name}]", _DensityPsi(d)),
    )


# individual scores ----------------------------------------------------------


def pseudo_uniform(ranks, n_minus):
    """Pseudo-uniform positions of ranks given the negative-sign count.

    ``R/(2(N- + 1))`` for ``R <= N-`` and ``1/2 + (R - N-)/(2(N+ + 1))``
    otherwise.  Broadcasts ``n_minus`` against the leading axes of ``ranks``.
    """
    ranks = np.asarray(ranks, dtype=float)
    n = ranks.shape[-1]
    nm = np.asarray(n_minus, dtype=float)[..., None]
    neg = ranks <= nm
    return np.where(neg, ranks / (2.0 * (nm + 1.0)), 0.5 + (ranks - nm) / (2.0 * (n - nm + 1.0)))


def _validate(n_minus: int, n_plus: int, rank: int) -> None:
    if n_minus < 0 or n_plus < 0:
        raise ValueError("sign counts must be nonnegative")
    if not 1 <= rank <= n_minus + n_plus:
        raise ValueError(f"rank {rank} outside 1..{n_minus + n_plus}")


def approx_score(n_minus: int, n_plus: int, rank: int, phi: ScoreGeneratingFunction) -> float:
    _validate(n_minus, n_plus, rank)
    if rank <= n_minus:
        return phi.scalar(rank / (2.0 * (n_minus + 1)))
    i = rank - n_minus
    return phi.scalar(0.5 + i / (2.0 * (n_plus + 1)))


def beta_expectation(g: Callable[[float], float], a: float, b: float, *, epsabs: float = 1e-12) -> tuple[float, float]:
    """``E[g(X)]`` for ``X ~ Beta(a, b)`` by adaptive quadrature.

    Returns ``(value, error_estimate)``.  The integration range is split at
    the mode and clipped to the central ``1 - 2e-14`` Beta mass, which keeps
    unbounded ``g`` (normal quantile, logarithms) away from singular endpoints.
    """
    log_norm = special.betaln(a, b)

    def integrand(x):
        if x <= 0.0 or x >= 1.0:
            return 0.0
        w = math.exp((a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x) - log_norm)
        if w == 0.0:
            return 0.0
        return g(x) * w

    lo = float(special.betaincinv(a, b, 1e-14))
    hi = float(special.betainccinv(a, b, 1e-14))
    center = (a - 1.0) / (a + b - 2.0) if a > 1 and b > 1 else a / (a + b)
    cuts = sorted({lo, min(max(center, lo), hi), hi})
    total, err = 0.0, 0.0
    for x0, x1 in zip(cuts[:-1], cuts[1:]):
        if x1 <= x0:
            continue
        val, e = integrate.quad(integrand, x0, x1, epsabs=epsabs, epsrel=1e-11, limit=400)
        total += val
        err += e
    return total, err


def half_map(branch: str) -> Callable[[float], float]:
    """Map (0, 1) onto the minus half (0, 1/2) or the plus half (1/2, 1)."""
    if branch == "minus":
        return lambda x: 0.5 * x
    if branch == "plus":
        return lambda x: 0.5 + 0.5 * x
    raise ValueError(f"branch must be 'minus' or 'plus', got {branch!r}")


@functools.lru_cache(maxsize=200_000)
def exact_branch_score(phi: ScoreGeneratingFunction, branch: str, nu: int, i: int) -> float:
    """``E[phi(U_(i))]`` for the i-th of ``nu`` uniform order statistics on a half.

    ``2 U_(i)`` (minus half) or ``2 U_(i) - 1`` (plus half) is Beta(i, nu + 1 - i).
    """
    if not 1 <= i <= nu:
        raise ValueError(f"need 1 <= i <= nu, got i={i}, nu={nu}")
    arg = half_map(branch)
    total, err = beta_expectation(lambda x: phi.scalar(arg(x)), float(i), float(nu + 1 - i))
    if not err < EXACT_TOL or not math.isfinite(total):
        raise NumericalError(
            f"exact score quadrature for {phi.name} (nu={nu}, i={i}) reached only {err:.3g}"
        )
    return total


def exact_score(n_minus: int, n_plus: int, rank: int, phi: ScoreGeneratingFunction) -> float:
    _validate(n_minus, n_plus, rank)
    if rank <= n_minus:
        return exact_branch_score(phi, "minus", n_minus, rank)
    return exact_branch_score(phi, "plus", n_plus, rank - n_minus)


# tables ---------------------------------------------------------------------


class ScoreTable:
    """Scores ``a(N; i)`` for all sign configurations of a sample of size n.

    Rows are computed on first use and cached, so a table can be used for
    large ``n`` without materializing every ``(nu, i)`` cell.
    """

    def __init__(self, n: int, phi: ScoreGeneratingFunction, flavor: str = "approx"):
        if n < 1:
            raise ValueError("n must be >= 1")
        flavor = {"approximate": "approx"}.get(flavor, flavor)
        if flavor not in ("approx", "exact"):
            raise ValueError(f"flavor must be 'exact' or 'approx', got {flavor!r}")
        self.n = n
        self.phi = phi
        self.flavor = flavor
        self._rows: dict[tuple[str, int], np.ndarray] = {}
        self._full: dict[int, np.ndarray] = {}

    def __repr__(self):
        return f"ScoreTable(n={self.n}, phi={self.phi.name!r}, flavor={self.flavor!r})"

    def row(self, branch: str, nu: int) -> np.ndarray:
        """Scores for ranks ``1..nu`` within one half."""
        key = (branch, nu)
        if key not in self._rows:
            if not 0 <= nu <= self.n:
                raise ValueError(f"nu={nu} outside 0..{self.n}")
            i = np.arange(1, nu + 1)
            if self.flavor == "approx":
                u = i / (2.0 * (nu + 1))
                vals = self.phi(u if branch == "minus" else 0.5 + u)
                vals = np.asarray(vals, dtype=float).reshape(nu)
            else:
                vals = np.array([exact_branch_score(self.phi, branch, nu, int(k)) for k in i])
            vals.setflags(write=False)
            self._rows[key] = vals
        return self._rows[key]

    def minus(self, nu: int) -> np.ndarray:
        return self.row("minus", nu)

    def plus(self, nu: int) -> np.ndarray:
        return self.row("plus", nu)

    def scores(self, n_minus: int) -> np.ndarray:
        """``a((n_minus, n - n_minus); j)`` for ``j = 1..n``."""
        n_minus = int(n_minus)
        if n_minus not in self._full:
            full = np.concatenate([self.minus(n_minus), self.plus(self.n - n_minus)])
            full.setflags(write=False)
            self._full[n_minus] = full
        return self._full[n_minus]

    def value(self, n_minus: int, rank: int) -> float:
        return float(self.scores(n_minus)[rank - 1])

    def config_stats(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-configuration mean score and centered sum of squares.

        Index ``v`` of either array refers to ``n_minus = v``, ``v = 0..n``.
        """
        if not hasattr(self, "_config_stats"):
            means = np.empty(self.n + 1)
            ss = np.empty(self.n + 1)
            for v in range(self.n + 1):
                a = self.scores(v)
                means[v] = a.mean()
                ss[v] = np.sum((a - means[v]) ** 2)
            self._config_stats = (means, ss)
        return self._config_stats

    def fill(self) -> "ScoreTable":
        for nu in range(1, self.n + 1):
            self.minus(nu)
            self.plus(nu)
        return self

    def entries(self):
        """Yield ``(branch, nu, i, value)`` for all ``1 <= i <= nu <= n``."""
        for nu in range(1, self.n + 1):
            for branch in ("minus", "plus"):
                for i, v in enumerate(self.row(branch, nu), start=1):
                    yield branch, nu, i, float(v)


def build_score_table(n: int, phi: ScoreGeneratingFunction, flavor: str = "approx") -> ScoreTable:
    return ScoreTable(n, phi, flavor).fill()
