"""Serial (lagged) sign-and-rank statistics and rank autocorrelations.

A serial kernel ``phi_k(u_0, ..., u_k)`` is evaluated at the pseudo-uniform
ranks of ``(Z_t, Z_{t-1}, ..., Z_{t-k})``; argument 0 is the current time.
Kernels are vectorized callables taking ``k + 1`` broadcastable arrays.

Box integrals ``mu_nu[v]`` integrate the kernel over the part of the unit
cube where exactly ``v`` coordinates exceed 1/2.  ``V2`` is the variance of
the conditionally centred statistic and ``uncond_extra`` the additional
variance contributed by the sign counts.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from .distributions import InnovationDensity, make_density
from .errors import DataError, NumericalError
from .scores import (
    ScoreGeneratingFunction,
    beta_expectation,
    builtin_scores,
    exact_branch_score,
    half_map,
    pseudo_uniform,
)
from .signs_ranks import decompose, ranks_batch, sign_count_pmf

__all__ = [
    "KernelMoments",
    "SerialKernel",
    "SerialResult",
    "product_kernel",
    "kernel_moments",
    "serial_statistic_approx",
    "serial_statistic_approx_batch",
    "serial_statistic_exact",
    "exact_pair_score",
    "sign_block_mean",
    "serial_centering",
    "standardize_serial",
    "serial_test_statistic",
    "lag_one_permutation_moments",
    "rank_autocorrelation",
    "rank_autocorrelation_batch",
    "rank_autocorrelation_scores",
    "ordinary_autocorrelation",
    "ordinary_autocorrelation_batch",
    "signrank_autocorrelation",
    "signrank_autocorrelation_batch",
    "signrank_autocorrelation_std",
    "hybrid_kernel",
    "serial_representation_gap",
    "MC_DRAWS",
]

MC_DRAWS = 100_000
GRID_NODES_PER_HALF = 32
MAX_GENERIC_ORDER = 2


@dataclass(frozen=True)
class KernelMoments:
    mu: float
    mu_nu: tuple[float, ...]
    V2: float
    uncond_extra: float


class _ProductFunc:
    """``phi(u_0) * psi(u_k)``; picklable, unlike a closure."""

    def __init__(self, phi: ScoreGeneratingFunction, psi: ScoreGeneratingFunction):
        self.phi = phi
        self.psi = psi

    def __call__(self, *u):
        return self.phi(u[0]) * self.psi(u[-1])

    def __eq__(self, other):
        return isinstance(other, _ProductFunc) and (self.phi, self.psi) == (other.phi, other.psi)

    def __hash__(self):
        return hash((self.phi, self.psi))


@dataclass(frozen=True, eq=False)
class SerialKernel:
    """Kernel of order ``k`` with optional product structure ``phi(u_0) psi(u_k)``."""

    name: str
    k: int
    func: Callable
    factors: tuple[ScoreGeneratingFunction, ScoreGeneratingFunction] | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("kernel order k must be >= 1")

    def __call__(self, *u):
        if len(u) != self.k + 1:
            raise ValueError(f"kernel of order {self.k} takes {self.k + 1} arguments")
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.asarray(self.func(*u), dtype=float)

    @property
    def product_form(self) -> bool:
        return self.factors is not None

    @cached_property
    def moments(self) -> KernelMoments:
        return kernel_moments(self)

    def __hash__(self):
        return hash((self.name, self.k, self.func))

    def __eq__(self, other):
        if not isinstance(other, SerialKernel):
            return NotImplemented
        return (self.name, self.k, self.func) == (other.name, other.k, other.func)


def product_kernel(phi: ScoreGeneratingFunction, psi: ScoreGeneratingFunction, k: int = 1) -> SerialKernel:
    return SerialKernel(f"{phi.name}*{psi.name}", k, _ProductFunc(phi, psi), (phi, psi))


# moments ----------------------------------------------------------------------


def _extra(k: int, mu: float, mu_nu) -> float:
    weighted = sum(v * m for v, m in enumerate(mu_nu))
    return (k + 1) ** 2 * (mu - 2.0 * weighted / (k + 1)) ** 2


def _product_moments(kernel: SerialKernel) -> KernelMoments:
    phi, psi = kernel.factors
    k = kernel.k
    half_phi = {0: phi.mu_minus, 1: phi.mu_plus}
    half_psi = {0: psi.mu_minus, 1: psi.mu_plus}
    mu_nu = [0.0] * (k + 2)
    for h0, hk in itertools.product((0, 1), repeat=2):
        base = half_phi[h0] * half_psi[hk] * 0.5 ** (k - 1)
        # m of the k - 1 middle coordinates lie in the plus half
        for m in range(k):
            mu_nu[h0 + hk + m] += math.comb(k - 1, m) * base
    mu = phi.mu * psi.mu
    V2 = phi.sigma2 * psi.sigma2
    return KernelMoments(mu, tuple(mu_nu), V2, _extra(k, mu, mu_nu))


@functools.lru_cache(maxsize=None)
def _half_gauss_legendre(m: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(m)
    lo = 0.25 * (x + 1.0)
    nodes = np.concatenate([lo, 0.5 + lo])
    weights = np.concatenate([w, w]) / 4.0
    return nodes, weights


def _generic_moments(kernel: SerialKernel) -> KernelMoments:
    k = kernel.k
    if k > MAX_GENERIC_ORDER:
        raise NotImplementedError(
            f"generic kernel moments need k <= {MAX_GENERIC_ORDER}; use a product kernel"
        )
    m = GRID_NODES_PER_HALF
    x, w = _half_gauss_legendre(m)
    d = k + 1
    grids = np.meshgrid(*([x] * d), indexing="ij")
    F = kernel(*grids)
    if not np.all(np.isfinite(F)):
        raise NumericalError(f"kernel {kernel.name!r} is not finite on the quadrature grid")
    W = functools.reduce(np.multiply.outer, [w] * d)
    mu = float(np.sum(W * F))

    plus = (x > 0.5).astype(int)
    count = functools.reduce(np.add.outer, [plus] * d)
    mu_nu = tuple(float(np.sum((W * F)[count == v])) for v in range(d + 1))

    def contract(arr, axes):
        for ax in sorted(axes, reverse=True):
            arr = np.tensordot(arr, w, axes=([ax], [0]))
        return arr

    star = F - mu
    for j in range(d):
        g = contract(F, [a for a in range(d) if a != j]) - mu
        shape = [1] * d
        shape[j] = x.size
        star = star - g.reshape(shape)
    V2 = float(np.sum(W * star**2))
    for j in range(1, k + 1):
        left = contract(star, list(range(d - j, d)))
        right = contract(star, list(range(j)))
        Ws = functools.reduce(np.multiply.outer, [w] * (d - j))
        V2 += 2.0 * float(np.sum(Ws * left * right))
    return KernelMoments(mu, mu_nu, V2, _extra(k, mu, mu_nu))


def kernel_moments(kernel: SerialKernel) -> KernelMoments:
    """``mu``, box integrals ``mu_nu[0..k+1]``, ``V2`` and ``uncond_extra``.

    Product kernels reduce to one-dimensional integrals of the factors.
    Other kernels use a tensor Gauss-Legendre grid with nodes split at 1/2.
    """
    if kernel.product_form:
        return _product_moments(kernel)
    return _generic_moments(kernel)


# statistics ---------------------------------------------------------------------


def _lagged(u: np.ndarray, k: int) -> list[np.ndarray]:
    n = u.shape[-1]
    if n <= k:
        raise DataError(f"need more than k={k} observations, got {n}")
    return [u[..., k - j : n - j] for j in range(k + 1)]


def serial_statistic_approx(z, kernel: SerialKernel) -> float:
    """Mean over ``t`` of the kernel at the pseudo-uniform ranks of ``(Z_t, ..., Z_{t-k})``."""
    d = decompose(z)
    u = pseudo_uniform(d.ranks, d.n_minus)
    return float(np.mean(kernel(*_lagged(u, kernel.k))))


def serial_statistic_approx_batch(z, kernel: SerialKernel) -> np.ndarray:
    z = np.atleast_2d(np.asarray(z, dtype=float))
    ranks, n_minus = ranks_batch(z)
    u = pseudo_uniform(ranks, n_minus)
    return np.mean(kernel(*_lagged(u, kernel.k)), axis=-1)


@functools.lru_cache(maxsize=100_000)
def exact_pair_score(kernel: SerialKernel, n_minus: int, n_plus: int, r0: int, r1: int) -> float:
    """``E[phi(U_(r0), U_(r1))]`` for order statistics of the pseudo-uniform sample.

    Given the sign counts, the sample consists of ``n_minus`` uniforms on
    (0, 1/2) and ``n_plus`` on (1/2, 1).  Different halves are independent;
    within one half, for positions ``i < j`` among ``nu``, ``X_(j)`` is
    Beta(j, nu - j + 1) and ``X_(i) / X_(j)`` is an independent Beta(i, j - i).
    """
    if kernel.k != 1:
        raise ValueError("exact pair scores are defined for order-1 kernels")
    n = n_minus + n_plus
    if not (1 <= r0 <= n and 1 <= r1 <= n) or r0 == r1:
        raise ValueError("need two distinct ranks in 1..n")

    def locate(r):
        if r <= n_minus:
            return "minus", n_minus, r
        return "plus", n_plus, r - n_minus

    b0, nu0, i0 = locate(r0)
    b1, nu1, i1 = locate(r1)
    if b0 != b1 and kernel.product_form:
        phi, psi = kernel.factors
        return exact_branch_score(phi, b0, nu0, i0) * exact_branch_score(psi, b1, nu1, i1)

    def f(a, b):
        return float(kernel(np.float64(a), np.float64(b)))

    errs = []
    if b0 != b1:
        m0, m1 = half_map(b0), half_map(b1)

        def outer(x):
            val, e = beta_expectation(lambda y: f(m0(x), m1(y)), i1, nu1 + 1 - i1, epsabs=1e-11)
            errs.append(e)
            return val

        val, e = beta_expectation(outer, i0, nu0 + 1 - i0, epsabs=1e-10)
    else:
        mp = half_map(b0)
        lo, hi = sorted((i0, i1))

        def g(small, large):
            return f(small, large) if i0 < i1 else f(large, small)

        def outer(x):
            val, e = beta_expectation(lambda w: g(mp(w * x), mp(x)), lo, hi - lo, epsabs=1e-11)
            errs.append(e)
            return val

        val, e = beta_expectation(outer, hi, nu0 + 1 - hi, epsabs=1e-10)
    err = e + (max(errs) if errs else 0.0)
    if not err < 1e-8 or not math.isfinite(val):
        raise NumericalError(f"pair-score quadrature reached only {err:.3g}")
    return val


def serial_statistic_exact(
    z, kernel: SerialKernel, *, rng: np.random.Generator | None = None, draws: int = MC_DRAWS
) -> tuple[float, float]:
    """Serial statistic with exact scores; returns ``(value, standard_error)``.

    Order-1 kernels use deterministic quadrature (standard error 0).  Higher
    orders average the statistic over ``draws`` conditional samples of the
    pseudo-uniform order statistics given the sign counts.
    """
    d = decompose(z)
    k = kernel.k
    if d.n <= k:
        raise DataError(f"need more than k={k} observations, got {d.n}")
    if k == 1:
        r = d.ranks
        vals = [exact_pair_score(kernel, d.n_minus, d.n_plus, int(r[t]), int(r[t - 1])) for t in range(1, d.n)]
        return float(np.mean(vals)), 0.0
    if rng is None:
        raise ValueError("order k >= 2 needs a random generator for the Monte Carlo path")
    chunk = 10_000
    per_draw = []
    done = 0
    while done < draws:
        b = min(chunk, draws - done)
        minus = np.sort(rng.random((b, d.n_minus)), axis=1) * 0.5
        plus = 0.5 + np.sort(rng.random((b, d.n_plus)), axis=1) * 0.5
        ordered = np.concatenate([minus, plus], axis=1)
        u = ordered[:, d.ranks - 1]
        per_draw.append(np.mean(kernel(*_lagged(u, k)), axis=1))
        done += b
    per_draw = np.concatenate(per_draw)
    return float(per_draw.mean()), float(per_draw.std(ddof=1) / math.sqrt(draws))


def _falling(x: int, m: int) -> int:
    out = 1
    for j in range(m):
        out *= x - j
    return out


def sign_block_mean(kernel: SerialKernel, n_minus: int, n: int) -> float:
    """``E[S | N]`` for exact scores from the box integrals.

    The ``(k + 1)``-tuple of ranks entering one kernel evaluation is a
    uniformly random ordered tuple of distinct ranks, so each sign pattern
    with ``v`` plus coordinates has probability
    ``(N-)_(k+1-v) (N+)_v / (n)_(k+1)`` and conditional mean
    ``2^(k+1)`` times its box integral.
    """
    k = kernel.k
    n_plus = n - n_minus
    mu_nu = kernel.moments.mu_nu
    total = sum(_falling(n_minus, k + 1 - v) * _falling(n_plus, v) * mu_nu[v] for v in range(k + 2))
    return 2 ** (k + 1) * total / _falling(n, k + 1)


def _product_conditional_mean_approx(kernel: SerialKernel, n_minus, n: int):
    """``E[S_appr | N]`` for a product kernel (any ordered pair of distinct ranks)."""
    phi, psi = kernel.factors
    n_minus = np.atleast_1d(n_minus)
    u = pseudo_uniform(np.arange(1, n + 1)[None, :], n_minus)
    a, b = phi(u), psi(u)
    return (a.sum(-1) * b.sum(-1) - (a * b).sum(-1)) / (n * (n - 1))


def serial_centering(kernel: SerialKernel, n: int, flavor: str = "approx") -> tuple[float, str]:
    """Null mean of the serial statistic and whether it is ``"exact"`` or ``"asymptotic"``."""
    w = sign_count_pmf(n)
    if flavor == "exact":
        means = np.array([sign_block_mean(kernel, v, n) for v in range(n + 1)])
        return float(w @ means), "exact"
    if flavor != "approx":
        raise ValueError(f"flavor must be 'exact' or 'approx', got {flavor!r}")
    if kernel.product_form:
        means = _product_conditional_mean_approx(kernel, np.arange(n + 1), n)
        return float(w @ means), "exact"
    return kernel.moments.mu, "asymptotic"


def standardize_serial(S, kernel: SerialKernel, n: int, centering: float | None = None):
    """``sqrt(n - k)(S - E S) / sqrt(V2 + uncond_extra)``."""
    m = kernel.moments
    denom = m.V2 + m.uncond_extra
    # grid quadrature leaves roundoff of order eps^2 * mu^2 for constant kernels
    if not denom > 1e-20 * (1.0 + m.mu**2):
        raise DataError(f"kernel {kernel.name!r} has zero asymptotic variance")
    if centering is None:
        centering = m.mu
    return math.sqrt(n - kernel.k) * (np.asarray(S, dtype=float) - centering) / math.sqrt(denom)


@dataclass(frozen=True)
class SerialResult:
    value: float
    centering: float
    std: float
    z: float
    centering_kind: str = "exact"


def serial_test_statistic(z, kernel: SerialKernel, flavor: str = "approx", *, rng=None) -> SerialResult:
    z = np.asarray(z, dtype=float)
    n = z.size
    if flavor == "approx":
        S = serial_statistic_approx(z, kernel)
    else:
        S, _ = serial_statistic_exact(z, kernel, rng=rng)
    center, kind = serial_centering(kernel, n, flavor)
    m = kernel.moments
    zval = float(standardize_serial(S, kernel, n, center))
    return SerialResult(S, center, math.sqrt(m.V2 + m.uncond_extra), zval, kind)


# permutation moments of lag-one rank statistics ------------------------------


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def _distinct_sum(arrays):
    """``sum over pairwise distinct (i_1..i_m) of prod_j arrays[j][i_j]`` by Moebius inversion."""
    m = len(arrays)
    total = 0
    for part in _set_partitions(list(range(m))):
        coef = 1
        term = 1
        for block in part:
            coef *= (-1) ** (len(block) - 1) * math.factorial(len(block) - 1)
            term *= np.sum(functools.reduce(np.multiply, [arrays[j] for j in block]))
        total += coef * term
    return total


def lag_one_permutation_moments(a, b) -> tuple[float, float]:
    """Mean and variance of ``sum_{t=2}^n a[R_t] b[R_{t-1}]`` for a uniform random permutation ``R``.

    Pairs of summands share two positions (same ``t``), one position
    (adjacent ``t``) or none; each case is a distinct-index power sum.
    Object arrays of ``Fraction`` are kept exact.
    """
    a, b = np.asarray(a), np.asarray(b)
    if a.dtype != object or b.dtype != object:
        a, b = a.astype(float), b.astype(float)
    n = a.size
    if n < 4 or b.size != n:
        raise ValueError("need two score vectors of equal length n >= 4")
    f2, f3, f4 = n * (n - 1), n * (n - 1) * (n - 2), n * (n - 1) * (n - 2) * (n - 3)
    m1 = _distinct_sum([a, b]) / f2
    same = _distinct_sum([a * a, b * b]) / f2
    adjacent = _distinct_sum([b, a * b, a]) / f3
    separated = _distinct_sum([a, b, a, b]) / f4
    mean = (n - 1) * m1
    second = (n - 1) * same + 2 * (n - 2) * adjacent + (n - 2) * (n - 3) * separated
    return mean, second - mean**2


_RANK_VARIANTS = {
    "vdw": ("vdw", "vdw"),
    "wilcoxon": ("wilcoxon-phi", "wilcoxon-psi"),
    "laplace": ("laplace-phi", "laplace-psi"),
}


@functools.lru_cache(maxsize=None)
def rank_autocorrelation_scores(variant: str, n: int) -> tuple[np.ndarray, np.ndarray, float, float]:
    """Scores ``a_i, b_i`` at ``i/(n+1)``, the centering and the exact standard deviation.

    The centering is ``[n(n-1)]^{-1} sum_{i != j} a_i b_j`` and the standard
    deviation is that of the normalized lag-one sum under random permutations.
    """
    key = variant.lower()
    if key not in _RANK_VARIANTS:
        raise ValueError(f"unknown rank autocorrelation {variant!r}; expected {tuple(_RANK_VARIANTS)}")
    phi, psi = (builtin_scores(s) for s in _RANK_VARIANTS[key])
    u = np.arange(1, n + 1) / (n + 1)
    a, b = phi(u), psi(u)
    mean, var = lag_one_permutation_moments(a, b)
    a.setflags(write=False)
    b.setflags(write=False)
    return a, b, mean / (n - 1), math.sqrt(var) / (n - 1)


def rank_autocorrelation_batch(z, variant: str = "vdw") -> tuple[np.ndarray, np.ndarray]:
    """``(value, z)`` arrays of the lag-one rank autocorrelation for each row of ``z``."""
    z = np.atleast_2d(np.asarray(z, dtype=float))
    n = z.shape[1]
    if n < 8:
        raise DataError("rank autocorrelations need n >= 8")
    ranks, _ = ranks_batch(z, require_nonzero=False)
    a, b, center, sd = rank_autocorrelation_scores(variant, n)
    stat = np.mean(a[ranks[:, 1:] - 1] * b[ranks[:, :-1] - 1], axis=1) - center
    return stat, stat / sd


def rank_autocorrelation(z, variant: str = "vdw") -> SerialResult:
    z = np.asarray(z, dtype=float)
    if z.ndim != 1:
        raise DataError("expected a 1-d series")
    stat, zz = rank_autocorrelation_batch(z, variant)
    _, _, center, sd = rank_autocorrelation_scores(variant, z.size)
    return SerialResult(float(stat[0]), center, sd, float(zz[0]), "exact")


def ordinary_autocorrelation_batch(z) -> tuple[np.ndarray, np.ndarray]:
    z = np.atleast_2d(np.asarray(z, dtype=float))
    n = z.shape[1]
    if n < 3:
        raise DataError("the autocorrelation needs n >= 3")
    if not np.all(np.isfinite(z)):
        raise DataError("series must be finite")
    c = z - z.mean(axis=1, keepdims=True)
    denom = np.mean(c * c, axis=1)
    if np.any(np.all(z == z[:, :1], axis=1)) or np.any(denom == 0.0):
        raise DataError("zero sample variance")
    r1 = np.sum(c[:, 1:] * c[:, :-1], axis=1) / (n - 1) / denom
    return r1, math.sqrt(n) * r1


def ordinary_autocorrelation(z) -> SerialResult:
    z = np.asarray(z, dtype=float)
    if z.ndim != 1:
        raise DataError("expected a 1-d series")
    r1, zz = ordinary_autocorrelation_batch(z)
    return SerialResult(float(r1[0]), 0.0, 1.0 / math.sqrt(z.size), float(zz[0]), "asymptotic")


# sign-and-rank autocorrelations ------------------------------------------------

_HYBRID = {
    "w/vdw": ("hybrid-logistic-normal", "hybrid-w/vdw-phi", "hybrid-w/vdw-psi"),
    "l/vdw": ("hybrid-laplace-normal", "hybrid-l/vdw-phi", "hybrid-l/vdw-psi"),
}
_HYBRID_ALIASES = {"wvdw": "w/vdw", "lvdw": "l/vdw"}


def _hybrid_key(flavor: str) -> str:
    key = flavor.strip().lower()
    key = _HYBRID_ALIASES.get(key, key)
    if key not in _HYBRID:
        raise ValueError(f"unknown sign-and-rank flavor {flavor!r}; expected W/vdW or L/vdW")
    return key


@functools.lru_cache(maxsize=None)
def hybrid_kernel(flavor: str) -> tuple[SerialKernel, InnovationDensity]:
    """Product kernel and matching density for the ``W/vdW`` or ``L/vdW`` flavor."""
    dname, phi, psi = _HYBRID[_hybrid_key(flavor)]
    return product_kernel(builtin_scores(phi), builtin_scores(psi)), make_density(dname)


@functools.lru_cache(maxsize=None)
def signrank_autocorrelation_std(flavor: str, n: int, standardization: str = "exact") -> float:
    """Standard deviation of ``sqrt(n - 1)`` times the sign-and-rank autocorrelation.

    ``"asymptotic"`` gives ``sqrt(V2 + uncond_extra)``.  ``"exact"`` gives the
    exact null value: given the sign counts the ranks form a uniform
    permutation, so the conditionally centred part has the lag-one
    permutation variance of the pseudo-uniform scores; the sign term adds
    ``4 f(0)^2 mu_f^2 / n`` and is uncorrelated with it.
    """
    kernel, f = hybrid_kernel(_hybrid_key(flavor))
    m = kernel.moments
    if standardization == "asymptotic":
        return math.sqrt(m.V2 + m.uncond_extra)
    if standardization != "exact":
        raise ValueError(f"standardization must be 'exact' or 'asymptotic', got {standardization!r}")
    phi, psi = kernel.factors
    w = sign_count_pmf(n)
    ranks = np.arange(1, n + 1)[None, :]
    within = 0.0
    for v in range(n + 1):
        if w[v] == 0.0:
            continue
        u = pseudo_uniform(ranks, v)[0]
        within += w[v] * lag_one_permutation_moments(phi(u), psi(u))[1]
    var = within / (n - 1) ** 2 + 4.0 * (f.f0 * f.mu_f) ** 2 / n
    return math.sqrt((n - 1) * var)


def signrank_autocorrelation_batch(
    z, flavor: str = "L/vdW", f: InnovationDensity | None = None, standardization: str = "exact"
):
    """``(value, centering, z)`` arrays of the sign-and-rank lag-one autocorrelation per row.

    The value is the pseudo-uniform autocorrelation minus its conditional
    mean given the sign counts plus ``2 f(0) mu_f (N+ - N-)/n``.
    """
    kernel, default = hybrid_kernel(_hybrid_key(flavor))
    if f is None:
        f = default
    elif f.name != default.name:
        raise ValueError(f"flavor {flavor!r} requires density {default.name!r}, got {f.name!r}")
    z = np.atleast_2d(np.asarray(z, dtype=float))
    n = z.shape[1]
    if n < 8:
        raise DataError("sign-and-rank autocorrelations need n >= 8")
    ranks, n_minus = ranks_batch(z)
    phi, psi = kernel.factors
    u = pseudo_uniform(ranks, n_minus)
    a, b = phi(u), psi(u)
    r_appr = np.mean(a[:, 1:] * b[:, :-1], axis=1)
    cond = (a.sum(1) * b.sum(1) - (a * b).sum(1)) / (n * (n - 1))
    sign_term = 2.0 * f.f0 * f.mu_f * (n - 2 * n_minus) / n
    value = r_appr - cond + sign_term
    sd = signrank_autocorrelation_std(_hybrid_key(flavor), n, standardization)
    return value, cond, math.sqrt(n - 1) * value / sd


def signrank_autocorrelation(
    z, flavor: str = "L/vdW", f: InnovationDensity | None = None, standardization: str = "exact"
) -> SerialResult:
    z = np.asarray(z, dtype=float)
    if z.ndim != 1:
        raise DataError("expected a 1-d series")
    value, cond, zz = signrank_autocorrelation_batch(z, flavor, f, standardization)
    sd = signrank_autocorrelation_std(_hybrid_key(flavor), z.size, standardization)
    return SerialResult(float(value[0]), float(cond[0]), sd, float(zz[0]), "conditional")


def serial_representation_gap(z, kernel: SerialKernel, f: InnovationDensity) -> np.ndarray:
    """``sqrt(n - k)`` times the remainder of the asymptotic representation of ``S - E S``.

    The leading terms are the kernel statistic at ``F(Z_t)`` minus its mean
    given the order statistics, plus the sign-block mean minus ``mu``.  Only
    product kernels (approximate scores) are supported; rows of ``z`` are
    replications.
    """
    if not kernel.product_form:
        raise ValueError("the representation gap is implemented for product kernels")
    z = np.atleast_2d(np.asarray(z, dtype=float))
    n = z.shape[1]
    k = kernel.k
    phi, psi = kernel.factors
    S = serial_statistic_approx_batch(z, kernel)
    ES, _ = serial_centering(kernel, n, "approx")
    u = f.cdf(z)
    a, b = phi(u), psi(u)
    T = np.mean(a[:, k:] * b[:, : n - k], axis=1)
    ET = (a.sum(1) * b.sum(1) - (a * b).sum(1)) / (n * (n - 1))
    n_minus = (z < 0).sum(axis=1)
    blocks = np.array([sign_block_mean(kernel, int(v), n) for v in n_minus])
    return math.sqrt(n - k) * (S - ES - (T - ET) - (blocks - kernel.moments.mu))
