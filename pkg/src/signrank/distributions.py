"""Innovation densities used in the MA(1) power study.

Every density is exposed in a *standardized* form with median zero.  The
skew-normal and normal-mixture kinds are additionally rescaled to unit
variance; the half-spliced kinds (Cauchy/normal, t5/normal and the two
hybrid score densities) already have median zero by construction and are
used as defined.

Each density also knows its location score ``-f'/f``, which gives the
optimal score-generating function ``phi_f(u) = -f'/f(F^{-1}(u))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import integrate, optimize, special, stats

from .errors import InfiniteMeanError, NumericalError

__all__ = [
    "GAMMA_LOGISTIC",
    "GAMMA_LAPLACE",
    "InnovationDensity",
    "make_density",
    "parse_density",
    "density_pdf",
    "density_cdf",
    "density_quantile",
    "density_sample",
    "density_f0_mu",
    "DENSITY_NAMES",
]

GAMMA_LOGISTIC = math.sqrt(math.pi / 8.0)
GAMMA_LAPLACE = math.sqrt(math.pi / 2.0)

_SQRT_2PI = math.sqrt(2.0 * math.pi)


# ---------------------------------------------------------------------------
# raw (unstandardized) families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _HalfSpliced:
    """``f = f_left * I[z <= 0] + phi_N(0,1)(z) * I[z > 0]``.

    ``left`` is a scipy distribution symmetric about zero, so its negative
    half carries mass exactly 1/2.
    """

    left_name: str
    left_param: float = 1.0

    @cached_property
    def left(self):
        if self.left_name == "cauchy":
            return stats.cauchy()
        if self.left_name == "t":
            return stats.t(self.left_param)
        if self.left_name == "logistic":
            return stats.logistic(scale=self.left_param)
        if self.left_name == "laplace":
            return stats.laplace(scale=self.left_param)
        if self.left_name == "normal":
            return stats.norm()
        raise ValueError(f"unknown left half {self.left_name!r}")

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= 0, self.left.pdf(np.minimum(x, 0.0)), stats.norm.pdf(x))

    def pdf_left0(self) -> float:
        return float(self.left.pdf(0.0))

    def pdf_right0(self) -> float:
        return 1.0 / _SQRT_2PI

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= 0, self.left.cdf(np.minimum(x, 0.0)), special.ndtr(x))

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        with np.errstate(all="ignore"):
            lo = self.left.ppf(np.minimum(u, 0.5))
            hi = special.ndtri(np.maximum(u, 0.5))
        return np.where(u <= 0.5, lo, hi)

    def location_score(self, x):
        x = np.asarray(x, dtype=float)
        xl = np.minimum(x, 0.0)
        name, p = self.left_name, self.left_param
        if name == "cauchy":
            left = 2.0 * xl / (1.0 + xl**2)
        elif name == "t":
            left = (p + 1.0) * xl / (p + xl**2)
        elif name == "logistic":
            left = np.tanh(xl / (2.0 * p)) / p
        elif name == "laplace":
            left = np.full_like(xl, -1.0 / p)
        else:
            left = xl
        return np.where(x <= 0, left, x)

    def sample(self, rng: np.random.Generator, count: int):
        return self.ppf(rng.random(count))

    @property
    def finite_mean(self) -> bool:
        return self.left_name != "cauchy"

    def half_means(self) -> tuple[float, float]:
        """(int_{-inf}^0 x f, int_0^inf x f)."""
        right = 1.0 / _SQRT_2PI
        name, p = self.left_name, self.left_param
        if name == "cauchy":
            return -math.inf, right
        if name == "logistic":
            return -p * math.log(2.0), right
        if name == "laplace":
            return -p / 2.0, right
        if name == "normal":
            return -right, right
        val, err = integrate.quad(lambda x: x * self.left.pdf(x), -np.inf, 0.0, epsabs=1e-13)
        return val, right

    def median(self) -> float:
        return 0.0

    def mean(self) -> float:
        lo, hi = self.half_means()
        return lo + hi

    def var(self) -> float:
        raise NotImplementedError("half-spliced densities are not variance-rescaled")


@dataclass(frozen=True)
class _SkewNormal:
    lam: float

    @cached_property
    def dist(self):
        return stats.skewnorm(self.lam)

    @property
    def delta(self) -> float:
        return self.lam / math.sqrt(1.0 + self.lam**2)

    def pdf(self, x):
        return self.dist.pdf(x)

    def cdf(self, x):
        return self.dist.cdf(x)

    def ppf(self, u):
        return self.dist.ppf(u)

    def location_score(self, x):
        x = np.asarray(x, dtype=float)
        a = self.lam
        # -f'/f = x - a * phi(a x) / Phi(a x), evaluated in log space
        ratio = np.exp(-0.5 * (a * x) ** 2 - 0.5 * math.log(2 * math.pi) - special.log_ndtr(a * x))
        return x - a * ratio

    def sample(self, rng: np.random.Generator, count: int):
        d = self.delta
        z0 = rng.standard_normal(count)
        z1 = rng.standard_normal(count)
        return d * np.abs(z0) + math.sqrt(1.0 - d * d) * z1

    finite_mean = True

    def mean(self) -> float:
        return self.delta * math.sqrt(2.0 / math.pi)

    def var(self) -> float:
        return 1.0 - 2.0 * self.delta**2 / math.pi

    def median(self) -> float:
        return _solve_median(self.cdf, self.mean(), math.sqrt(self.var()))


@dataclass(frozen=True)
class _NormalMixture:
    weights: tuple[float, ...]
    means: tuple[float, ...]
    sds: tuple[float, ...]

    def _comp_pdf(self, x):
        x = np.asarray(x, dtype=float)[..., None]
        w, m, s = (np.asarray(v) for v in (self.weights, self.means, self.sds))
        return w * stats.norm.pdf(x, m, s)

    def pdf(self, x):
        return self._comp_pdf(x).sum(axis=-1)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)[..., None]
        w, m, s = (np.asarray(v) for v in (self.weights, self.means, self.sds))
        return (w * special.ndtr((x - m) / s)).sum(axis=-1)

    def ppf(self, u):
        mu, sd = self.mean(), math.sqrt(self.var())
        return _ppf_by_root(self.cdf, u, mu, sd)

    def location_score(self, x):
        x = np.asarray(x, dtype=float)
        comp = self._comp_pdf(x)
        m, s = np.asarray(self.means), np.asarray(self.sds)
        num = (comp * (x[..., None] - m) / s**2).sum(axis=-1)
        return num / comp.sum(axis=-1)

    def sample(self, rng: np.random.Generator, count: int):
        k = rng.choice(len(self.weights), size=count, p=np.asarray(self.weights))
        z = rng.standard_normal(count)
        return np.asarray(self.means)[k] + np.asarray(self.sds)[k] * z

    finite_mean = True

    def mean(self) -> float:
        return float(np.dot(self.weights, self.means))

    def var(self) -> float:
        w, m, s = (np.asarray(v) for v in (self.weights, self.means, self.sds))
        return float(np.dot(w, s**2 + m**2) - np.dot(w, m) ** 2)

    def median(self) -> float:
        return _solve_median(self.cdf, self.mean(), math.sqrt(self.var()))


def _solve_median(cdf, center: float, width: float) -> float:
    lo, hi = center - width, center + width
    while float(cdf(lo)) > 0.5:
        lo -= 2 * width
    while float(cdf(hi)) < 0.5:
        hi += 2 * width
    return optimize.brentq(lambda x: float(cdf(x)) - 0.5, lo, hi, xtol=1e-14, rtol=1e-15, maxiter=500)


def _ppf_by_root(cdf, u, center: float, width: float):
    u = np.asarray(u, dtype=float)
    out = np.empty(u.shape)
    for idx, ui in np.ndenumerate(u):
        if not 0.0 < ui < 1.0:
            out[idx] = -np.inf if ui == 0.0 else (np.inf if ui == 1.0 else np.nan)
            continue
        lo, hi = center - width, center + width
        while float(cdf(lo)) > ui:
            lo -= 2 * (hi - lo)
        while float(cdf(hi)) < ui:
            hi += 2 * (hi - lo)
        out[idx] = optimize.brentq(
            lambda x: float(cdf(x)) - ui, lo, hi, xtol=1e-13, rtol=1e-15, maxiter=500
        )
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# standardized density
# ---------------------------------------------------------------------------

KINDS = (
    "cauchy-normal",
    "t5-normal",
    "skew-normal",
    "mixed-normal",
    "hybrid-logistic-normal",
    "hybrid-laplace-normal",
    "normal",
)


@dataclass(frozen=True)
class InnovationDensity:
    """A zero-median density ``f`` with cdf ``F``.

    ``shift`` and ``scale`` map the raw family onto the standardized one:
    ``Z = (X - shift) / scale``.
    """

    kind: str
    params: tuple[float, ...]
    shift: float
    scale: float
    raw: object = field(repr=False, compare=False)

    @property
    def name(self) -> str:
        if not self.params or self.params in ((GAMMA_LOGISTIC,), (GAMMA_LAPLACE,)):
            return self.kind
        return f"{self.kind}:{','.join(_fmt(p) for p in self.params)}"

    def pdf(self, z):
        z = np.asarray(z, dtype=float)
        return self.scale * self.raw.pdf(self.shift + self.scale * z)

    def cdf(self, z):
        z = np.asarray(z, dtype=float)
        return self.raw.cdf(self.shift + self.scale * z)

    def quantile(self, u):
        arr = np.asarray(u, dtype=float)
        if np.any((arr <= 0.0) | (arr >= 1.0)) or np.any(np.isnan(arr)):
            raise ValueError("quantile argument must lie in the open interval (0, 1)")
        return (np.asarray(self.raw.ppf(arr)) - self.shift) / self.scale

    def location_score(self, z):
        """``-f'(z)/f(z)`` for the standardized density."""
        z = np.asarray(z, dtype=float)
        return self.scale * self.raw.location_score(self.shift + self.scale * z)

    def phi_f(self, u):
        """Optimal location score-generating function ``-f'/f(F^{-1}(u))``."""
        return self.location_score(self.quantile(u))

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        if count == 0:
            return np.empty(0)
        x = np.asarray(self.raw.sample(rng, count), dtype=float)
        return (x - self.shift) / self.scale

    @property
    def f0_left(self) -> float:
        if isinstance(self.raw, _HalfSpliced):
            return self.scale * self.raw.pdf_left0()
        return float(self.pdf(0.0))

    @property
    def f0_right(self) -> float:
        if isinstance(self.raw, _HalfSpliced):
            return self.scale * self.raw.pdf_right0()
        return float(self.pdf(0.0))

    @property
    def f0(self) -> float:
        return 0.5 * (self.f0_left + self.f0_right)

    @cached_property
    def half_means(self) -> tuple[float, float]:
        """``(int_{-inf}^0 z f(z) dz, int_0^inf z f(z) dz)``."""
        if isinstance(self.raw, _HalfSpliced):
            lo, hi = self.raw.half_means()
            return lo / self.scale, hi / self.scale
        lo, _ = integrate.quad(lambda z: z * float(self.pdf(z)), -np.inf, 0.0, epsabs=1e-12, limit=200)
        hi, _ = integrate.quad(lambda z: z * float(self.pdf(z)), 0.0, np.inf, epsabs=1e-12, limit=200)
        return lo, hi

    @property
    def mu_f(self) -> float:
        if not self.raw.finite_mean:
            raise InfiniteMeanError(f"{self.name} has no finite mean")
        lo, hi = self.half_means
        return lo + hi


def _fmt(p: float) -> str:
    return f"{p:g}"


def make_density(kind: str, params=()) -> InnovationDensity:
    """Build a standardized innovation density.

    Parameters
    ----------
    kind : str
        One of ``cauchy-normal``, ``t5-normal``, ``skew-normal`` (``params =
        (lam,)``), ``mixed-normal`` (``params = (w, m2, var2)``: weight ``w``
        on N(0, 1) and ``1 - w`` on N(m2, var2)), ``hybrid-logistic-normal``
        and ``hybrid-laplace-normal`` (optional ``params = (gamma,)``), or
        ``normal``.
    """
    params = tuple(float(p) for p in params)
    if not all(math.isfinite(p) for p in params):
        raise ValueError(f"non-finite density parameters {params}")
    if kind == "cauchy-normal":
        _expect(kind, params, 0)
        raw = _HalfSpliced("cauchy")
    elif kind == "t5-normal":
        _expect(kind, params, 0)
        raw = _HalfSpliced("t", 5.0)
    elif kind == "normal":
        _expect(kind, params, 0)
        raw = _HalfSpliced("normal")
    elif kind == "hybrid-logistic-normal":
        params = params or (GAMMA_LOGISTIC,)
        _expect(kind, params, 1)
        if params[0] <= 0:
            raise ValueError("gamma must be positive")
        raw = _HalfSpliced("logistic", params[0])
    elif kind == "hybrid-laplace-normal":
        params = params or (GAMMA_LAPLACE,)
        _expect(kind, params, 1)
        if params[0] <= 0:
            raise ValueError("gamma must be positive")
        raw = _HalfSpliced("laplace", params[0])
    elif kind == "skew-normal":
        _expect(kind, params, 1)
        raw = _SkewNormal(params[0])
    elif kind == "mixed-normal":
        _expect(kind, params, 3)
        w, m2, v2 = params
        if not 0.0 < w < 1.0 or v2 <= 0.0:
            raise ValueError("mixed-normal needs 0 < w < 1 and a positive variance")
        raw = _NormalMixture((w, 1.0 - w), (0.0, m2), (1.0, math.sqrt(v2)))
    else:
        raise ValueError(f"unknown density kind {kind!r}; expected one of {KINDS}")

    if isinstance(raw, _HalfSpliced):
        shift, scale = 0.0, 1.0
    else:
        shift, scale = raw.median(), math.sqrt(raw.var())
        if abs(float(raw.cdf(shift)) - 0.5) > 1e-10:
            raise NumericalError(f"median solve for {kind} missed 1/2 by {float(raw.cdf(shift)) - 0.5:g}")
    return InnovationDensity(kind, params, shift, scale, raw)


def _expect(kind, params, n):
    if len(params) != n:
        raise ValueError(f"{kind} takes {n} parameter(s), got {len(params)}")


# the six densities of the power study, keyed by their figure letter
DENSITY_NAMES = {
    "a": "cauchy-normal",
    "b": "t5-normal",
    "c": "skew-normal:-10",
    "d": "skew-normal:-20",
    "e": "mixed-normal:0.5,-5,2",
    "f": "mixed-normal:0.75,-5,1",
}


def parse_density(spec: str) -> InnovationDensity:
    """Parse a CLI density string such as ``skew-normal:-10`` or ``a``."""
    spec = spec.strip()
    spec = DENSITY_NAMES.get(spec, spec)
    kind, _, rest = spec.partition(":")
    params = [float(p) for p in rest.split(",")] if rest else []
    return make_density(kind, params)


# functional aliases -------------------------------------------------------


def density_pdf(d: InnovationDensity, z):
    return d.pdf(z)


def density_cdf(d: InnovationDensity, z):
    return d.cdf(z)


def density_quantile(d: InnovationDensity, u):
    return d.quantile(u)


def density_sample(d: InnovationDensity, rng: np.random.Generator, count: int) -> np.ndarray:
    return d.sample(rng, count)


def density_f0_mu(d: InnovationDensity) -> tuple[float, float]:
    """Return ``(f(0), mu_f)``.

    For a density without a finite mean `InfiniteMeanError` is raised; the
    exception still carries ``f0``.
    """
    try:
        mu = d.mu_f
    except InfiniteMeanError as exc:
        exc.f0 = d.f0
        raise
    return d.f0, mu
