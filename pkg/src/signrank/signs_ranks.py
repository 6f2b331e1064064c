"""Signs, ranks and sign counts of a residual vector.

``(N, R)`` -- the sign counts together with the ordinary ranks -- is the
maximal invariant of the group of continuous, strictly increasing
transformations fixing zero.  Everything downstream is a function of it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DataError, TiedResidualsError, ZeroResidualError

__all__ = [
    "SignRankDecomposition",
    "decompose",
    "ranks_batch",
    "enumerate_null_invariant",
    "sign_count_pmf",
]


@dataclass(frozen=True)
class SignRankDecomposition:
    signs: np.ndarray
    ranks: np.ndarray
    n_minus: int
    n_plus: int

    @property
    def n(self) -> int:
        return self.n_minus + self.n_plus

    def key(self) -> tuple:
        return tuple(self.signs.tolist()), tuple(self.ranks.tolist())

    def __eq__(self, other):
        if not isinstance(other, SignRankDecomposition):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())


def _check(z: np.ndarray, require_nonzero: bool = True) -> None:
    if z.ndim < 1 or z.shape[-1] == 0:
        raise DataError("need at least one observation")
    if not np.all(np.isfinite(z)):
        raise DataError("residuals must be finite")
    if require_nonzero and np.any(z == 0.0):
        raise ZeroResidualError("zero residual: signs are undefined")


def ranks_batch(z, *, require_nonzero: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Ranks (1-based) and negative-sign counts along the last axis.

    Returns ``(ranks, n_minus)`` with ``ranks`` of the same shape as ``z``.
    Raises on ties, and on zeros unless ``require_nonzero`` is false (pure
    rank statistics do not need signs).
    """
    z = np.asarray(z, dtype=float)
    _check(z, require_nonzero)
    order = np.argsort(z, axis=-1, kind="stable")
    zs = np.take_along_axis(z, order, axis=-1)
    if np.any(np.diff(zs, axis=-1) == 0.0):
        raise TiedResidualsError("tied residuals: ranks are undefined")
    ranks = np.empty_like(order)
    np.put_along_axis(ranks, order, np.arange(1, z.shape[-1] + 1), axis=-1)
    n_minus = (z < 0).sum(axis=-1)
    return ranks, n_minus


def decompose(z) -> SignRankDecomposition:
    """Signs, ranks and sign counts of ``z``.

    >>> d = decompose([-1.0, 2.0, -0.5])
    >>> d.signs.tolist(), d.ranks.tolist(), d.n_minus, d.n_plus
    ([-1, 1, -1], [1, 3, 2], 2, 1)
    """
    z = np.asarray(z, dtype=float)
    if z.ndim != 1:
        raise DataError("decompose expects a 1-d series")
    ranks, n_minus = ranks_batch(z)
    signs = np.where(z > 0, 1, -1)
    n_minus = int(n_minus)
    return SignRankDecomposition(signs, ranks, n_minus, z.size - n_minus)


MAX_ENUMERATION_N = 9


def enumerate_null_invariant(n: int) -> list[tuple[SignRankDecomposition, Fraction]]:
    """Every attainable ``(signs, ranks)`` pair with its exact null probability.

    Under zero-median white noise the signs are uniform on ``{-1, 1}^n`` and,
    given the signs, the negative positions carry a uniform permutation of
    ``1..N-`` and the positive positions one of ``N- + 1..n``.
    """
    if not 1 <= n <= MAX_ENUMERATION_N:
        raise ValueError(f"enumeration supports 1 <= n <= {MAX_ENUMERATION_N}, got {n}")
    atoms = []
    for signs in itertools.product((-1, 1), repeat=n):
        neg = [i for i, s in enumerate(signs) if s < 0]
        pos = [i for i, s in enumerate(signs) if s > 0]
        n_minus = len(neg)
        prob = Fraction(1, 2**n * math.factorial(n_minus) * math.factorial(n - n_minus))
        for low in itertools.permutations(range(1, n_minus + 1)):
            for high in itertools.permutations(range(n_minus + 1, n + 1)):
                ranks = np.empty(n, dtype=int)
                ranks[neg] = low
                ranks[pos] = high
                atoms.append(
                    (SignRankDecomposition(np.array(signs), ranks, n_minus, n - n_minus), prob)
                )
    return atoms


def sign_count_pmf(n: int) -> np.ndarray:
    """Null law of ``N-``: ``C(n, v) / 2**n`` for ``v = 0..n`` (correctly rounded)."""
    return np.array([math.comb(n, v) / 2**n for v in range(n + 1)])
