"""Random strictly increasing maps of the real line that fix zero."""

import numpy as np


def random_zero_fixing_map(rng: np.random.Generator):
    """Piecewise-linear on each half-line with random knots and slopes, composed with a random odd-power warp."""
    knots_pos = np.sort(rng.exponential(1.0, size=5))
    knots_neg = np.sort(rng.exponential(1.0, size=5))
    slopes_pos = rng.uniform(0.05, 20.0, size=6)
    slopes_neg = rng.uniform(0.05, 20.0, size=6)
    power = rng.choice([1.0, 3.0, 1 / 3])

    def side(x, knots, slopes):
        # x >= 0
        edges = np.concatenate([[0.0], knots])
        out = np.zeros_like(x)
        for j in range(len(slopes)):
            lo = edges[j]
            hi = edges[j + 1] if j + 1 < len(edges) else np.inf
            out += slopes[j] * np.clip(x - lo, 0.0, hi - lo)
        return out

    def g(x):
        x = np.asarray(x, dtype=float)
        pos = side(np.maximum(x, 0.0), knots_pos, slopes_pos)
        neg = side(np.maximum(-x, 0.0), knots_neg, slopes_neg)
        y = pos - neg
        return np.sign(y) * np.abs(y) ** power

    return g
