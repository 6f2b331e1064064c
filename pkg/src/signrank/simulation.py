"""MA(1) data generation and the Monte Carlo power-study harness.

Random streams
--------------
Every replication owns an independent ``numpy.random.Generator`` built from
``SeedSequence(seed, spawn_key=key)``.  Without common random numbers the key
is ``(sign_bit(theta), round(|theta| * 1e6), rep)``; with them it is
``(rep,)`` so that all ``theta`` values reuse the same innovations.  Results
therefore do not depend on worker counts or evaluation order.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from .distributions import InnovationDensity, parse_density
from .serial import (
    ordinary_autocorrelation_batch,
    rank_autocorrelation_batch,
    signrank_autocorrelation_batch,
)
from .testing import DEFAULT_ALPHA, two_sided_pvalues

__all__ = [
    "MA1Config",
    "PowerCurve",
    "STATISTICS",
    "STATISTIC_LABELS",
    "DEFAULT_THETA_GRID",
    "stream",
    "simulate_ma1",
    "ma1_from_innovations",
    "ma1_residuals",
    "null_z_scores",
    "power_study",
    "write_power_csv",
    "read_power_csv",
    "plot_power_curves",
]

DEFAULT_THETA_GRID = (-0.3, -0.25, -0.2, -0.15, -0.1, -0.05, 0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3)

STATISTICS = ("ac", "vdw", "wilcoxon", "laplace", "wvdw", "lvdw")
STATISTIC_LABELS = {
    "ac": "autocorrelation",
    "vdw": "van der Waerden rank",
    "wilcoxon": "Wilcoxon rank",
    "laplace": "Laplace rank",
    "wvdw": "sign-and-rank W/vdW",
    "lvdw": "sign-and-rank L/vdW",
}


def _z_scores(name: str, y: np.ndarray) -> np.ndarray:
    if name == "ac":
        return ordinary_autocorrelation_batch(y)[1]
    if name in ("vdw", "wilcoxon", "laplace"):
        return rank_autocorrelation_batch(y, name)[1]
    if name in ("wvdw", "lvdw"):
        return signrank_autocorrelation_batch(y, name)[2]
    raise ValueError(f"unknown statistic {name!r}; expected one of {STATISTICS}")


def null_z_scores(name: str, y) -> np.ndarray:
    """Standardized statistic ``name`` for each row of ``y`` (testing randomness)."""
    return _z_scores(name, np.atleast_2d(np.asarray(y, dtype=float)))


@dataclass(frozen=True)
class MA1Config:
    theta: float
    n: int
    density: InnovationDensity
    seed: int = 0

    def __post_init__(self):
        if not abs(self.theta) < 1:
            raise ValueError(f"need |theta| < 1, got {self.theta}")
        if self.n < 8:
            raise ValueError(f"need n >= 8, got {self.n}")


def stream(seed: int, theta: float, rep: int, crn: bool = False) -> np.random.Generator:
    """Generator for one replication (see the module docstring for the key layout)."""
    if crn:
        key = (rep,)
    else:
        key = (int(theta < 0), int(round(abs(theta) * 1e6)), rep)
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def ma1_from_innovations(eps, theta: float) -> np.ndarray:
    """``Y_t = eps_t + theta eps_{t-1}`` along the last axis with ``eps_0 = 0``."""
    eps = np.asarray(eps, dtype=float)
    y = eps.copy()
    y[..., 1:] += theta * eps[..., :-1]
    return y


def simulate_ma1(cfg: MA1Config, rng: np.random.Generator) -> np.ndarray:
    return ma1_from_innovations(cfg.density.sample(rng, cfg.n), cfg.theta)


def ma1_residuals(y, theta: float) -> np.ndarray:
    """``Z_t = Y_t - theta Z_{t-1}`` with ``Z_0 = 0``, along the last axis."""
    if not abs(theta) < 1:
        raise ValueError(f"need |theta| < 1, got {theta}")
    return signal.lfilter([1.0], [1.0, theta], np.asarray(y, dtype=float), axis=-1)


@dataclass(frozen=True)
class PowerCurve:
    statistic_name: str
    density_name: str
    theta_grid: np.ndarray
    rejection_rate: np.ndarray
    replications: int
    n: int
    alpha: float
    mc_stderr: np.ndarray = field(init=False)

    def __post_init__(self):
        p = np.asarray(self.rejection_rate, dtype=float)
        object.__setattr__(self, "mc_stderr", np.sqrt(p * (1 - p) / self.replications))

    def rate_at(self, theta: float) -> float:
        idx = np.flatnonzero(np.isclose(self.theta_grid, theta, atol=1e-12))
        if idx.size == 0:
            raise KeyError(f"theta={theta} not in the grid")
        return float(self.rejection_rate[idx[0]])


def _one_theta(args) -> np.ndarray:
    density, stats, theta, n, reps, alpha, seed, crn = args
    eps = np.stack([density.sample(stream(seed, theta, r, crn), n) for r in range(reps)])
    y = ma1_from_innovations(eps, theta)
    rates = []
    for name in stats:
        p = two_sided_pvalues(_z_scores(name, y))
        rates.append(np.count_nonzero(p < alpha) / reps)
    return np.array(rates)


def power_study(
    density,
    stats=STATISTICS,
    theta_grid=DEFAULT_THETA_GRID,
    n: int = 250,
    reps: int = 1000,
    alpha: float = DEFAULT_ALPHA,
    seed: int = 0,
    *,
    crn: bool = False,
    workers: int = 1,
) -> list[PowerCurve]:
    """Empirical rejection rates of two-sided randomness tests on MA(1) series.

    The statistics never see ``theta``; they test ``theta = 0`` on the raw
    series.  ``density`` is an ``InnovationDensity`` or a spec string accepted
    by ``parse_density``.
    """
    if isinstance(density, str):
        density = parse_density(density)
    stats = tuple(STATISTICS if stats in ("all", None) else stats)
    for s in stats:
        if s not in STATISTICS:
            raise ValueError(f"unknown statistic {s!r}; expected one of {STATISTICS}")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if n < 8:
        raise ValueError("n must be >= 8")
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    thetas = np.asarray(theta_grid, dtype=float)
    if np.any(np.abs(thetas) >= 1):
        raise ValueError("theta values must satisfy |theta| < 1")
    jobs = [(density, stats, float(t), n, reps, alpha, seed, crn) for t in thetas]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_one_theta, jobs))
    else:
        rows = [_one_theta(j) for j in jobs]
    table = np.stack(rows)  # (theta, statistic)
    return [
        PowerCurve(s, density.name, thetas.copy(), table[:, i], reps, n, alpha)
        for i, s in enumerate(stats)
    ]


_CSV_FIELDS = ("density", "statistic", "theta", "rate", "stderr", "reps", "n", "alpha")


def write_power_csv(curves, path=None) -> str:
    """Serialize curves as CSV; writes to ``path`` when given and returns the text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_CSV_FIELDS)
    for c in curves:
        for t, r, s in zip(c.theta_grid, c.rejection_rate, c.mc_stderr):
            w.writerow([c.density_name, c.statistic_name, f"{t:g}", f"{r:.4f}", f"{s:.6f}", c.replications, c.n, f"{c.alpha:g}"])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def read_power_csv(path) -> list[PowerCurve]:
    groups: dict[tuple[str, str], list[dict]] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(_CSV_FIELDS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"power CSV lacks columns {sorted(missing)}")
        for row in reader:
            groups.setdefault((row["density"], row["statistic"]), []).append(row)
    curves = []
    for (dens, stat), rows in groups.items():
        curves.append(
            PowerCurve(
                stat,
                dens,
                np.array([float(r["theta"]) for r in rows]),
                np.array([float(r["rate"]) for r in rows]),
                int(rows[0]["reps"]),
                int(rows[0]["n"]),
                float(rows[0]["alpha"]),
            )
        )
    return curves


def plot_power_curves(curves, path, title: str | None = None) -> None:
    """Static SVG with one line per statistic over the theta grid (byte-deterministic)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with matplotlib.rc_context({"svg.hashsalt": "signrank", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6.4, 4.4))
        for c in curves:
            ax.plot(c.theta_grid, c.rejection_rate, marker="o", ms=3, label=STATISTIC_LABELS.get(c.statistic_name, c.statistic_name))
        if curves:
            ax.axhline(curves[0].alpha, color="grey", lw=0.6, ls="--")
            dens = curves[0].density_name
            ax.set_title(title or f"Empirical power, {dens} (n={curves[0].n}, M={curves[0].replications})")
        ax.set_xlabel("theta")
        ax.set_ylabel("rejection rate")
        ax.set_ylim(0, 1.02)
        ax.legend(fontsize=7, loc="lower left")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
