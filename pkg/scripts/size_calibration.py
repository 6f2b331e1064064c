"""Null rejection rates and KS normality of every standardized statistic.

For each density, simulates i.i.d. innovations (theta = 0) and reports the
empirical size at alpha = 0.05 with its Monte Carlo standard error and the KS
p-value of the z-scores against N(0, 1).

    python3 scripts/size_calibration.py --reps 4000 --n 250
"""

import argparse

import numpy as np
from scipy import stats

from signrank.distributions import DENSITY_NAMES, parse_density
from signrank.simulation import STATISTICS, null_z_scores
from signrank.testing import two_sided_pvalues


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=2000)
    ap.add_argument("--n", type=int, default=250)
    ap.add_argument("--seed", type=int, default=20240917)
    ap.add_argument("--densities", default="abcdef")
    args = ap.parse_args()
    se = np.sqrt(0.05 * 0.95 / args.reps)
    print(f"n={args.n} reps={args.reps}; size MC standard error {se:.4f}")
    print(f"{'density':<8}" + "".join(f"{s:>22}" for s in STATISTICS))
    for j, letter in enumerate(args.densities):
        rng = np.random.default_rng([args.seed, j])
        z = parse_density(letter).sample(rng, args.reps * args.n).reshape(args.reps, args.n)
        cells = []
        for s in STATISTICS:
            zs = null_z_scores(s, z)
            size = np.mean(two_sided_pvalues(zs) < 0.05)
            cells.append(f"{size:.4f} (KS p {stats.kstest(zs, 'norm').pvalue:.2f})")
        print(f"({letter})     " + "".join(f"{c:>22}" for c in cells) + f"   {DENSITY_NAMES[letter]}")


if __name__ == "__main__":
    main()
