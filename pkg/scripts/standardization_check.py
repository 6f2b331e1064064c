"""Compare the exact and asymptotic standardizations of the sign-and-rank autocorrelations.

Prints both standard deviations, the Monte Carlo standard deviation of
sqrt(n-1) times the statistic, and the null sizes each standardization yields.

    python3 scripts/standardization_check.py --n 250 --reps 20000
"""

import argparse
import math

import numpy as np

from signrank.serial import signrank_autocorrelation_batch, signrank_autocorrelation_std
from signrank.testing import two_sided_pvalues


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=250)
    ap.add_argument("--reps", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=20240917)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    # the statistics are distribution-free under the null, so normal draws suffice
    z = rng.standard_normal((args.reps, args.n))
    for flavor in ("W/vdW", "L/vdW"):
        value, _, _ = signrank_autocorrelation_batch(z, flavor)
        mc = math.sqrt(args.n - 1) * value.std()
        line = [f"{flavor}: MC sd {mc:.4f}"]
        for kind in ("exact", "asymptotic"):
            sd = signrank_autocorrelation_std(flavor, args.n, kind)
            size = np.mean(two_sided_pvalues(math.sqrt(args.n - 1) * value / sd) < 0.05)
            line.append(f"{kind} sd {sd:.4f} size {size:.4f}")
        print("; ".join(line))


if __name__ == "__main__":
    main()
