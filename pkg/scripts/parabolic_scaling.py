"""Parabolic point diagnostics: horizon scaling, cluster sizes, annulus ratio.

For each n the script prints the entry probability, the implied horizon
N = t L / p_hat, the finite-ell sum of lambda_hat beyond ell = 1, the mass
that escaped to the tail bin, and p_hat / mu(V_{n, L+K-1}).
"""

import argparse
import math

from hitstats.counting import cusp_hit_prob, estimate_lambdas
from hitstats.dynamics import PomeauManneville
from hitstats.harness import loglog_slope
from hitstats.measure import estimate_density
from hitstats.targets import Empirical, ParabolicAnnulus, horizon, target_measure


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alpha", type=float, default=0.5)
    ap.add_argument("--n", type=int, nargs="+", default=[500, 1000, 2000, 4000])
    ap.add_argument("--L", type=int, default=2**10)
    ap.add_argument("--K", type=int, help="default ceil(sqrt(L))")
    ap.add_argument("--t", type=float, default=1.0)
    ap.add_argument("--trials", type=int, default=100_000)
    ap.add_argument("--lambdas", action="store_true", help="also estimate the cluster spectrum")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    K = args.K or math.ceil(math.sqrt(args.L))
    m = PomeauManneville(args.alpha)
    d = estimate_density(m)
    Ns = []
    print(f"alpha={args.alpha} L={args.L} K={K}")
    print("n\tp_hat\tse\tN\tratio\tsum_lambda_2+\ttail")
    for i, n in enumerate(args.n):
        V = ParabolicAnnulus(args.alpha, n, K)
        hp = cusp_hit_prob(m, d, V, args.L, args.trials, args.seed + 2 * i, args.threads)
        N = horizon(Empirical(args.t, args.L), p_hat=hp.p)
        Ns.append(N)
        ratio = hp.p / target_measure(ParabolicAnnulus(args.alpha, n, args.L + K - 1), d)
        lam_sum = tail = float("nan")
        if args.lambdas:
            rep = estimate_lambdas(m, d, V, args.L, args.trials, args.seed + 2 * i + 1, threads=args.threads)
            lam_sum, tail = float(rep.lambda_hat[1:].sum()), rep.lambda_tail
        print(f"{n}\t{hp.p:.6g}\t{hp.se:.2g}\t{N:.4g}\t{ratio:.4f}\t{lam_sum:.4f}\t{tail:.4f}")
    if len(Ns) > 1:
        print(f"log-log slope of N vs n: {loglog_slope(args.n, Ns):.4f} (1/alpha = {1 / args.alpha:.4f})")
    print(f"largest horizon {max(Ns):.3g} steps; W simulation needs trials x N of them")


if __name__ == "__main__":
    main()
