"""Monte-Carlo means of the randomized factorizations and selection drivers
against their expectation bounds."""
import argparse
import math
from math import sqrt

import numpy as np

from cssel.approx_svd import (RngSpec, fast_frobenius_factorization,
                              fast_spectral_factorization)
from cssel.linalg import frobenius_norm_sq, spectral_norm
from cssel.selection import (assemble_bound, fast_frobenius, fast_spectral, norm_sampling,
                             relative_error_css)
from cssel.testbeds import gen_spectrum, geometric_spectrum


def mean(xs):
    return math.fsum(xs) / len(xs)


def row(name, value, limit):
    flag = "ok" if value <= limit else "OVER"
    print(f"{name:<34} {value:12.6g} {limit:12.6g}  {flag}")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--m", type=int, default=60)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--decay", type=float, default=0.85)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--r", type=int, default=16)
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=6)
    args = p.parse_args()

    sig = geometric_spectrum(min(args.m, args.n), args.decay)
    A = gen_spectrum(args.m, args.n, sig, seed=args.seed)
    k, r, eps, T = args.k, args.r, args.eps, args.trials
    tail = float(np.sum(sig[k:] ** 2))
    n = args.n
    print(f"A: {args.m}x{n}, geometric decay {args.decay}, k={k}, r={r}, eps={eps}, "
          f"{T} trials")
    print(f"{'quantity':<34} {'mean':>12} {'bound':>12}")

    e_f = [frobenius_norm_sq(fast_frobenius_factorization(A, k, eps, RngSpec(t)).E)
           for t in range(T)]
    row("||E||_F^2 (frobenius flavor)", mean(e_f), (1 + eps) * tail)
    e_2 = [spectral_norm(fast_spectral_factorization(A, k, eps, RngSpec(t)).E)
           for t in range(T)]
    row("||E||_2 (spectral flavor)", mean(e_2), (sqrt(2) + eps) * sig[k])

    ratios = [fast_spectral(A, k, r, eps, seed=t).report.ratio for t in range(T)]
    row("fast-spectral ratio", mean(ratios),
        assemble_bound("fast-spectral", args.m, n, n, k, r, eps))
    ratios = [fast_frobenius(A, k, r, eps, seed=t).report.ratio for t in range(T)]
    row("fast-frobenius ratio", mean(ratios),
        assemble_bound("fast-frobenius", args.m, n, n, k, r, eps))
    runs = [relative_error_css(A, k, eps, seed=t) for t in range(T)]
    row("relative-error ratio", mean([x.report.ratio for x in runs]), 1 + eps)
    print(f"{'':<34} columns used: mean {mean([x.indices.size for x in runs]):.1f}, "
          f"budget {runs[0].params.budget}")
    errs = [norm_sampling(A, r, seed=t, k=k).report.proj_frob_err2 for t in range(T)]
    row("norm-sampling error", mean(errs), tail + k / r * frobenius_norm_sq(A))


if __name__ == "__main__":
    main()
