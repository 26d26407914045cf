"""Measured reconstruction errors on the lower-bound matrices next to their closed forms.

Prints, for each (alpha, r), the spectral and Frobenius errors of the first r
columns of the single-block matrix, and for each k the block-diagonal error
against both the loose form k / (r + alpha^2) and the exact k / (r + k alpha^2).
"""
import argparse

import numpy as np

from cssel.linalg import frobenius_norm_sq, pseudo_inverse, spectral_norm
from cssel.testbeds import (gen_frobenius_lb, gen_spectral_lb, spectral_lb_error,
                            spectral_lb_frob_error)


def residual_errors(A, cols):
    C = A[:, cols]
    R = A - C @ pseudo_inverse(C) @ A
    return spectral_norm(R) ** 2, frobenius_norm_sq(R)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--alphas", default="1,0.1,0.01")
    p.add_argument("--budgets", default="1,5,20")
    p.add_argument("--ks", default="1,2,4,5")
    args = p.parse_args()
    n = args.n
    alphas = [float(a) for a in args.alphas.split(",")]
    budgets = [int(r) for r in args.budgets.split(",")]
    ks = [int(k) for k in args.ks.split(",")]

    print(f"single block, n={n}")
    print(f"{'alpha':>8} {'r':>4} {'spec2':>14} {'closed':>14} {'frob2':>14} {'closed':>14}")
    for alpha in alphas:
        A = gen_spectral_lb(n, alpha)
        for r in budgets:
            s2, f2 = residual_errors(A, list(range(r)))
            print(f"{alpha:8g} {r:4d} {s2:14.8g} {spectral_lb_error(n, r, alpha):14.8g} "
                  f"{f2:14.8g} {spectral_lb_frob_error(n, r, alpha):14.8g}")

    print(f"\nblock diagonal, n={n}, r/k columns per block")
    print(f"{'alpha':>8} {'r':>4} {'k':>3} {'frob2':>14} {'k/(r+a2)':>14} {'exact':>14} "
          f"{'rel.gap':>10}")
    for alpha in alphas:
        a2 = alpha * alpha
        for r in budgets:
            for k in ks:
                if n % k or r % k:
                    continue
                B = gen_frobenius_lb(n, k, alpha)
                m = n // k
                cols = [b * m + j for b in range(k) for j in range(r // k)]
                _, f2 = residual_errors(B, cols)
                loose = (n - r) * (1 + k / (r + a2)) * a2
                exact = a2 * (n - r) * (1 + k / (r + k * a2))
                print(f"{alpha:8g} {r:4d} {k:3d} {f2:14.8g} {loose:14.8g} {exact:14.8g} "
                      f"{abs(f2 - loose) / loose:10.3g}")


if __name__ == "__main__":
    main()
