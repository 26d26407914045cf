"""Ratio to the optimal tail and wall time of every method over a range of budgets."""
import argparse

from cssel.mmio import read_matrix
from cssel.selection import Method, select_columns
from cssel.testbeds import gen_spectrum, geometric_spectrum


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--input", help="matrix file; default is a seeded 120x100 matrix")
    p.add_argument("--decay", type=float, default=0.9)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--budgets", default="10,20,40,80")
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    if args.input:
        A = read_matrix(args.input)
    else:
        A = gen_spectrum(120, 100, geometric_spectrum(100, args.decay), seed=args.seed)
    k = args.k
    print(f"A: {A.shape[0]}x{A.shape[1]}, k={k}")
    print(f"{'method':<16} {'r':>4} {'cols':>5} {'ratio':>10} {'bound':>10} {'ms':>9}")
    for method in Method:
        budgets = [None] if method is Method.RELATIVE_ERROR else \
            [int(b) for b in args.budgets.split(",")]
        for r in budgets:
            if r is not None and not k < r <= A.shape[1]:
                continue
            res = select_columns(A, method, k, r=r, eps=args.eps, seed=args.seed)
            rep = res.report
            print(f"{method.value:<16} {res.r:4d} {res.indices.size:5d} {rep.ratio:10.4f} "
                  f"{rep.bound:10.4f} {rep.wall_time * 1e3:9.2f}")


if __name__ == "__main__":
    main()
