"""Command line front end.

Exit codes: 0 ok, 2 invalid arguments, 3 I/O failure, 4 numerical breakdown,
5 a deterministic worst-case bound was violated (``evaluate`` only).
"""
import argparse
import csv
import json
import math
import os
import sys
import time

import numpy as np
from threadpoolctl import threadpool_limits

from . import testbeds
from .errors import InvalidInput, NumericalBreakdown
from .mmio import read_matrix, write_matrix
from .selection import Method, evaluate_selection, select_columns

EXIT_OK, EXIT_ARGS, EXIT_IO, EXIT_BREAKDOWN, EXIT_BOUND = 0, 2, 3, 4, 5


class IOFailure(Exception):
    pass


def thread_cap():
    raw = os.environ.get("CSSEL_THREADS")
    if not raw:
        return None
    try:
        value = int(raw)
    except ValueError:
        raise InvalidInput(f"CSSEL_THREADS must be an integer, got {raw!r}")
    if value < 1:
        raise InvalidInput("CSSEL_THREADS must be >= 1")
    return value


def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def report_dict(result):
    rep = result.report
    out = {
        "method": result.method.value,
        "k": result.k,
        "r": result.r,
        "eps": result.eps,
        "seed": result.seed,
        "indices": [int(i) for i in result.indices],
    }
    if result.weights is not None:
        out["weights"] = {str(int(i)): float(result.weights[i]) for i in result.indices}
    if result.draws is not None:
        out["draws"] = result.draws
    if result.params is not None:
        p = result.params
        out["params"] = {"eps0": p.eps0, "d": p.d, "alpha": p.alpha, "r_hat": p.r_hat,
                         "c0": p.c0, "s": p.s, "budget": p.budget}
    if rep is not None:
        out.update(errors_dict(rep))
        out["wall_ms"] = rep.wall_time * 1e3
    return out


def errors_dict(rep):
    # ratio is defined as 1 when the reference tail is zero
    return {
        "errors": {"spectral2": rep.spectral_err2, "frob2": rep.frob_err2,
                   "proj_spectral2": rep.proj_spectral_err2,
                   "proj_frob2": rep.proj_frob_err2},
        "tail": {"sigma_k1_sq": rep.sigma_kplus1_sq, "frob_tail_sq": rep.tail_frob2},
        "bound": _num(rep.bound),
        "hard_bound": _num(rep.hard_bound),
        "ratio": rep.ratio,
    }


def _read(path):
    try:
        return read_matrix(path)
    except (OSError, InvalidInput) as exc:
        raise IOFailure(str(exc)) from exc


def _write_json(path, data):
    text = json.dumps(data, indent=2, sort_keys=True)
    try:
        if path in (None, "-"):
            sys.stdout.write(text + "\n")
        else:
            with open(path, "w") as fh:
                fh.write(text + "\n")
    except OSError as exc:
        raise IOFailure(str(exc)) from exc


def cmd_select(args):
    A = _read(args.input)
    result = select_columns(A, args.method, args.k, r=args.r, eps=args.eps, seed=args.seed,
                            economy=args.economy)
    _write_json(args.output, report_dict(result))
    return EXIT_OK


def cmd_gen(args):
    if args.variant == "spectral-lb":
        A = testbeds.gen_spectral_lb(args.n, args.alpha)
    elif args.variant == "frobenius-lb":
        A = testbeds.gen_frobenius_lb(args.n, args.k, args.alpha)
    else:
        if args.sigmas:
            sig = [float(x) for x in args.sigmas.split(",")]
        else:
            sig = testbeds.geometric_spectrum(min(args.m, args.n), args.decay)
        A = testbeds.gen_spectrum(args.m, args.n, sig, seed=args.seed)
    comment = (f"cssel gen variant={args.variant} m={A.shape[0]} n={args.n} k={args.k} "
               f"alpha={args.alpha!r} seed={args.seed}")
    try:
        write_matrix(args.output, A, comment=comment)
    except OSError as exc:
        raise IOFailure(str(exc)) from exc
    return EXIT_OK


def _load_selection(path):
    try:
        with open(path) as fh:
            sel = json.load(fh)
    except OSError as exc:
        raise IOFailure(str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path}: not valid JSON: {exc}") from exc
    try:
        return (Method(sel["method"]), int(sel["k"]), int(sel["r"]), sel.get("eps"),
                [int(i) for i in sel["indices"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"{path}: malformed selection: {exc}") from exc


def cmd_evaluate(args):
    A = _read(args.input)
    method, k, r, eps, indices = _load_selection(args.selection)
    rep = evaluate_selection(A, method, k, indices, r, eps)
    norms = {x.strip().upper() for x in args.norms.split(",")}
    checked = (method.spectral and "2" in norms) or (not method.spectral and "F" in norms)
    ok = rep.within_bound or not checked
    out = {"method": method.value, "k": k, "r": r, "eps": eps, "indices": indices,
           **errors_dict(rep), "bound_checked": bool(checked and rep.hard_bound is not None),
           "within_bound": bool(ok)}
    _write_json(args.output, out)
    return EXIT_OK if ok else EXIT_BOUND


def cmd_bench(args):
    if args.trials < 1:
        raise InvalidInput("need --trials >= 1")
    A = _read(args.input)
    rows = []
    for trial in range(args.trials):
        t0 = time.perf_counter()
        res = select_columns(A, args.method, args.k, r=args.r, eps=args.eps,
                             seed=args.seed + trial, economy=args.economy)
        wall = (time.perf_counter() - t0) * 1e3
        rows.append((trial, res.report.ratio, wall, res.r))
    mean_ratio = math.fsum(r[1] for r in rows) / len(rows)
    mean_wall = math.fsum(r[2] for r in rows) / len(rows)
    try:
        fh = sys.stdout if args.output in (None, "-") else open(args.output, "w", newline="")
        try:
            w = csv.writer(fh)
            w.writerow(["method", "k", "r", "trial", "ratio", "wall_ms"])
            for trial, ratio, wall, r in rows:
                w.writerow([args.method, args.k, r, trial, repr(ratio), f"{wall:.3f}"])
            w.writerow([args.method, args.k, rows[0][3], "mean", repr(mean_ratio),
                        f"{mean_wall:.3f}"])
        finally:
            if fh is not sys.stdout:
                fh.close()
    except OSError as exc:
        raise IOFailure(str(exc)) from exc
    return EXIT_OK


def build_parser():
    methods = [m.value for m in Method]
    p = argparse.ArgumentParser(prog="cssel", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def selection_flags(sp):
        sp.add_argument("--input", required=True)
        sp.add_argument("--method", required=True, choices=methods)
        sp.add_argument("--k", type=int, required=True)
        sp.add_argument("--r", type=int)
        sp.add_argument("--eps", type=float)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--economy", action="store_true",
                        help="relative-error preset d=100, eps0=62/181")

    sp = sub.add_parser("select", help="select columns and write a JSON report")
    selection_flags(sp)
    sp.add_argument("--output")
    sp.set_defaults(func=cmd_select)

    sp = sub.add_parser("gen", help="generate a test matrix (.mtx or .csv)")
    sp.add_argument("--variant", required=True,
                    choices=["spectral-lb", "frobenius-lb", "spectrum"])
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--alpha", type=float, default=1e-2)
    sp.add_argument("--sigmas", help="comma separated singular values")
    sp.add_argument("--decay", type=float, default=0.8)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--output", required=True)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("evaluate", help="recompute errors of a stored selection")
    sp.add_argument("--input", required=True)
    sp.add_argument("--selection", required=True)
    sp.add_argument("--norms", default="2,F")
    sp.add_argument("--output")
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("bench", help="repeat a selection over derived seeds")
    selection_flags(sp)
    sp.add_argument("--trials", type=int, default=1)
    sp.add_argument("--output")
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "gen" and args.variant == "spectrum" and args.m is None:
        args.m = args.n
    try:
        with threadpool_limits(limits=thread_cap()):
            return args.func(args)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except IOFailure as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NumericalBreakdown as exc:
        print(f"numerical breakdown: {exc}", file=sys.stderr)
        return EXIT_BREAKDOWN


if __name__ == "__main__":
    sys.exit(main())
