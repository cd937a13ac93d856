"""Compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 3]

Checks that both give the same answers, then prints wall times and speedups.
"""
import argparse
import itertools
import random
import time

import numpy as np

from evokit import _fallback

try:
    from evokit import _kernels
except ImportError:  # extension not built
    _kernels = None


def _best(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def chain_cases():
    grid = [0, 1, -1, 2]
    n4 = []
    for vals in itertools.product(grid, repeat=6):
        m = [[0] * 4 for _ in range(4)]
        for (i, j), v in zip([(i, j) for i in range(4) for j in range(i + 1, 4)], vals):
            m[i][j] = v
        n4.append(m)
    rng = random.Random(0)
    n6 = [[[rng.randint(-3, 3) if j > i else 0 for j in range(6)] for i in range(6)] for _ in range(300)]
    dense = [[[rng.randint(-2, 2) for _ in range(5)] for _ in range(5)] for _ in range(300)]
    return {"upper n=4 (4096)": n4, "upper n=6 (300)": n6, "dense n=5 (300)": dense}


def bq_cases():
    return {
        "n=2 dibaric": np.array([[1.0, 0.0], [-1.0, 0.0]]),
        "n=2 identity": np.eye(2),
        "n=4 random": np.random.default_rng(1).normal(size=(4, 4)),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--starts", type=int, default=200)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled extension not available; only the fallback can run")
        return
    rows = []
    for name, cases in chain_cases().items():
        tp, rp = _best(lambda: [_fallback.principal_index_int(m) for m in cases], args.repeat)
        tc, rc = _best(lambda: [_kernels.principal_index_int(m) for m in cases], args.repeat)
        assert rp == rc, f"integer chain kernels disagree on {name}"
        rows.append(("principal_index_int", name, tp, tc))
    for name, A in bq_cases().items():
        n = A.shape[0]
        Z0 = np.stack([np.random.default_rng([0, k]).normal(size=2 * n) for k in range(args.starts)])

        def run(mod):
            Z, _ = mod.lm_bq_batch(A, Z0, 1e-2, 80)
            return mod.lm_bq_batch(A, Z, 0.0, 80)

        tp, (_, resp) = _best(lambda: run(_fallback), args.repeat)
        tc, (_, resc) = _best(lambda: run(_kernels), args.repeat)
        # same algorithm in different float order: compare which starts converge
        agree = np.mean((resp < 1e-9) == (resc < 1e-9))
        rows.append(("lm_bq_batch", f"{name}, {args.starts} starts (agree {agree:.0%})", tp, tc))
    w = max(len(r[1]) for r in rows)
    print(f"{'kernel':<20} {'case':<{w}} {'python s':>10} {'compiled s':>11} {'speedup':>8}")
    for k, name, tp, tc in rows:
        print(f"{k:<20} {name:<{w}} {tp:>10.4f} {tc:>11.4f} {tp / tc:>7.1f}x")


if __name__ == "__main__":
    main()
