"""Compare the compiled enumeration kernel with the pure-Python fallback.

Runs the full house-bounded enumeration tree for each degree with both
backends, checks that leaves and node counts agree, and prints timings.

    python3 benchmarks/bench_kernels.py --degrees 4 5 6 --repeat 3
"""
import argparse
import time

from steinlab import _kernels_py, kernels
from steinlab.szenum import _bounds


def full_tree(fn, d, a):
    sb, cb = _bounds(d, a)
    leaves, nodes = [], 0
    for c1 in range(-cb[0], cb[0] + 1):
        found, n = fn(d, list(sb), list(cb), (c1,))
        leaves.extend(tuple(x) for x in found)
        nodes += n
    return leaves, nodes


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--degrees", type=int, nargs="+", default=[3, 4, 5, 6, 7])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if kernels._compiled is None:
        print("compiled kernel not available; build with `pip install -e . --no-build-isolation`")
        return
    print(f"{'d':>3} {'nodes':>10} {'leaves':>8} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for d in args.degrees:
        a = 2 ** (1 / d) * (1 + 1e-9)
        tp, (lp, np_) = best_of(lambda: full_tree(_kernels_py.enumerate_prefix, d, a), args.repeat)
        tc, (lc, nc) = best_of(lambda: full_tree(kernels._compiled.enumerate_prefix, d, a), args.repeat)
        if (lp, np_) != (lc, nc):
            raise SystemExit(f"backends disagree at d={d}")
        print(f"{d:>3} {nc:>10} {len(lc):>8} {tp:>10.4f} {tc:>10.4f} {tp / tc:>8.1f}x")


if __name__ == "__main__":
    main()
