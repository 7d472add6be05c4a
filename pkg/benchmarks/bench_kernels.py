"""Time the compiled rectangle kernels against the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--n 8] [--codes 5000] [--repeat 3]
"""

import argparse
import random
import sys
import time

import numpy as np

from gridlag import _pykernels
from gridlag.complex import encode
from gridlag.grid import GridDiagram


def random_grid(n, rng):
    while True:
        xs = rng.sample(range(n), n)
        os_ = rng.sample(range(n), n)
        if all(a != b for a, b in zip(xs, os_)):
            return GridDiagram.from_zero_based(xs, os_)


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return best, out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--codes", type=int, default=5000)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    try:
        from gridlag import _ckernels
    except ImportError:
        sys.exit("compiled extension not built; run pip install -e . --no-build-isolation")

    rng = random.Random(args.seed)
    g = random_grid(args.n, rng)
    codes = np.array(
        [encode(rng.sample(range(args.n), args.n)) for _ in range(args.codes)], dtype=np.uint64
    )
    print(f"grid {g}  n={args.n}  generators={len(codes)}")
    print(f"{'kernel':<16}{'python s':>12}{'cython s':>12}{'speedup':>10}")
    for name in ("forward_batch", "reverse_batch"):
        tp, (sp, dp) = best_time(lambda: getattr(_pykernels, name)(g.n, g.xs, g.os, codes), args.repeat)
        tc, (sc, dc) = best_time(lambda: getattr(_ckernels, name)(g.n, g.xs, g.os, codes), args.repeat)
        same = sorted(zip(sp.tolist(), dp.tolist())) == sorted(zip(sc.tolist(), dc.tolist()))
        if not same:
            sys.exit(f"{name}: backends disagree")
        print(f"{name:<16}{tp:>12.4f}{tc:>12.4f}{tp / tc:>9.1f}x")


if __name__ == "__main__":
    main()
