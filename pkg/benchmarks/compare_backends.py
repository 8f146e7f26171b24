"""Compare the numba and numpy kernel backends on signing + inversion.

Usage:
    python3 benchmarks/compare_backends.py [--depths 6,8,10,12] [--dim 2]
        [--batch 50] [--repeats 3] [--seed 7]

Prints a CSV table (backend, depth, sign_seconds, invert_seconds) to stdout,
taking the best of ``--repeats`` runs for each cell.
"""

import argparse
import sys
import time

import numpy as np

from siginvert import (
    available_backends,
    batch_invert,
    path_signature,
    set_backend,
)
from siginvert.cli import random_benchmark_path


def best_of(repeats, fn):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--depths", default="6,8,10,12")
    ap.add_argument("--dim", type=int, default=2)
    ap.add_argument("--batch", type=int, default=50)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args(argv)
    depths = [int(f) for f in args.depths.split(",")]

    print("backend,depth,sign_seconds,invert_seconds")
    for backend in available_backends():
        set_backend(backend)
        for depth in depths:
            rng = np.random.default_rng(args.seed)
            paths = [random_benchmark_path(rng, args.dim)
                     for _ in range(args.batch)]
            # warmup (JIT compilation on the numba backend)
            batch_invert([path_signature(paths[0], depth)])
            t_sign = best_of(args.repeats,
                             lambda: [path_signature(p, depth) for p in paths])
            sigs = [path_signature(p, depth) for p in paths]
            t_invert = best_of(args.repeats, lambda: batch_invert(sigs))
            print(f"{backend},{depth},{t_sign:.6f},{t_invert:.6f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
