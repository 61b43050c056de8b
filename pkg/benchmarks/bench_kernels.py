#!/usr/bin/env python3
"""Benchmark the compiled kernel backend against the pure-numpy fallback.

Times the batched Jacobi eigendecomposition (the hot kernel behind every
weight average, square root and adapted-basis build) plus an end-to-end
adapted-system build executed in subprocesses with the backend pinned via
DYADT1_PURE.

Usage: python benchmarks/bench_kernels.py [--repeats 5]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from dyadt1.kernels import _ref

try:
    from dyadt1.kernels import _fast
except ImportError:
    _fast = None

END_TO_END = r"""
import time
import numpy as np
from dyadt1 import kernels
from dyadt1.haar import build_system
from dyadt1.weights import generate_weight

weight = generate_weight("random_a2", 3, 8, {"t": 4.0}, seed=0)
t0 = time.perf_counter()
for _ in range(5):
    system = build_system(weight)
    system.haar_bound_certificate()
elapsed = (time.perf_counter() - t0) / 5
print(f"{kernels.BACKEND} {elapsed:.6f}")
"""


def time_kernel(fn, batch, repeats):
    best = float("inf")
    for _ in range(repeats):
        work = batch.copy()
        t0 = time.perf_counter()
        fn(work)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    print(f"{'kernel batch':>18} {'python':>12} {'cython':>12} {'speedup':>9}")
    for m, n in [(64, 2), (256, 3), (1024, 3), (256, 6), (64, 8)]:
        a = rng.standard_normal((m, n, n))
        a = 0.5 * (a + a.transpose(0, 2, 1))
        t_ref = time_kernel(_ref.jacobi_eigh_batch, a, args.repeats)
        if _fast is None:
            print(f"{m:>5} x {n}x{n:<8} {t_ref * 1e3:>10.2f}ms {'-':>12} {'-':>9}")
            continue
        t_fast = time_kernel(_fast.jacobi_eigh_batch, a, args.repeats)
        print(
            f"{m:>5} x {n}x{n:<8} {t_ref * 1e3:>10.2f}ms {t_fast * 1e3:>10.2f}ms "
            f"{t_ref / t_fast:>8.1f}x"
        )

    print("\nend-to-end adapted-basis build (d=3, depth=8, 5 runs each):")
    for pure in ("1", "0"):
        env = dict(os.environ, DYADT1_PURE=pure)
        out = subprocess.run(
            [sys.executable, "-c", END_TO_END], env=env, capture_output=True, text=True
        )
        line = out.stdout.strip() or out.stderr.strip()
        backend, _, elapsed = line.partition(" ")
        try:
            print(f"  {backend:>8}: {float(elapsed) * 1e3:.1f} ms per build")
        except ValueError:
            print(f"  {backend}: {line}")


if __name__ == "__main__":
    main()
