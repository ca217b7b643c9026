#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Micro section times the batched structure-constant product and the
modular sums on small (scenario-sized) and large batches.  The
end-to-end section runs the ascending builtin scenario in a subprocess
per backend (run twice each; the first numba run pays JIT/cache costs,
so the second is the representative one).

    python3 benchmarks/bench_kernels.py [--quick]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from modstab import _kernels


def timeit(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def micro(sizes):
    rng = np.random.default_rng(0)
    rows = []
    for n in sizes:
        a = rng.normal(size=(n, 4)) + 1j * rng.normal(size=(n, 4))
        b = rng.normal(size=(n, 4)) + 1j * rng.normal(size=(n, 4))
        t = rng.normal(size=(4, 4, 4)).astype(np.complex128)
        cases = [
            ("batch_mul", (a, b, t)),
            ("rho_norm", (a,)),
            ("rho_power", (a, 0.5)),
            ("rho_orlicz", (a, 1)),
        ]
        for name, args in cases:
            t_np = timeit(_kernels.NUMPY_IMPLS[name], *args)
            if _kernels.NUMBA_IMPLS is not None:
                _kernels.NUMBA_IMPLS[name](*args)  # compile outside the clock
                t_nb = timeit(_kernels.NUMBA_IMPLS[name], *args)
                rows.append((name, n, t_np, t_nb, t_np / t_nb))
            else:
                rows.append((name, n, t_np, float("nan"), float("nan")))
    print(f"{'kernel':<12} {'n':>8} {'numpy':>12} {'numba':>12} {'speedup':>8}")
    for name, n, t_np, t_nb, sp in rows:
        print(f"{name:<12} {n:>8} {t_np * 1e6:>10.1f}us {t_nb * 1e6:>10.1f}us {sp:>8.2f}")


def end_to_end(scenario="corollary-ascending-p05"):
    print(f"\nend-to-end: modstab run {scenario} (second run per backend)")
    for label, extra_env in (("numba", {}), ("numpy", {"MODSTAB_NO_NUMBA": "1"})):
        env = dict(os.environ, **extra_env)
        cmd = [sys.executable, "-m", "modstab.cli", "run", scenario, "--quiet"]
        times = []
        for _ in range(2):
            t0 = time.perf_counter()
            proc = subprocess.run(cmd, env=env, capture_output=True)
            times.append(time.perf_counter() - t0)
            if proc.returncode != 0:
                print(f"  {label}: scenario exited {proc.returncode}")
                break
        else:
            print(f"  {label:<6} first={times[0]:.2f}s warm={times[1]:.2f}s")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="small sizes, skip end-to-end")
    args = parser.parse_args()
    print(f"active backend: {_kernels.ACTIVE_BACKEND}")
    micro(sizes=(1024,) if args.quick else (1024, 131072))
    if not args.quick:
        end_to_end()


if __name__ == "__main__":
    main()
