"""Pivot kernel timings: numba @njit against the vectorized numpy path.

    python3 benchmarks/bench_pivot.py            # kernels only
    python3 benchmarks/bench_pivot.py --solve    # also a full decide per backend

The --solve run starts one subprocess per backend so that WEFKIT_NO_NUMBA
takes effect at import time.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from wefkit.lp import kernels

SOLVE_SNIPPET = """
import time
from pathlib import Path
from wefkit.compiler import CompileParams, compile_program
from wefkit.driver import decide
from wefkit.lp.kernels import backend
from wefkit.pseudolang import load
prog = load(Path({path!r}).read_text())
wef = compile_program(prog, CompileParams(3, 13))
decide(wef, (1, 0, 0, 0, 0, 1), warm=False)
t = time.perf_counter()
for x in [(0,) * 6, (1,) * 6, (0, 1, 1, 0, 0, 1)]:
    decide(wef, x, warm=False)
print(backend(), round(time.perf_counter() - t, 3))
"""


def tableau(rows, cols, rng):
    T = rng.integers(-50, 51, size=(rows, cols), dtype=np.int64)
    T[0, 0] = 7
    return T


def best_of(fn, reps):
    out = []
    for _ in range(reps):
        t = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t)
    return min(out)


def bench_kernels(sizes, reps):
    rng = np.random.default_rng(0)
    print(f"{'shape':>12} {'numba ms':>10} {'numpy ms':>10} {'ratio':>7}")
    for r, c in sizes:
        T = tableau(r, c, rng)
        out = np.empty_like(T)
        kernels._pivot_i64_jit(T, 0, 0, np.int64(1), out)  # compile outside the timing
        a, _ = kernels._pivot_numpy(T, 0, 0, 1)
        kernels._pivot_i64_jit(T, 0, 0, np.int64(1), out)
        assert np.array_equal(a, out)
        t_jit = best_of(lambda: kernels._pivot_i64_jit(T, 0, 0, np.int64(1), out), reps)
        t_np = best_of(lambda: kernels._pivot_numpy(T, 0, 0, 1), reps)
        print(f"{r:>5}x{c:<6} {t_jit * 1e3:>10.3f} {t_np * 1e3:>10.3f} {t_np / t_jit:>7.2f}")


def bench_solve():
    path = os.path.join(os.path.dirname(__file__), "..", "programs", "matching4.psc")
    code = SOLVE_SNIPPET.format(path=os.path.abspath(path))
    for flag in ("0", "1"):
        env = dict(os.environ, WEFKIT_NO_NUMBA=flag)
        r = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
        print("decide x3:", r.stdout.strip() or r.stderr.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--reps", type=int, default=20)
    ap.add_argument("--solve", action="store_true")
    args = ap.parse_args()
    bench_kernels([(50, 100), (200, 400), (800, 1600), (2000, 3500)], args.reps)
    if args.solve:
        bench_solve()


if __name__ == "__main__":
    main()
