"""Time the numba kernels against the numpy fallback on the same workloads.

    python benchmarks/bench_backends.py [--repeat 3]

Both backends evaluate identical node sets, so the script also reports the
largest relative difference between their outputs.
"""

import argparse
import time

import numpy as np

from pqwolff import (IterationConfig, Measure, NFunction, SublinearLaw, WolffConfig, log_grid, solve)
from pqwolff.wolff import evaluate


def _best(fn, repeat):
    out, best = None, float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def workloads():
    nf = NFunction(2.0, 3.0, 3)
    ball = Measure.uniform_ball(3, c=0.01)
    mixed = Measure(3, atoms=(((0.3, 0.0, 0.0), 0.2),), densities=Measure.uniform_ball(3).densities)
    grid = log_grid(1e-4, 1e4, 401)
    pts = np.c_[grid, np.zeros((grid.size, 2))]
    law = SublinearLaw(0.25, nf)
    ic = IterationConfig(grid=log_grid(1e-3, 1e3, 121), wolff_cfg=WolffConfig(rel_tol=1e-8))
    return {
        "profile_ball_401": lambda b: evaluate(nf.packed(0), ball, grid, WolffConfig(rel_tol=1e-8), backend=b).values,
        "points_mixed_401": lambda b: evaluate(nf.packed(0), mixed, pts, backend=b).values,
        "solve_ball_121": lambda b: solve(law, ball, ic, backend=b)[0].values,
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    print(f"{'workload':<20}{'numba s':>12}{'numpy s':>12}{'speedup':>10}{'max rel diff':>15}")
    for name, fn in workloads().items():
        fn("numba")  # compile outside the timing
        tn, a = _best(lambda: fn("numba"), args.repeat)
        tp, b = _best(lambda: fn("numpy"), args.repeat)
        fin = np.isfinite(a) & (a != 0)
        diff = float(np.max(np.abs(a[fin] - b[fin]) / np.abs(a[fin]), initial=0.0))
        print(f"{name:<20}{tn:>12.3f}{tp:>12.3f}{tp / tn:>10.1f}{diff:>15.2e}")


if __name__ == "__main__":
    main()
