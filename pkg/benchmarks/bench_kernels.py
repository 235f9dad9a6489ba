"""Benchmark the compiled grid-sampling core against the numpy fallback.

Both backends compute the same two primitives; this script times them on
deterministic workloads and prints the per-call medians and the speedup.

    python3 benchmarks/bench_kernels.py --sizes 256,1024,4096 --repeats 5
"""

import argparse
import random
import statistics
import time

import numpy as np

from whitneylab.funcspace import random_oscillating
from whitneylab.kernels import (
    available_backends,
    grid_max_abs_difference,
    piecewise_eval,
    segments_from_function,
)


def build_workload(seed: int, n: int):
    rng = random.Random(seed)
    f = random_oscillating(rng.randint(1, 10**6), 1, complexity=2)
    knots, slope, intercept = segments_from_function(f)
    lo, hi = knots[0], knots[-1]
    xs = np.linspace(lo - 1.0, hi + 1.0, n)
    ts = np.linspace(1e-3, 1.0, max(n // 8, 8))
    offsets = np.array([-1.0, 0.0, 1.0])
    coeffs = np.array([1.0, -2.0, 1.0])
    return (xs, ts, offsets, coeffs, knots, slope, intercept)


def time_call(fn, repeats: int) -> float:
    samples = []
    for _ in range(repeats):
        started = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - started)
    return statistics.median(samples)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="256,1024,4096")
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=20260819)
    args = parser.parse_args()

    backends = available_backends()
    print(f"backends: {', '.join(backends)}")
    if "compiled" not in backends:
        print("compiled backend unavailable; timing the fallback only")

    sizes = [int(s) for s in args.sizes.split(",")]
    header = f"{'primitive':<22}{'n':>6}" + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)

    for n in sizes:
        work = build_workload(args.seed, n)
        rows = [
            ("grid_max_abs_diff", lambda b: grid_max_abs_difference(*work, backend=b)),
            (
                "piecewise_eval",
                lambda b: piecewise_eval(work[0], work[4], work[5], work[6], backend=b),
            ),
        ]
        for name, call in rows:
            times = {b: time_call(lambda: call(b), args.repeats) for b in backends}
            line = f"{name:<22}{n:>6}" + "".join(f"{times[b]:>12.6f}" for b in backends)
            if len(backends) == 2:
                line += f"{times['python'] / times['compiled']:>9.1f}x"
            print(line)

    # correctness spot check alongside the timings
    work = build_workload(args.seed, 512)
    values = [grid_max_abs_difference(*work, backend=b) for b in backends]
    spread = max(values) - min(values)
    print(f"agreement across backends: max spread {spread:.3g}")
    return 0 if spread < 1e-12 else 1


if __name__ == "__main__":
    raise SystemExit(main())
