#!/usr/bin/env python3
"""Timing comparison of the compiled kernels against the NumPy fallback.

Run from the repository root:

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

import neelwall._kernels_np as np_impl

try:
    import neelwall._kernels as cy_impl
except ImportError:
    cy_impl = None


def timeit(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    rng = np.random.default_rng(0)
    backends = [("numpy", np_impl)] + ([("cython", cy_impl)] if cy_impl else [])
    if cy_impl is None:
        print("compiled extension not available; timing the fallback only\n")

    print(f"{'kernel':<28}{'n':>8}" + "".join(f"{name:>12}" for name, _ in backends)
          + f"{'ratio':>9}{'max |diff|':>12}")
    for n in (1025, 2049, 4097):
        fm = rng.normal(size=n - 1)
        times, values = [], []
        for _, impl in backends:
            t, v = timeit(impl.pair_lag_sum, fm)
            times.append(t)
            values.append(v)
        ratio = times[0] / times[-1] if len(times) > 1 else 1.0
        diff = abs(values[0] - values[-1]) if len(values) > 1 else 0.0
        print(f"{'pair_lag_sum':<28}{n:>8}"
              + "".join(f"{t * 1e3:>10.1f}ms" for t in times)
              + f"{ratio:>8.1f}x{diff:>12.2e}")

    for n in (1025, 2049, 4097):
        xs = np.linspace(-100.0, 100.0, n)
        f = np.exp(-0.01 * xs**2) * (1.0 + 0.2 * np.sin(xs))
        times, values = [], []
        for _, impl in backends:
            t, v = timeit(impl.poisson_layer, xs, f, xs, 1.5, repeat=2)
            times.append(t)
            values.append(v)
        ratio = times[0] / times[-1] if len(times) > 1 else 1.0
        diff = (float(np.max(np.abs(values[0] - values[-1])))
                if len(values) > 1 else 0.0)
        print(f"{'poisson_layer (one height)':<28}{n:>8}"
              + "".join(f"{t * 1e3:>10.1f}ms" for t in times)
              + f"{ratio:>8.1f}x{diff:>12.2e}")


if __name__ == "__main__":
    main()
